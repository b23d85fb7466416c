"""Command-line frontend: config ingestion, sweeps, CSV/JSON emission.

Subcommands
-----------
spectral       bath spectral density, normalized curve, and local slope
kernel         dissipation-kernel trace (closed form)
renorm         stiffness/mass shifts, dressed mass, bare frequency (JSON)
response       self-energy and susceptibility sweep
correlations   position/momentum correlation traces
spectroscopy   synthetic homodyne records and the reconstruction round trip
figures        normalized curve data for the spectral-density and kernel figures
selftest       run the built-in oracle cross-checks and print PASS/FAIL counts

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
Output files are byte-stable for identical configs: floats are printed with
17 significant digits and every file starts with a comment header recording
the tool version and the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__, bath, correlations, memory, renorm, response, spectroscopy
from .errors import (
    BathforgeError,
    ConfigError,
    DomainError,
    InstabilityError,
    NonConvergenceError,
)
from .renorm import Mode, Resonator
from .units import hz_to_angular, kelvin_to_angular

__all__ = ["RunConfig", "load_config", "default_config_dict", "run", "main"]

_SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def default_config_dict() -> dict:
    """The paper-regime defaults: k = -2.30, W/2pi = 0.914 MHz, T = 300 K, Q = 215."""
    return {
        "bath": {"k": -2.30, "omega_r_hz": 0.914e6, "q_target": 215.0},
        "resonator": {"mass": 1.0, "temperature_kelvin": 300.0, "mode": "anchored"},
        "probe": {
            "kappa_hz": 0.457e6,  # kappa = 0.5 W, comfortably >= 100 gamma at Q = 215
            "delta_hz": -0.914e6,  # effective detuning -W: resonant transduction
            "g_hz": 0.457e3,  # g/kappa = 1e-3, weak probe
            "theta": 0.0,
        },
        "grids": {
            "omega_min": 0.1,
            "omega_max": 3.0,
            "n_points": 200,
            "t_max": 40.0,
            "n_times": 201,
        },
        "output": {"dir": "bathforge_out", "format": "csv"},
    }


@dataclass(frozen=True)
class RunConfig:
    """Validated, reduced-unit run configuration.

    ``spec``/``resonator``/``probe`` are in reduced units (Omega_R = 1);
    ``resolved`` keeps the raw input dictionary for output headers.
    """

    spec: bath.BathSpec
    resonator: Resonator
    probe: spectroscopy.CavityProbe | None
    omega_min: float
    omega_max: float
    n_points: int
    t_max: float
    n_times: int
    out_dir: Path
    out_format: str
    resolved: dict


def _get(section: dict, name: str, path: str, kind=float, required=True, default=None):
    if name not in section:
        if required:
            raise ConfigError(f"missing required field '{path}'", field=path)
        return default
    try:
        return kind(section[name])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}' is not a valid {kind.__name__}", field=path) from exc


def _validate(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a table/object")
    merged = default_config_dict()
    for key in ("bath", "resonator", "probe", "grids", "output"):
        user = raw.get(key)
        if user is None:
            continue
        if not isinstance(user, dict):
            raise ConfigError(f"section '{key}' must be a table/object", field=key)
        merged[key].update(user)

    b = merged["bath"]
    k = _get(b, "k", "bath.k")
    omega_r_hz = _get(b, "omega_r_hz", "bath.omega_r_hz")
    if omega_r_hz <= 0:
        raise ConfigError("bath.omega_r_hz must be positive", field="bath.omega_r_hz")
    user_bath = raw.get("bath")
    has_j = "j_res" in (user_bath or {})
    has_q = "q_target" in (user_bath or {})
    if has_j and has_q:
        raise ConfigError(
            "exactly one of bath.j_res / bath.q_target may be supplied", field="bath"
        )
    if isinstance(user_bath, dict) and not (has_j or has_q):
        raise ConfigError(
            "bath section must supply exactly one of j_res / q_target", field="bath"
        )
    if has_j:
        merged["bath"].pop("q_target", None)

    r = merged["resonator"]
    mass = _get(r, "mass", "resonator.mass")
    t_kelvin = _get(r, "temperature_kelvin", "resonator.temperature_kelvin")
    mode_name = _get(r, "mode", "resonator.mode", kind=str)
    if mode_name not in ("anchored", "forward"):
        raise ConfigError("resonator.mode must be 'anchored' or 'forward'", field="resonator.mode")
    if t_kelvin < 0:
        raise ConfigError("resonator.temperature_kelvin must be >= 0", field="resonator.temperature_kelvin")

    omega_r = hz_to_angular(omega_r_hz)  # rad/s, then reduced to 1
    t_reduced = kelvin_to_angular(t_kelvin) / omega_r

    try:
        if has_j:
            spec = bath.calibrate(k, 1.0, _get(b, "j_res", "bath.j_res"))
        else:
            q_target = _get(b, "q_target", "bath.q_target")
            if q_target <= 0:
                raise ConfigError("bath.q_target must be positive", field="bath.q_target")
            spec = renorm.calibrate_from_quality(k, 1.0, q_target, mass=mass)
    except DomainError as exc:
        raise ConfigError(f"bath section invalid: {exc}", field="bath") from exc

    if mode_name == "anchored":
        resonator = Resonator.anchored(mass=mass, omega_r=1.0, temperature=t_reduced)
    else:
        omega_0_hz = _get(r, "omega_0_hz", "resonator.omega_0_hz")
        resonator = Resonator.forward(
            mass=mass, omega_0=hz_to_angular(omega_0_hz) / omega_r, temperature=t_reduced
        )

    probe = None
    p = merged.get("probe")
    if p:
        kappa_hz = _get(p, "kappa_hz", "probe.kappa_hz")
        if kappa_hz <= 0:
            raise ConfigError("probe.kappa_hz must be positive", field="probe.kappa_hz")
        probe = spectroscopy.CavityProbe(
            kappa=hz_to_angular(kappa_hz) / omega_r,
            delta=hz_to_angular(_get(p, "delta_hz", "probe.delta_hz")) / omega_r,
            g=hz_to_angular(_get(p, "g_hz", "probe.g_hz")) / omega_r,
            theta=_get(p, "theta", "probe.theta"),
        )

    g = merged["grids"]
    omega_min = _get(g, "omega_min", "grids.omega_min")
    omega_max = _get(g, "omega_max", "grids.omega_max")
    n_points = _get(g, "n_points", "grids.n_points", kind=int)
    t_max = _get(g, "t_max", "grids.t_max")
    n_times = _get(g, "n_times", "grids.n_times", kind=int)
    if not (0 <= omega_min < omega_max):
        raise ConfigError("grids require 0 <= omega_min < omega_max", field="grids")
    if n_points < 2 or n_times < 2:
        raise ConfigError("grids.n_points and grids.n_times must be >= 2", field="grids")
    if t_max <= 0:
        raise ConfigError("grids.t_max must be positive", field="grids.t_max")

    o = merged["output"]
    fmt = _get(o, "format", "output.format", kind=str)
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'", field="output.format")

    return RunConfig(
        spec=spec,
        resonator=resonator,
        probe=probe,
        omega_min=omega_min,
        omega_max=omega_max,
        n_points=n_points,
        t_max=t_max,
        n_times=n_times,
        out_dir=Path(str(o.get("dir", "bathforge_out"))),
        out_format=fmt,
        resolved=merged,
    )


def load_config(path: str | Path | None) -> RunConfig:
    """Parse and validate a TOML or JSON run configuration (None: defaults)."""
    if path is None:
        return _validate({})
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(path.read_text())
        else:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return _validate(raw)


# ---------------------------------------------------------------------------
# Output helpers (byte-stable formatting)
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _header_lines(cfg: RunConfig, columns) -> list[str]:
    return [
        f"# bathforge {__version__}",
        "# config: " + json.dumps(cfg.resolved, sort_keys=True, separators=(",", ":")),
        "# columns: " + ",".join(columns),
    ]


def _emit(cfg: RunConfig, stem: str, columns: dict) -> Path:
    """Write a table as CSV (or a JSON mirror) and return the path."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    rows = zip(*(columns[c] for c in names))
    if cfg.out_format == "csv":
        path = cfg.out_dir / f"{stem}.csv"
        lines = _header_lines(cfg, names)
        lines.append(",".join(names))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n")
    else:
        path = cfg.out_dir / f"{stem}.json"
        payload = {
            "tool": f"bathforge {__version__}",
            "config": cfg.resolved,
            "columns": {c: [v if isinstance(v, str) else float(v) for v in columns[c]] for c in names},
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return path


def _emit_json(cfg: RunConfig, stem: str, payload: dict) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{stem}.json"
    doc = {"tool": f"bathforge {__version__}", "config": cfg.resolved, **payload}
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_spectral(cfg: RunConfig) -> list[Path]:
    grid = np.linspace(max(cfg.omega_min, 1e-12), cfg.omega_max, cfg.n_points)
    j = bath.spectral_density(cfg.spec, grid)
    norm = cfg.spec.a_k * cfg.spec.omega_r**3
    return [
        _emit(
            cfg,
            "spectral",
            {
                "omega_over_omega_r": grid,
                "j": j,
                "j_normalized": j / norm,
                "log_slope": bath.log_slope(cfg.spec, grid),
            },
        )
    ]


def _cmd_kernel(cfg: RunConfig) -> list[Path]:
    times = np.linspace(0.0, cfg.t_max, cfg.n_times)
    trace = memory.kernel_trace(cfg.spec, times, memory.KernelMethod.BESSEL)
    norm = 2.0 * cfg.spec.a_k * cfg.spec.omega_r**3 / _SQRT_PI
    return [
        _emit(
            cfg,
            "kernel",
            {
                "t_omega_r": trace.times,
                "mu_normalized": [v / norm for v in trace.values],
                "method": [trace.method.value] * len(trace.times),
            },
        )
    ]


def _cmd_renorm(cfg: RunConfig) -> list[Path]:
    closed = renorm.renorm_summary(cfg.spec, cfg.resonator)
    quad = renorm.renorm_oracle(cfg.spec, cfg.resonator)
    summary = response.linewidth(cfg.spec, cfg.resonator)
    return [
        _emit_json(
            cfg,
            "renorm",
            {
                "closed_form": closed.to_json(),
                "quadrature": quad.to_json(),
                "gamma_over_omega_r": summary.gamma / summary.omega_r,
                "q_factor": summary.q_factor,
                "slow_variation_ok": summary.slow_variation_ok,
            },
        )
    ]


def _cmd_response(cfg: RunConfig) -> list[Path]:
    grid = np.linspace(max(cfg.omega_min, 1e-12), cfg.omega_max, cfg.n_points)
    chis, sigmas = [], []
    for w in grid:
        sigmas.append(response.self_energy(cfg.spec, w))
        chis.append(response.susceptibility(cfg.spec, cfg.resonator, w))
    return [
        _emit(
            cfg,
            "response",
            {
                "omega": grid,
                "re_chi": [c.value.real for c in chis],
                "im_chi": [c.value.imag for c in chis],
                "re_sigma": [s.re for s in sigmas],
                "im_sigma": [s.im for s in sigmas],
            },
        )
    ]


def _cmd_correlations(cfg: RunConfig) -> list[Path]:
    times = np.linspace(0.0, cfg.t_max, cfg.n_times)
    mode = (
        correlations.CorrelationMode.HIGH_T
        if cfg.resonator.temperature > 0
        else correlations.CorrelationMode.FULL_QUANTUM
    )
    trace = correlations.correlation_trace(cfg.spec, cfg.resonator, times, mode)
    pole = correlations.correlation_trace(
        cfg.spec, cfg.resonator, times, correlations.CorrelationMode.POLE
    )
    return [
        _emit(
            cfg,
            "correlations",
            {
                "t_omega_r": trace.times,
                "cqq": trace.cqq,
                "cpp": trace.cpp,
                "method": [trace.method.value] * len(trace.times),
            },
        ),
        _emit(
            cfg,
            "correlations_pole",
            {
                "t_omega_r": pole.times,
                "cqq": pole.cqq,
                "cpp": pole.cpp,
                "method": [pole.method.value] * len(pole.times),
            },
        ),
    ]


def _cmd_spectroscopy(cfg: RunConfig) -> list[Path]:
    if cfg.probe is None:
        raise ConfigError("spectroscopy requires a [probe] section", field="probe")
    grid = np.linspace(max(cfg.omega_min, 1e-6), cfg.omega_max, cfg.n_points)
    records = spectroscopy.synthesize_records(
        cfg.spec, cfg.resonator, cfg.probe, grid, f_ext=1.0, s_imp=0.0
    )
    rec_path = _emit(
        cfg,
        "spectroscopy_records",
        {
            "omega": [r.omega for r in records],
            "re_lambda": [r.lambda_theta.real for r in records],
            "im_lambda": [r.lambda_theta.imag for r in records],
            "s_xx": [r.s_xx for r in records],
            "re_xcoh": [r.x_coh.real for r in records],
            "im_xcoh": [r.x_coh.imag for r in records],
        },
    )
    bare = spectroscopy.bare_parameters(cfg.spec, cfg.resonator)
    recon = spectroscopy.reconstruct(cfg.probe, records, bare)
    j_true = bath.spectral_density(cfg.spec, recon.omega)
    rel_err = np.abs(recon.j - j_true) / np.where(j_true > 0, j_true, 1.0)
    recon_path = _emit(
        cfg,
        "reconstruction",
        {
            "omega": recon.omega,
            "re_chi": recon.chi.real,
            "im_chi": recon.chi.imag,
            "re_sigma": recon.re_sigma,
            "j_recovered": recon.j,
            "j_true": j_true,
            "rel_err": rel_err,
        },
    )
    return [rec_path, recon_path]


_FIGURE_KS = (-2.30, -1.75)


def _cmd_figures(cfg: RunConfig, which: int) -> list[Path]:
    if which == 2:
        grid = np.linspace(0.0, 3.0, 601)
        cols = {"omega_over_omega_r": grid}
        for k in _FIGURE_KS:
            spec_k = bath.calibrate(k, cfg.spec.omega_r, cfg.spec.j_res)
            cols[f"j_norm_k_{_k_tag(k)}"] = bath.spectral_density(spec_k, grid) / (
                spec_k.a_k * spec_k.omega_r**3
            )
        return [_emit(cfg, "figure2", cols)]
    if which == 3:
        times = np.linspace(0.0, 12.0, 601)
        cols = {"t_omega_r": times}
        for k in _FIGURE_KS:
            spec_k = bath.calibrate(k, cfg.spec.omega_r, cfg.spec.j_res)
            norm = 2.0 * spec_k.a_k * spec_k.omega_r**3 / _SQRT_PI
            cols[f"mu_norm_k_{_k_tag(k)}"] = [
                memory.dissipation_kernel(spec_k, t / spec_k.omega_r) / norm for t in times
            ]
        return [_emit(cfg, "figure3", cols)]
    raise ConfigError(f"unknown figure {which}; available: 2, 3")


def _k_tag(k: float) -> str:
    return ("m" if k < 0 else "p") + f"{abs(k):.2f}".replace(".", "p")


def _cmd_selftest(cfg: RunConfig) -> int:
    """Fast oracle suite: closed forms vs quadrature plus round trips."""
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = ""):
        checks.append((name, bool(ok), detail))

    for k in (-3.35, -2.30, -1.75):
        spec_k = bath.calibrate(k, 1.0, 1.0)
        orc = renorm.renorm_oracle(spec_k)
        dk, dm = renorm.stiffness_shift(spec_k), renorm.mass_shift(spec_k)
        check(
            f"delta_k closed vs quadrature (k={k})",
            abs(orc.delta_k / dk - 1) < 1e-9,
            f"rel={abs(orc.delta_k / dk - 1):.2e}",
        )
        check(
            f"delta_m closed vs quadrature (k={k})",
            abs(orc.delta_m / dm - 1) < 1e-9,
            f"rel={abs(orc.delta_m / dm - 1):.2e}",
        )
        worst = 0.0
        for t in np.linspace(0.0, 20.0, 9):
            cf = memory.dissipation_kernel(spec_k, t)
            oc = memory.dissipation_kernel_oracle(spec_k, t)
            worst = max(worst, abs(cf - oc) / max(abs(cf), abs(oc)))
        check(f"kernel closed vs oracle (k={k})", worst < 1e-7, f"worst rel={worst:.2e}")
        check(
            f"mu(0) = delta_k (k={k})",
            abs(memory.dissipation_kernel(spec_k, 0.0) / dk - 1) < 1e-8,
        )
        check(
            f"log slope at resonance = k (k={k})",
            abs(bath.log_slope(spec_k, 1.0) - k) < 1e-12,
        )

    spec, res = cfg.spec, cfg.resonator
    om0 = renorm.bare_frequency(spec, res)
    fwd = Resonator.forward(mass=res.mass, omega_0=om0, temperature=res.temperature)
    w_back = response.resonance_solve(spec, fwd)
    w_r = response.observed_resonance(spec, res)
    check("anchored->forward->anchored round trip", abs(w_back / w_r - 1) < 1e-6)

    if cfg.probe is not None:
        grid = np.linspace(0.5, 2.0, 31)
        records = spectroscopy.synthesize_records(spec, res, cfg.probe, grid)
        recon = spectroscopy.reconstruct(
            cfg.probe, records, spectroscopy.bare_parameters(spec, res)
        )
        j_true = bath.spectral_density(spec, recon.omega)
        worst = float(np.max(np.abs(recon.j / j_true - 1)))
        check("reconstruction round trip", worst < 1e-8, f"worst rel={worst:.2e}")

    n_pass = sum(1 for _, ok, _ in checks if ok)
    n_fail = len(checks) - n_pass
    for name, ok, detail in checks:
        state = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        print(f"{state}  {name}{suffix}")
    print(f"selftest: {n_pass} passed, {n_fail} failed")
    return 0 if n_fail == 0 else 3


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bathforge",
        description="Structured-bath spectral densities, memory kernels, and "
        "homodyne bath spectroscopy for an optomechanical resonator.",
    )
    parser.add_argument("--version", action="version", version=f"bathforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (
        "spectral",
        "kernel",
        "renorm",
        "response",
        "correlations",
        "spectroscopy",
        "selftest",
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="TOML or JSON run configuration")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--format", choices=("csv", "json"), default=None)
    p = sub.add_parser("figures")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--which", type=int, required=True, help="figure number (2 or 3)")
    return parser


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = RunConfig(**{**cfg.__dict__, "out_dir": Path(args.out)})
        if args.format is not None:
            cfg = RunConfig(**{**cfg.__dict__, "out_format": args.format})
        if args.command == "selftest":
            return _cmd_selftest(cfg)
        dispatch = {
            "spectral": _cmd_spectral,
            "kernel": _cmd_kernel,
            "renorm": _cmd_renorm,
            "response": _cmd_response,
            "correlations": _cmd_correlations,
            "spectroscopy": _cmd_spectroscopy,
        }
        if args.command == "figures":
            paths = _cmd_figures(cfg, args.which)
        else:
            paths = dispatch[args.command](cfg)
        for p in paths:
            print(p)
        return 0
    except (ConfigError, DomainError, InstabilityError) as exc:
        print(f"ERROR 2: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"ERROR 3: {exc}", file=sys.stderr)
        return 3
    except BathforgeError as exc:
        print(f"ERROR 1: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
