"""bathforge: structured-bath spectral densities, memory kernels, and
homodyne bath spectroscopy for a non-Markovian optomechanical resonator.

The package is organized by physical layer:

``numerics``      special functions, adaptive/PV/oscillatory quadrature, roots
``bath``          the globally admissible spectral-density model and coupling
``renorm``        stiffness/mass renormalizations, dressed mass, bare frequency
``response``      complex self-energy and mechanical susceptibilities
``memory``        exact dissipation kernel, asymptotics, noise kernel
``correlations``  fluctuation-dissipation correlation functions and variances
``spectroscopy``  cavity readout, homodyne transduction, reconstruction
``cli``           reproducible CSV/JSON figure-data pipeline
"""

__version__ = "0.1.0"

from .bath import BathSpec, MicroscopicProfile, calibrate
from .renorm import Mode, Resonator, calibrate_from_quality
from .spectroscopy import CavityProbe

__all__ = [
    "__version__",
    "BathSpec",
    "MicroscopicProfile",
    "CavityProbe",
    "Mode",
    "Resonator",
    "calibrate",
    "calibrate_from_quality",
]
