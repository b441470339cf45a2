"""Discrepancy of Kronecker sequences in randomized boxes.

Simulation of the visit-count discrepancy, its resonant reduction to a Poisson
process of small denominators, the lattice picture of that process, and the
statistical checks of the resulting Cauchy limit.
"""

__version__ = "0.1.0"

from .errors import KroneckerError  # noqa: E402
from .params import ExperimentConfig, SampleXi, ShearMatrix, load_config, sample_xi  # noqa: E402

__all__ = ["ExperimentConfig", "KroneckerError", "SampleXi", "ShearMatrix", "__version__",
           "load_config", "sample_xi"]
