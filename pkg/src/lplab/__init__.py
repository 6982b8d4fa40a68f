"""FFT-based dyadic frequency-localization operators on periodic grids,
with a sweep harness that measures the constants in commutator and
weighted-embedding inequalities.

Layers, bottom up:

- ``grid``: sampled fields on [-L, L)^n, integral-convention transforms,
  quadrature, serialization, spectral resampling.
- ``cutoff`` / ``dyadic``: smooth dyadic cutoffs; band projections,
  fractional derivatives, band kernels, the shell-mass decay checker.
- ``realspace``: maximal function, Riesz potentials, truncated power
  kernels, radial majorant bound, two-point difference ratios.
- ``norms``: Lebesgue norms and the weighted band/annulus norm scales.
- ``commutator``: de-aliased products, the two commutator forms, kernel
  annulus decomposition, the frequency-interaction split.
- ``families`` / ``harness`` / ``report``: seeded test-function
  generators, the verification suites, and report emission.
- ``cli``: the ``lplab`` command.
"""

__version__ = "0.1.0"

from .cutoff import CutoffProfile, build_cutoff
from .grid import (
    GridSpec,
    SampledField,
    SpectralField,
    forward_transform,
    inverse_transform,
    quadrature_integral,
)
from .harness import SUITE_IDS, SweepConfig, default_config, run_suite
from .report import VerificationReport

__all__ = [
    "CutoffProfile",
    "GridSpec",
    "SampledField",
    "SpectralField",
    "SUITE_IDS",
    "SweepConfig",
    "VerificationReport",
    "build_cutoff",
    "default_config",
    "forward_transform",
    "inverse_transform",
    "quadrature_integral",
    "run_suite",
    "__version__",
]
