"""Fractional and multifractional Gaussian processes.

Closed-form covariance kernels for eleven process families, an
independent quadrature oracle for every kernel, exact seeded samplers
(Cholesky, circulant embedding, moving average), and estimators for
Hurst/Hölder regularity and long-range dependence.
"""

from .kernels import (
    FBM, RLFBM, MBM, RLMBM, WeylFOU, RLFOU, WeylMOU, RLMOU, FRBM, MRBM, GC,
    AlphaFunction, HurstFunction, MemoryClass, TimeFunction,
    cov, cov_matrix, memory_class, tangent_index, local_dimension,
    spec_from_dict, spec_to_dict, var,
)
from .sampler import (
    SamplePath, TimeGrid, derive_subseed, sample, sample_ensemble,
)
from .specfun import AccuracyBudget

__version__ = "0.1.0"

__all__ = [
    "FBM", "RLFBM", "MBM", "RLMBM", "WeylFOU", "RLFOU", "WeylMOU", "RLMOU",
    "FRBM", "MRBM", "GC",
    "AlphaFunction", "HurstFunction", "MemoryClass", "TimeFunction",
    "cov", "cov_matrix", "var", "memory_class", "tangent_index",
    "local_dimension", "spec_from_dict", "spec_to_dict",
    "SamplePath", "TimeGrid", "derive_subseed", "sample", "sample_ensemble",
    "AccuracyBudget", "__version__",
]
