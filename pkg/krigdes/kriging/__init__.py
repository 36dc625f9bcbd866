"""协方差模型与克里金系统"""

from krigdes.kriging.covariance import CovModel, matern_corr, effective_distance, cov_matrix
from krigdes.kriging.linalg import CholFactor, jitter_cholesky, logdet_psd, psd_factor
from krigdes.kriging.system import (
    VariantKind,
    KrigingVariant,
    KrigingSystem,
    OrdinaryParts,
    build_system,
    half_factors,
    weights,
    kriging_cov,
    kriging_cov_between,
    kriging_variances,
    kriging_cov_ok_parts,
    conditional_cov,
    joint_logdet,
    schur_logdet,
    predict,
)

__all__ = [
    "CovModel",
    "matern_corr",
    "effective_distance",
    "cov_matrix",
    "CholFactor",
    "jitter_cholesky",
    "logdet_psd",
    "psd_factor",
    "VariantKind",
    "KrigingVariant",
    "KrigingSystem",
    "OrdinaryParts",
    "build_system",
    "half_factors",
    "weights",
    "kriging_cov",
    "kriging_cov_between",
    "kriging_variances",
    "kriging_cov_ok_parts",
    "conditional_cov",
    "joint_logdet",
    "schur_logdet",
    "predict",
]
