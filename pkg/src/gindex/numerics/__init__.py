"""Self-contained numerical kernel used by the pillar computations."""

from gindex.numerics.hmm import GaussianHMM, HmmModel, hmm_decode, hmm_fit
from gindex.numerics.ols import OLSRegressor, OlsFit, SampleSizeError, SingularDesignError, ols_fit
from gindex.numerics.stats import (
    Correlation,
    betainc,
    pearson_corr,
    percentile,
    rolling_corr,
    rolling_stat,
    student_t_sf,
    two_sided_p,
)
from gindex.numerics.zeta import zeta_critical_line

__all__ = [
    "Correlation",
    "GaussianHMM",
    "HmmModel",
    "OLSRegressor",
    "OlsFit",
    "SampleSizeError",
    "SingularDesignError",
    "betainc",
    "hmm_decode",
    "hmm_fit",
    "ols_fit",
    "pearson_corr",
    "percentile",
    "rolling_corr",
    "rolling_stat",
    "student_t_sf",
    "two_sided_p",
    "zeta_critical_line",
]
