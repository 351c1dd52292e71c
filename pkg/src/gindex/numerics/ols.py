"""Ordinary least squares with classical inference."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, check_array

from gindex.numerics.stats import two_sided_p


class SingularDesignError(np.linalg.LinAlgError):
    pass


class SampleSizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OlsFit:
    coefficients: np.ndarray
    r_squared: float
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    n_obs: int
    residuals: np.ndarray

    @property
    def df_resid(self) -> int:
        return self.n_obs - self.coefficients.size


def ols_fit(design, response) -> OlsFit:
    """Least squares of ``response`` on ``design`` (intercept column included by caller).

    Coefficients come from a QR factorisation. Standard errors use
    ``sigma^2 (X'X)^-1`` with ``sigma^2 = SSE / (n - k)``; p-values are
    two-sided Student-t with ``n - k`` degrees of freedom. A constant
    response gives ``R^2 = 0``.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise ValueError(f"design {X.shape} and response {y.shape} are not aligned")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("design and response must be finite")
    n, k = X.shape
    if n <= k:
        raise SampleSizeError(f"need more observations than regressors (n={n}, k={k})")
    if np.linalg.matrix_rank(X) < k:
        raise SingularDesignError(f"design matrix is rank deficient (k={k})")

    Q, R = np.linalg.qr(X)
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    sse = float(resid @ resid)
    centered = y - y.mean()
    sst = float(centered @ centered)
    r2 = 0.0 if sst == 0.0 else min(1.0, max(0.0, 1.0 - sse / sst))

    dof = n - k
    sigma2 = sse / dof
    r_inv = np.linalg.solve(R, np.eye(k))
    se = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1))
    t_stats = np.empty(k)
    p_values = np.empty(k)
    for i in range(k):
        if se[i] > 0:
            t_stats[i] = beta[i] / se[i]
            p_values[i] = two_sided_p(t_stats[i], dof)
        elif beta[i] != 0:
            t_stats[i] = math.copysign(math.inf, beta[i])
            p_values[i] = 0.0
        else:
            t_stats[i] = 0.0
            p_values[i] = 1.0
    return OlsFit(beta, r2, se, t_stats, p_values, n, resid)


class OLSRegressor(RegressorMixin, BaseEstimator):
    """scikit-learn wrapper around :func:`ols_fit`.

    An intercept column is prepended when ``fit_intercept`` is true, so
    ``coef_`` holds only the slopes and ``fit_`` the full inference record.
    """

    def __init__(self, fit_intercept: bool = True):
        self.fit_intercept = fit_intercept

    def _design(self, X):
        if self.fit_intercept:
            return np.column_stack([np.ones(X.shape[0]), X])
        return X

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.fit_ = ols_fit(self._design(X), y)
        beta = self.fit_.coefficients
        self.intercept_ = float(beta[0]) if self.fit_intercept else 0.0
        self.coef_ = beta[1:] if self.fit_intercept else beta
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        X = check_array(X)
        return self.intercept_ + X @ self.coef_
