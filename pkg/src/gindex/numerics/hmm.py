"""Two-state Gaussian hidden Markov model: Baum-Welch fitting and Viterbi decoding."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from gindex._validation import as_finite_1d

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-6
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class HmmModel:
    means: np.ndarray
    variances: np.ndarray
    transition: np.ndarray
    initial: np.ndarray
    log_likelihoods: tuple[float, ...] = ()
    degenerate: bool = False
    converged: bool = True
    seed: int = 0

    def __post_init__(self):
        rows = np.asarray(self.transition).sum(axis=1)
        if not np.allclose(rows, 1.0, atol=1e-9, rtol=0):
            raise ValueError("transition rows must sum to 1")

    @property
    def n_states(self) -> int:
        return int(np.asarray(self.means).size)

    def canonical(self) -> "HmmModel":
        """Reorder states by ascending emission mean (state 0 = low regime)."""
        order = np.argsort(self.means, kind="stable")
        if np.array_equal(order, np.arange(self.n_states)):
            return self
        return replace(
            self,
            means=self.means[order],
            variances=self.variances[order],
            initial=self.initial[order],
            transition=self.transition[np.ix_(order, order)],
        )


def _log_emission(x: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    diff = x[:, None] - means[None, :]
    return -0.5 * (_LOG_2PI + np.log(variances)[None, :] + diff * diff / variances[None, :])


def _logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis) if axis is not None else out.item()


def _forward_backward(log_b, log_a, log_pi):
    T, K = log_b.shape
    alpha = np.empty((T, K))
    beta = np.zeros((T, K))
    alpha[0] = log_pi + log_b[0]
    for t in range(1, T):
        alpha[t] = _logsumexp(alpha[t - 1][:, None] + log_a, axis=0) + log_b[t]
    for t in range(T - 2, -1, -1):
        beta[t] = _logsumexp(log_a + (log_b[t + 1] + beta[t + 1])[None, :], axis=1)
    loglik = float(_logsumexp(alpha[-1]))
    return alpha, beta, loglik


def _safe_log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def _initial_model(x: np.ndarray, n_states: int, variance_floor: float):
    chunks = np.array_split(np.sort(x), n_states)
    means = np.array([c.mean() for c in chunks])
    variances = np.array([max(float(c.var()), variance_floor) for c in chunks])
    stay = 0.9
    transition = np.full((n_states, n_states), (1.0 - stay) / (n_states - 1))
    np.fill_diagonal(transition, stay)
    initial = np.full(n_states, 1.0 / n_states)
    return means, variances, transition, initial


def hmm_fit(
    series,
    n_states: int = 2,
    max_iter: int = 200,
    tol: float = 1e-8,
    variance_floor: float = VARIANCE_FLOOR,
    seed: int = 0,
) -> HmmModel:
    """Fit a Gaussian-emission HMM by Baum-Welch (EM in log space).

    Initial means and variances come from splitting the sorted sample into
    ``n_states`` equal blocks, so the fit is fully deterministic; ``seed``
    is stored on the model for provenance. A constant series returns a
    model with ``degenerate=True`` and every state at the constant.
    """
    x = as_finite_1d(series, "series")
    if n_states < 2:
        raise ValueError("n_states must be at least 2")
    if x.size < 2 * n_states:
        raise ValueError(f"need at least {2 * n_states} observations, got {x.size}")

    if np.ptp(x) == 0.0:
        logger.info("constant series, HMM collapsed to a single level")
        return HmmModel(
            means=np.full(n_states, x[0]),
            variances=np.full(n_states, variance_floor),
            transition=np.full((n_states, n_states), 1.0 / n_states),
            initial=np.full(n_states, 1.0 / n_states),
            degenerate=True,
            seed=seed,
        )

    means, variances, transition, initial = _initial_model(x, n_states, variance_floor)
    history: list[float] = []
    converged = False
    for _ in range(max_iter):
        log_b = _log_emission(x, means, variances)
        log_a = _safe_log(transition)
        alpha, beta, loglik = _forward_backward(log_b, log_a, _safe_log(initial))
        history.append(loglik)
        if len(history) > 1 and history[-1] - history[-2] < tol:
            converged = True
            break

        log_gamma = alpha + beta - loglik
        gamma = np.exp(log_gamma)
        log_xi = (
            alpha[:-1, :, None] + log_a[None, :, :] + (log_b[1:] + beta[1:])[:, None, :] - loglik
        )
        xi_sum = np.exp(log_xi).sum(axis=0)

        initial = gamma[0] / gamma[0].sum()
        occupancy = gamma[:-1].sum(axis=0)
        new_transition = transition.copy()
        for i in range(n_states):
            if occupancy[i] > 0:
                new_transition[i] = xi_sum[i] / xi_sum[i].sum()
        transition = new_transition
        weight = gamma.sum(axis=0)
        for k in range(n_states):
            if weight[k] <= 0:
                continue
            means[k] = gamma[:, k] @ x / weight[k]
            d = x - means[k]
            variances[k] = max(float(gamma[:, k] @ (d * d) / weight[k]), variance_floor)

    model = HmmModel(
        means=means,
        variances=variances,
        transition=transition,
        initial=initial,
        log_likelihoods=tuple(history),
        converged=converged,
        seed=seed,
    )
    return model.canonical()


def hmm_decode(model: HmmModel, series) -> np.ndarray:
    """Viterbi path with states labelled by ascending emission mean."""
    model = model.canonical()
    x = as_finite_1d(series, "series")
    if x.size == 0:
        return np.zeros(0, dtype=int)
    log_b = _log_emission(x, model.means, model.variances)
    log_a = _safe_log(model.transition)
    T, K = log_b.shape
    delta = _safe_log(model.initial) + log_b[0]
    back = np.zeros((T, K), dtype=int)
    for t in range(1, T):
        scores = delta[:, None] + log_a
        back[t] = np.argmax(scores, axis=0)
        delta = scores[back[t], np.arange(K)] + log_b[t]
    path = np.empty(T, dtype=int)
    path[-1] = int(np.argmax(delta))
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


class GaussianHMM(BaseEstimator):
    """Estimator interface over :func:`hmm_fit` / :func:`hmm_decode`."""

    def __init__(self, n_states=2, max_iter=200, tol=1e-8, variance_floor=VARIANCE_FLOOR, random_state=0):
        self.n_states = n_states
        self.max_iter = max_iter
        self.tol = tol
        self.variance_floor = variance_floor
        self.random_state = random_state

    def fit(self, X, y=None):
        x = np.asarray(X, dtype=float).ravel()
        self.model_ = hmm_fit(
            x,
            n_states=self.n_states,
            max_iter=self.max_iter,
            tol=self.tol,
            variance_floor=self.variance_floor,
            seed=self.random_state,
        )
        self.means_ = self.model_.means
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return hmm_decode(self.model_, np.asarray(X, dtype=float).ravel())

    def score(self, X, y=None):
        """Log-likelihood of ``X`` under the fitted model."""
        check_is_fitted(self, "model_")
        x = np.asarray(X, dtype=float).ravel()
        m = self.model_
        _, _, loglik = _forward_backward(
            _log_emission(x, m.means, m.variances), _safe_log(m.transition), _safe_log(m.initial)
        )
        return loglik
