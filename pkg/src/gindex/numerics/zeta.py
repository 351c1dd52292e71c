"""Riemann zeta on the critical line by Euler-Maclaurin summation."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_ABS_T = 1.0e6
_MAX_TERMS = 40
_TWO_PI_LD = np.longdouble("6.28318530717958647692528676655900577")


@lru_cache(maxsize=None)
def _correction_coefficients(count: int = _MAX_TERMS) -> tuple[float, ...]:
    """``B_{2k} / (2k)!`` for k = 1..count, from the exact Bernoulli recurrence."""
    m_max = 2 * count
    bern = [Fraction(1)]
    for m in range(1, m_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * bern[k]
        bern.append(-acc / (m + 1))
    return tuple(float(bern[2 * k] / math.factorial(2 * k)) for k in range(1, count + 1))


def _n_pow_minus_s(n: np.ndarray, t: float) -> np.ndarray:
    """``n ** -(0.5 + i t)`` with the phase reduced in extended precision."""
    n_ld = n.astype(np.longdouble)
    phase = np.fmod(np.longdouble(t) * np.log(n_ld), _TWO_PI_LD)
    mag = 1.0 / np.sqrt(n.astype(float))
    return mag * (np.cos(phase).astype(float) - 1j * np.sin(phase).astype(float))


def _terms_needed(t: float) -> int:
    return max(10, int(math.ceil(abs(t) / math.pi)) + 10)


def zeta_critical_line(t: float) -> complex:
    """Evaluate zeta(0.5 + i t) for ``|t| <= 1e6``.

    The head sum runs to ``N ~ |t|/pi`` so the Euler-Maclaurin tail terms
    shrink geometrically (ratio about 1/4); they are added until they drop
    below double precision or stop decreasing. Negative ``t`` is served by
    conjugate symmetry.
    """
    t = float(t)
    if not math.isfinite(t) or abs(t) > MAX_ABS_T:
        raise ValueError(f"t must be finite with |t| <= {MAX_ABS_T:g}, got {t}")
    if t < 0:
        return zeta_critical_line(-t).conjugate()

    s = complex(0.5, t)
    N = _terms_needed(t)
    head = _n_pow_minus_s(np.arange(1, N, dtype=np.int64), t)
    total = complex(np.sum(head))
    n_s = complex(_n_pow_minus_s(np.array([N], dtype=np.int64), t)[0])  # N ** -s
    total += N * n_s / (s - 1.0) + 0.5 * n_s

    poch = s
    power = n_s / N  # N ** (-s - 1)
    inv_n2 = 1.0 / (N * N)
    previous = math.inf
    for k, coef in enumerate(_correction_coefficients(), start=1):
        term = coef * poch * power
        size = abs(term)
        if size > previous:
            break
        total += term
        if size <= 1e-17 * max(1.0, abs(total)):
            break
        previous = size
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        power *= inv_n2
    return total
