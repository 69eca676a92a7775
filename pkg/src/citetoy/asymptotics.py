"""Numerical checks of the group limit law and of tail behaviour.

The group of ``n`` authors has p.g.f. ``S(r + (1-r) Q(z))**n`` with the
per-paper law ``S(w) = 1 - lam (1-w)**gamma`` and ``1 - r_n = n**(-1/gamma)``.
It converges to ``exp(-lam (1-q)**gamma T(z)**gamma)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .models import DiscreteStableParams, pgf_eval

DEFAULT_GRID = tuple(np.round(np.arange(0.0, 0.951, 0.05), 2)) + (0.99,)


def _one_minus_q_of_z(q, z):
    return (1.0 - q) * (1.0 - z) / (1.0 - (1.0 - q) * z)


def _check_params(lam, gamma, q):
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma={gamma} outside (0, 1]")
    if not 0.0 < q <= 1.0:
        raise ParameterError(f"q={q} outside (0, 1]")
    if not lam > 0.0:
        raise ParameterError(f"lambda={lam} must be positive")


def rn_pgf_eval(inner_gamma: float, lam: float, q: float, n: int, z: float) -> float:
    """Group p.g.f. at finite ``n``.

    ``1 - w`` is formed as ``(1 - r_n)(1 - Q(z))`` instead of subtracting
    ``w`` from one; for ``gamma = 0.5`` and ``n = 1e6``, ``1 - r_n`` is
    ``1e-12`` and the direct subtraction would lose four digits.
    """
    _check_params(lam, inner_gamma, q)
    if lam > 1.0:
        raise ParameterError("lambda must be at most 1 for S to be a p.g.f.")
    if n < 1:
        raise DomainError("n must be at least 1")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if z == 1.0:
        return 1.0
    one_minus_r = float(n) ** (-1.0 / inner_gamma)
    one_minus_w = one_minus_r * _one_minus_q_of_z(q, z)
    s = lam * one_minus_w ** inner_gamma
    if s >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-s))


def limit_pgf_eval(lam: float, gamma: float, q: float, z: float) -> float:
    """``exp(-lam (1-q)**gamma ((1-z)/(1-(1-q)z))**gamma)``."""
    _check_params(lam, gamma, q)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if z == 1.0:
        return 1.0
    return math.exp(-lam * _one_minus_q_of_z(q, z) ** gamma)


def limit_as_discrete_stable(lam: float, gamma: float, q: float) -> DiscreteStableParams:
    """The limit law as a ``discrete_stable`` model, whose scale absorbs ``(1-q)**gamma``."""
    if q == 1.0:
        raise ParameterError("the limit degenerates to a point mass at 0 when q = 1")
    return DiscreteStableParams(lam * (1.0 - q) ** gamma, gamma, q)


@dataclass(frozen=True)
class ConvergenceReport:
    n_values: tuple
    sup_errors: tuple
    grid: tuple

    @property
    def strictly_decreasing(self) -> bool:
        e = self.sup_errors
        return all(b < a for a, b in zip(e, e[1:]))


def convergence_report(lam, gamma, q, n_values, grid=DEFAULT_GRID) -> ConvergenceReport:
    n_values = tuple(int(n) for n in n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("n_values must be increasing")
    grid = tuple(float(z) for z in grid)
    limit = [limit_pgf_eval(lam, gamma, q, z) for z in grid]
    errs = []
    for n in n_values:
        errs.append(max(abs(rn_pgf_eval(gamma, lam, q, n, z) - lz) for z, lz in zip(grid, limit)))
    return ConvergenceReport(n_values, tuple(errs), grid)


# --------------------------------------------------------------------------
# survival functions and tail fits
# --------------------------------------------------------------------------

def survival_from_pmf(probs, roundoff=1e-12) -> np.ndarray:
    """``P(X > k)`` for ``k = 0..N``.

    Summed from the right so light tails keep relative accuracy; the mass missing
    beyond ``N`` is added back when it exceeds roundoff.
    """
    probs = np.asarray(probs, dtype=float)
    deficit = 1.0 - math.fsum(probs)
    deficit = deficit if deficit > roundoff else 0.0
    tail = np.cumsum(probs[::-1])[::-1]
    return np.append(tail[1:], 0.0) + deficit


def survival_from_sample(sample, max_k) -> np.ndarray:
    sample = np.asarray(sample)
    counts = np.bincount(np.minimum(sample, max_k + 1), minlength=max_k + 2)
    return 1.0 - np.cumsum(counts[: max_k + 1]) / sample.size


def log_survival_tilted(tilted_coeffs, tilt) -> np.ndarray:
    """``log P(X > k)`` from coefficients of ``P(tilt z)``, ignoring mass beyond the order.

    For light tails only: ``T(k) = sum_{j>k} c_j tilt**(k-j)`` is accumulated by
    ``T(k) = (c_{k+1} + T(k+1)) / tilt`` and never underflows.
    """
    c = np.asarray(tilted_coeffs, dtype=float)
    t = np.zeros(c.size)
    for k in range(c.size - 2, -1, -1):
        t[k] = (c[k + 1] + t[k + 1]) / tilt
    with np.errstate(divide="ignore"):
        return np.log(t) - np.arange(c.size) * math.log(tilt)


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r_squared: float


def _ols(x, y) -> TailFit:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return TailFit(float(slope), float(intercept), r2)


def _survival_of(values, kind, max_k):
    values = np.asarray(values)
    if kind == "pmf":
        return survival_from_pmf(values)
    if kind == "sample":
        return survival_from_sample(values, max_k)
    if kind == "survival":
        return values.astype(float)
    raise DomainError(f"kind must be 'pmf', 'sample' or 'survival', got {kind!r}")


def tail_index_estimate(values, k_min: int, k_max: int, kind: str = "pmf") -> TailFit:
    """Least-squares slope of ``log S(k)`` against ``log k`` on ``[k_min, k_max]``.

    ``values`` is a pmf, a raw sample, or survival values indexed by ``k``, per
    ``kind``. A power tail ``S(k) ~ k**-gamma`` gives slope ``-gamma``.
    """
    if not k_max > k_min >= 1:
        raise DomainError("need k_max > k_min >= 1")
    surv = _survival_of(values, kind, k_max)
    if surv.size <= k_max:
        raise DomainError(f"survival known only up to k={surv.size - 1}")
    k = np.arange(k_min, k_max + 1)
    s = surv[k]
    if np.any(s <= 0):
        raise DomainError("survival function is not positive over the fit range")
    return _ols(np.log(k), np.log(s))


def exponential_tail_fit(values, k_min: int, k_max: int, kind: str = "pmf") -> TailFit:
    """Least-squares slope of ``log S(k)`` against ``k``; ``kind='log_survival'`` is accepted."""
    if not k_max > k_min >= 0:
        raise DomainError("need k_max > k_min >= 0")
    k = np.arange(k_min, k_max + 1)
    if kind == "log_survival":
        y = np.asarray(values, dtype=float)[k]
    else:
        s = _survival_of(values, kind, k_max)[k]
        if np.any(s <= 0):
            raise DomainError("survival function is not positive over the fit range")
        y = np.log(s)
    if not np.all(np.isfinite(y)):
        raise DomainError("log survival is not finite over the fit range")
    return _ols(k.astype(float), y)


def discrete_stable_limit_check(lam, gamma, q, grid=DEFAULT_GRID) -> float:
    """Largest gap between ``limit_pgf_eval`` and the matching ``discrete_stable`` p.g.f."""
    model = limit_as_discrete_stable(lam, gamma, q)
    return max(abs(limit_pgf_eval(lam, gamma, q, z) - pgf_eval(model, z)) for z in grid)
