"""Truncated formal power series over the reals.

A :class:`PowerSeries` of order ``N`` stores the coefficients of
``z**0 .. z**N``. Binary operations truncate to the smaller order. The
quadratic-cost recurrences live in :mod:`citetoy.kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NumericalError

DEFAULT_ORDER = 4096
ROUNDOFF = 1e-12


@dataclass(frozen=True, eq=False)
class PowerSeries:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if c.size == 0:
            raise ValueError("a power series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise NumericalError("power series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self.coeffs[:6])
        tail = ", ..." if self.coeffs.size > 6 else ""
        return f"PowerSeries(order={self.order}, [{head}{tail}])"

    @classmethod
    def constant(cls, c: float, order: int) -> "PowerSeries":
        out = np.zeros(order + 1)
        out[0] = c
        return cls(out)

    @classmethod
    def identity(cls, order: int) -> "PowerSeries":
        out = np.zeros(order + 1)
        if order >= 1:
            out[1] = 1.0
        return cls(out)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1])

    def scale(self, c: float) -> "PowerSeries":
        return PowerSeries(c * self.coeffs)

    def shift(self, c: float) -> "PowerSeries":
        """Add ``c`` to the constant term."""
        out = self.coeffs.copy()
        out[0] += c
        return PowerSeries(out)

    def evaluate(self, z: float) -> float:
        """Horner evaluation of the truncated polynomial."""
        return float(np.polynomial.polynomial.polyval(z, self.coeffs))

    def __add__(self, other):
        return ps_add(self, other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return ps_mul(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return ps_add(self, -other)


def _common(a: PowerSeries, b: PowerSeries):
    n = min(a.coeffs.size, b.coeffs.size)
    return a.coeffs[:n], b.coeffs[:n]


def ps_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    x, y = _common(a, b)
    return PowerSeries(x + y)


def ps_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product, truncated at the smaller order."""
    x, y = _common(a, b)
    return PowerSeries(kernels.cauchy(np.ascontiguousarray(x), np.ascontiguousarray(y)))


def ps_exp(a: PowerSeries) -> PowerSeries:
    if a.coeffs[0] > 709.0:
        raise NumericalError(f"exp of constant term {a.coeffs[0]:g} overflows")
    return PowerSeries(kernels.series_exp(a.coeffs))


def ps_log(a: PowerSeries) -> PowerSeries:
    if not a.coeffs[0] > 0.0:
        raise DomainError("log needs a positive constant term")
    return PowerSeries(kernels.series_log(a.coeffs))


def ps_real_pow(a: PowerSeries, alpha: float) -> PowerSeries:
    """``a(z)**alpha`` for real ``alpha``; equals ``exp(alpha * log(a))``."""
    if not a.coeffs[0] > 0.0:
        raise DomainError("real power needs a positive constant term")
    if alpha == 0.0:
        return PowerSeries.constant(1.0, a.order)
    return PowerSeries(kernels.series_pow(a.coeffs, float(alpha)))


def ps_reciprocal(a: PowerSeries) -> PowerSeries:
    if a.coeffs[0] == 0.0:
        raise DomainError("reciprocal needs a nonzero constant term")
    return PowerSeries(kernels.series_reciprocal(a.coeffs))


def geometric_series(q: float, order: int, tilt: float = 1.0) -> PowerSeries:
    """Expansion of ``q / (1 - (1-q) z)``, optionally evaluated at ``tilt * z``."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    k = np.arange(order + 1)
    return PowerSeries(q * ((1.0 - q) * tilt) ** k)


def ps_compose_geometric(outer: PowerSeries, q: float) -> PowerSeries:
    """Coefficients of ``outer(Q(z))`` with ``Q(z) = q / (1 - (1-q) z)``.

    Horner scheme over the coefficients of ``outer``. Because ``Q(0) = q`` is
    not zero, the result is exact only when ``outer`` is a polynomial of
    degree at most its order; a truncated infinite series gives the
    composition of the truncation.
    """
    g = geometric_series(q, outer.order)
    nz = np.flatnonzero(outer.coeffs)
    if nz.size == 0:
        return PowerSeries(np.zeros(outer.order + 1))
    acc = PowerSeries.constant(outer.coeffs[nz[-1]], outer.order)
    for j in range(nz[-1] - 1, -1, -1):
        acc = ps_mul(acc, g).shift(outer.coeffs[j])
    return acc


def as_probabilities(series: PowerSeries | np.ndarray, tol: float = ROUNDOFF) -> np.ndarray:
    """Coefficients as a pmf: roundoff negatives clamp to zero, larger ones raise."""
    c = np.array(series.coeffs if isinstance(series, PowerSeries) else series, dtype=float)
    worst = c.min()
    if worst < -tol:
        k = int(c.argmin())
        raise NumericalError(f"coefficient {k} is {worst:.3e}, below -{tol:g}")
    np.maximum(c, 0.0, out=c)
    return c
