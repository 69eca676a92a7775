"""Distribution families of the publication/citation toy models.

Every family is a frozen parameter record. :func:`pgf_eval` evaluates the
probability generating function in closed form, and :func:`pmf` extracts
coefficients through :mod:`citetoy.series`. These are two independent
routes, and the tests hold them against each other.

Families
--------
geometric            ``q / (1 - (1-q) z)``
truncated_geometric  geometric restricted to ``k < m``
citation             ``1 - (1-a)(1-z)**p``, one paper
author               geometric number of papers, each cited independently
field                Poisson(``lambda``) number of authors
discrete_stable      ``exp(-lambda * T(z)**gamma)``, ``T(z) = (1-z)/(1-(1-q)z)``
normalizer           Moebius p.g.f. ``Q_u`` with ``T(Q_u(z)) = u T(z)``
elite                ``exp(-lambda * (E_xi[(1-q)(1-z)/(1-(1-q)z)])**gamma)``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np
from scipy import integrate, special

from .errors import CitetoyError, DomainError, NumericalError, ParameterError
from .series import (
    DEFAULT_ORDER,
    PowerSeries,
    as_probabilities,
    geometric_series,
    ps_exp,
    ps_real_pow,
    ps_reciprocal,
)


class MedianNotReachedError(CitetoyError):
    """The truncated pmf carries less than half of the mass."""


def _check(cond, msg):
    if not cond:
        raise ParameterError(msg)


def _prob(name, x, lo_open=False, hi_open=False):
    x = float(x)
    ok = (x > 0.0 if lo_open else x >= 0.0) and (x < 1.0 if hi_open else x <= 1.0)
    _check(ok and math.isfinite(x), f"{name}={x} outside its range")
    return x


# --------------------------------------------------------------------------
# mixing distributions for the per-author acceptance parameter
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Atoms:
    """Finitely many values ``q_i`` with weights ``w_i``."""

    atoms: tuple
    kind: ClassVar[str] = "atoms"

    def __post_init__(self):
        pairs = tuple((float(q), float(w)) for q, w in self.atoms)
        _check(len(pairs) > 0, "atoms must be non-empty")
        for q, w in pairs:
            _check(0.0 < q <= 1.0, f"atom q={q} outside (0, 1]")
            _check(w > 0.0, f"atom weight {w} must be positive")
        total = math.fsum(w for _, w in pairs)
        _check(abs(total - 1.0) <= 1e-9, f"atom weights sum to {total}, not 1")
        object.__setattr__(self, "atoms", tuple((q, w / total) for q, w in pairs))

    @property
    def q(self):
        return np.array([q for q, _ in self.atoms])

    @property
    def w(self):
        return np.array([w for _, w in self.atoms])

    def mean_one_minus_q(self):
        return math.fsum(w * (1.0 - q) for q, w in self.atoms)

    def q_tail_moments(self, order, tilt=1.0):
        """``E[q (1-q)**k] * tilt**k`` for ``k = 0..order``."""
        k = np.arange(order + 1)
        return sum(w * q * ((1.0 - q) * tilt) ** k for q, w in self.atoms)

    def expect(self, f):
        return math.fsum(w * f(q) for q, w in self.atoms)

    def sampler_arrays(self):
        return 0, self.q, np.cumsum(self.w), 1.0, 1.0


@dataclass(frozen=True)
class BetaLike:
    """Density proportional to ``q**(s-1) (1-q)**(b-1)`` on (0, 1).

    Near zero the distribution function behaves like ``A * eps**s``, so ``s``
    controls how many very productive authors there are.
    """

    s: float
    b: float
    kind: ClassVar[str] = "beta"

    def __post_init__(self):
        _check(self.s > 0 and math.isfinite(self.s), f"shape s={self.s} must be positive")
        _check(self.b > 0 and math.isfinite(self.b), f"shape b={self.b} must be positive")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "b", float(self.b))

    def mean_one_minus_q(self):
        return self.b / (self.s + self.b)

    def q_tail_moments(self, order, tilt=1.0):
        k = np.arange(order + 1)
        log_m = special.betaln(self.s + 1.0, self.b + k) - special.betaln(self.s, self.b)
        return np.exp(log_m + k * math.log(tilt))

    def expect(self, f, epsabs=1e-10):
        # algebraic endpoint weights absorb the q**(s-1) singularity exactly
        norm = math.exp(special.betaln(self.s, self.b))
        val, err, info = _quad_alg(f, self.s - 1.0, self.b - 1.0, epsabs * norm)
        return val / norm

    def sampler_arrays(self):
        return 1, np.array([0.5]), np.array([1.0]), self.s, self.b


def _quad_alg(f, alpha, beta, epsabs):
    out = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(alpha, beta),
                         epsabs=epsabs, epsrel=1e-12, limit=200, full_output=1)
    val, err = out[0], out[1]
    if len(out) > 3 and err > 10.0 * epsabs:
        raise NumericalError(f"quadrature did not converge (error {err:.2e}): {out[3]}")
    return val, err, out[2]


MixingDistribution = Union[Atoms, BetaLike]


# --------------------------------------------------------------------------
# parameter records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricParams:
    q: float
    family: ClassVar[str] = "geometric"

    def __post_init__(self):
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))


@dataclass(frozen=True)
class TruncatedGeometricParams:
    q: float
    m: int
    family: ClassVar[str] = "truncated_geometric"

    def __post_init__(self):
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))
        _check(int(self.m) == self.m and self.m >= 1, f"m={self.m} must be a positive integer")
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class CitationParams:
    a: float
    p: float
    family: ClassVar[str] = "citation"

    def __post_init__(self):
        object.__setattr__(self, "a", _prob("a", self.a))
        object.__setattr__(self, "p", _prob("p", self.p, lo_open=True))


@dataclass(frozen=True)
class AuthorModelParams:
    a: float
    p: float
    q: float
    family: ClassVar[str] = "author"

    def __post_init__(self):
        object.__setattr__(self, "a", _prob("a", self.a))
        object.__setattr__(self, "p", _prob("p", self.p, lo_open=True))
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))


@dataclass(frozen=True)
class FieldModelParams:
    lam: float
    a: float
    p: float
    q: float
    family: ClassVar[str] = "field"

    def __post_init__(self):
        _check(self.lam > 0 and math.isfinite(self.lam), f"lambda={self.lam} must be positive")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "a", _prob("a", self.a))
        object.__setattr__(self, "p", _prob("p", self.p, lo_open=True))
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))

    @property
    def author(self):
        return AuthorModelParams(self.a, self.p, self.q)


@dataclass(frozen=True)
class DiscreteStableParams:
    lam: float
    gamma: float
    q: float
    family: ClassVar[str] = "discrete_stable"

    def __post_init__(self):
        _check(self.lam > 0 and math.isfinite(self.lam), f"lambda={self.lam} must be positive")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "gamma", _prob("gamma", self.gamma, lo_open=True))
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))


@dataclass(frozen=True)
class NormalizerParams:
    u: float
    q: float
    family: ClassVar[str] = "normalizer"

    def __post_init__(self):
        object.__setattr__(self, "u", _prob("u", self.u, lo_open=True, hi_open=True))
        object.__setattr__(self, "q", _prob("q", self.q, lo_open=True))


@dataclass(frozen=True)
class EliteModelParams:
    lam: float
    gamma: float
    xi: MixingDistribution = field(default_factory=lambda: Atoms(((0.5, 1.0),)))
    family: ClassVar[str] = "elite"

    def __post_init__(self):
        _check(self.lam > 0 and math.isfinite(self.lam), f"lambda={self.lam} must be positive")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "gamma", _prob("gamma", self.gamma, lo_open=True))
        _check(isinstance(self.xi, (Atoms, BetaLike)), "xi must be Atoms or BetaLike")


ModelSpec = Union[
    GeometricParams, TruncatedGeometricParams, CitationParams, AuthorModelParams,
    FieldModelParams, DiscreteStableParams, NormalizerParams, EliteModelParams,
]

FAMILIES = {
    cls.family: cls
    for cls in (GeometricParams, TruncatedGeometricParams, CitationParams, AuthorModelParams,
                FieldModelParams, DiscreteStableParams, NormalizerParams, EliteModelParams)
}


def mixing_from_dict(d) -> MixingDistribution:
    if not isinstance(d, dict):
        raise ParameterError("xi must be a JSON object")
    kind = d.get("kind", "atoms" if "atoms" in d else "beta")
    if kind == "atoms":
        return Atoms(tuple(tuple(pair) for pair in d["atoms"]))
    if kind == "beta":
        return BetaLike(d["s"], d["b"])
    raise ParameterError(f"unknown mixing kind {kind!r}")


def mixing_to_dict(xi: MixingDistribution) -> dict:
    if isinstance(xi, Atoms):
        return {"kind": "atoms", "atoms": [list(pair) for pair in xi.atoms]}
    return {"kind": "beta", "s": xi.s, "b": xi.b}


def model_from_dict(d: dict) -> ModelSpec:
    """Build a model from its JSON form, e.g. ``{"family": "geometric", "q": 0.5}``."""
    if not isinstance(d, dict) or "family" not in d:
        raise ParameterError("model must be a JSON object with a 'family' key")
    cls = FAMILIES.get(d["family"])
    if cls is None:
        raise ParameterError(f"unknown family {d['family']!r}; expected one of {sorted(FAMILIES)}")
    kwargs = {}
    for k, v in d.items():
        if k == "family":
            continue
        if k == "lambda":
            k = "lam"
        if k == "xi":
            v = mixing_from_dict(v)
        kwargs[k] = v
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for {d['family']}: {exc}") from None


def model_to_dict(model: ModelSpec) -> dict:
    out = {"family": model.family}
    for name in model.__dataclass_fields__:
        v = getattr(model, name)
        if name == "xi":
            v = mixing_to_dict(v)
        out["lambda" if name == "lam" else name] = v
    return out


# --------------------------------------------------------------------------
# p.g.f. evaluation
# --------------------------------------------------------------------------

def _one_minus_geometric(q, z):
    return (1.0 - q) * (1.0 - z) / (1.0 - (1.0 - q) * z)


def _one_minus_author(m: AuthorModelParams, z):
    one_minus_c = (1.0 - m.a) * (1.0 - z) ** m.p
    c = 1.0 - one_minus_c
    return (1.0 - m.q) * one_minus_c / (1.0 - (1.0 - m.q) * c)


def stability_transform(params: NormalizerParams, z: float) -> float:
    """Normalizing p.g.f. ``Q_u(z)``."""
    u, q = params.u, params.q
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    den = 1.0 - u * (1.0 - q) - (1.0 - q) * (1.0 - u) * z
    if den <= 0.0:
        raise NumericalError("normalizer denominator is not positive")
    if z == 1.0:
        return 1.0
    return ((1.0 - u) + (u + q - 1.0) * z) / den


def elite_inner(xi: MixingDistribution, z: float) -> float:
    """``E_xi[(1-q)(1-z)/(1-(1-q)z)]``, exact for atoms, quadrature for BetaLike."""
    return xi.expect(lambda q: _one_minus_geometric(q, z))


def pgf_eval(model: ModelSpec, z: float) -> float:
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if z == 1.0:
        return 1.0
    fam = model.family
    if fam == "geometric":
        return model.q / (1.0 - (1.0 - model.q) * z)
    if fam == "truncated_geometric":
        r = 1.0 - model.q
        return model.q * (1.0 - r ** model.m * z ** model.m) / ((1.0 - r ** model.m) * (1.0 - r * z))
    if fam == "citation":
        return 1.0 - (1.0 - model.a) * (1.0 - z) ** model.p
    if fam == "author":
        return 1.0 - _one_minus_author(model, z)
    if fam == "field":
        return math.exp(-model.lam * _one_minus_author(model.author, z))
    if fam == "discrete_stable":
        t = (1.0 - z) / (1.0 - (1.0 - model.q) * z)
        return math.exp(-model.lam * t ** model.gamma)
    if fam == "normalizer":
        return stability_transform(model, z)
    if fam == "elite":
        return math.exp(-model.lam * elite_inner(model.xi, z) ** model.gamma)
    raise ParameterError(f"unknown family {fam!r}")


# --------------------------------------------------------------------------
# series construction and pmf extraction
# --------------------------------------------------------------------------

def _one_minus_geometric_series(q, order, tilt):
    k = np.arange(order + 1)
    c = -q * ((1.0 - q) * tilt) ** k
    c[0] = 1.0 - q
    return PowerSeries(c)


def _citation_series(a, p, order, tilt):
    base = np.zeros(order + 1)
    base[0] = 1.0
    if order >= 1:
        base[1] = -tilt
    c = ps_real_pow(PowerSeries(base), p).scale(-(1.0 - a))
    return c.shift(1.0)


def _author_series(m: AuthorModelParams, order, tilt):
    if m.q == 1.0:
        return PowerSeries.constant(1.0, order)
    c = _citation_series(m.a, m.p, order, tilt)
    den = c.scale(-(1.0 - m.q)).shift(1.0)
    return ps_reciprocal(den).scale(m.q)


def pgf_series(model: ModelSpec, order: int = DEFAULT_ORDER, tilt: float = 1.0) -> PowerSeries:
    """Power series of ``P(tilt * z)``.

    ``tilt > 1`` rescales light tails whose coefficients would underflow;
    coefficient ``k`` of the result is ``tilt**k`` times the probability of ``k``.
    """
    if order < 0:
        raise DomainError("order must be non-negative")
    if not tilt > 0:
        raise DomainError("tilt must be positive")
    fam = model.family
    k = np.arange(order + 1)
    if fam == "geometric":
        return geometric_series(model.q, order, tilt)
    if fam == "truncated_geometric":
        probs = np.array([truncated_geometric_pmf(model, i) for i in range(order + 1)])
        return PowerSeries(probs * tilt ** k)
    if fam == "citation":
        return _citation_series(model.a, model.p, order, tilt)
    if fam == "author":
        return _author_series(model, order, tilt)
    if fam == "field":
        author = _author_series(model.author, order, tilt)
        return ps_exp(author.shift(-1.0).scale(model.lam))
    if fam == "discrete_stable":
        q = model.q
        t = -q * tilt * ((1.0 - q) * tilt) ** np.maximum(k - 1, 0)
        t[0] = 1.0
        return ps_exp(ps_real_pow(PowerSeries(t), model.gamma).scale(-model.lam))
    if fam == "normalizer":
        return PowerSeries(normalizer_pmf(model, order) * tilt ** k)
    if fam == "elite":
        xi = model.xi
        c0 = xi.mean_one_minus_q()
        if c0 <= 0.0:
            return PowerSeries.constant(1.0, order)
        inner = -xi.q_tail_moments(order, tilt)
        inner[0] = c0
        return ps_exp(ps_real_pow(PowerSeries(inner), model.gamma).scale(-model.lam))
    raise ParameterError(f"unknown family {fam!r}")


def pmf(model: ModelSpec, max_k: int) -> np.ndarray:
    """Probabilities of ``0..max_k`` events."""
    if max_k < 0:
        raise DomainError("max_k must be non-negative")
    if max_k > 1 << 16:
        raise DomainError(f"max_k={max_k} exceeds the series capacity of 65536")
    return as_probabilities(pgf_series(model, max_k))


def log_pmf(model: ModelSpec, max_k: int, tilt: float = 1.0) -> np.ndarray:
    """Natural log of the pmf, computed on the tilted series to dodge underflow."""
    c = pgf_series(model, max_k, tilt).coeffs
    with np.errstate(divide="ignore"):
        return np.log(np.maximum(c, 0.0)) - np.arange(max_k + 1) * math.log(tilt)


def citation_pmf_closed_form(params: CitationParams, k: int) -> float:
    """P(k) = a for k = 0, else (1-a) (p/k) prod_{j<k} (1 - p/j)."""
    if k < 0:
        raise DomainError("k must be non-negative")
    if k == 0:
        return params.a
    prod = 1.0
    for j in range(1, k):
        prod *= 1.0 - params.p / j
    return (1.0 - params.a) * params.p / k * prod


def truncated_geometric_pmf(params: TruncatedGeometricParams, k: int) -> float:
    if k < 0:
        raise DomainError("k must be non-negative")
    if k >= params.m:
        return 0.0
    r = 1.0 - params.q
    return params.q * r ** k / (1.0 - r ** params.m)


def normalizer_pmf(params: NormalizerParams, max_k: int) -> np.ndarray:
    # (A + Bz)/(C - Dz); numerator of the k >= 1 terms simplifies to u q**2
    u, q = params.u, params.q
    c = 1.0 - u * (1.0 - q)
    d = (1.0 - q) * (1.0 - u)
    k = np.arange(1, max_k + 1)
    out = np.empty(max_k + 1)
    out[0] = (1.0 - u) / c
    out[1:] = u * q * q * (d / c) ** (k - 1) / (c * c)
    return out


# --------------------------------------------------------------------------
# moments and summaries
# --------------------------------------------------------------------------

def factorial_moment(xi: MixingDistribution, k: int) -> float:
    """``Q^(k)(1) = k! E[((1-q)/q)**k]`` for the mixed geometric; ``inf`` if divergent."""
    if k < 1:
        raise DomainError("k must be at least 1")
    if isinstance(xi, Atoms):
        return math.factorial(k) * xi.expect(lambda q: ((1.0 - q) / q) ** k)
    if k >= xi.s:
        return math.inf
    log_v = special.betaln(xi.s - k, xi.b + k) - special.betaln(xi.s, xi.b)
    return math.factorial(k) * math.exp(log_v)


def partial_factorial_moments(xi: BetaLike, k: int, eps=tuple(10.0 ** -e for e in range(2, 9))):
    """``k! * integral over [eps, 1]`` of the moment integrand, per cut-off."""
    norm = math.exp(special.betaln(xi.s, xi.b))
    out = []
    for e in eps:
        def f(q):
            return ((1.0 - q) / q) ** k * q ** (xi.s - 1.0) * (1.0 - q) ** (xi.b - 1.0)
        # split at decades so the near-singular left end is resolved
        edges = sorted({e, *[x for x in (1e-6, 1e-4, 1e-2, 0.5) if x > e], 1.0})
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)[0]
        out.append(math.factorial(k) * total / norm)
    return np.array(out)


def moment_diverges(xi: BetaLike, k: int) -> bool:
    """Numerical divergence flag: growth by more than 2x over the last two decades of cut-off."""
    parts = partial_factorial_moments(xi, k)
    return bool(parts[-1] > 2.0 * parts[-3])


@dataclass(frozen=True)
class SummaryStats:
    mode: int
    median: int
    checkpoints: tuple
    partial_mean: tuple


def summary_stats(model: ModelSpec, max_k: int) -> SummaryStats:
    probs = pmf(model, max_k)
    cdf = np.cumsum(probs)
    if cdf[-1] < 0.5:
        raise MedianNotReachedError(f"median not reached: mass up to {max_k} is {cdf[-1]:.4f}")
    mode = int(np.argmax(probs))
    median = int(np.searchsorted(cdf, 0.5, side="left"))
    checkpoints = tuple(c for c in (10, 100, 1000) if c < max_k) + (max_k,)
    weighted = np.arange(max_k + 1) * probs
    partial = tuple(math.fsum(weighted[: c + 1]) for c in checkpoints)
    return SummaryStats(mode, median, checkpoints, partial)
