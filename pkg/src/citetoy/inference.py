"""Diagnostics and fits for publication-count data.

Publication counts here are non-zero, so the geometric model is used in its
zero-truncated form ``P(k) = q (1-q)**(k-1)`` for ``k >= 1``. The Elite
alternative mixes ``q`` over a two-shape beta law,
``P(k) = B(s+1, b+k-1) / B(s, b)``.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import optimize, special

from .errors import FitError, InsufficientDataError, ParameterError
from .models import BetaLike
from .sampler import RngState, sample_publications


@dataclass(frozen=True)
class Dataset:
    name: str
    counts: tuple
    source: str = ""

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise InsufficientDataError(f"dataset {self.name!r} is empty")
        if min(counts) < 1:
            raise ParameterError(f"dataset {self.name!r} holds counts below 1")
        object.__setattr__(self, "counts", counts)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    def __len__(self):
        return len(self.counts)


_RG = "researchgate.net, retrieved 2017-05-20"

_EMBEDDED = (
    Dataset("ex1", (130, 4, 27, 9, 12, 36, 32, 19, 129, 1, 167, 278, 41, 46, 26, 25, 19, 12, 7, 11, 6, 2),
            f"Dept. of Probability and Mathematical Statistics, Charles University; {_RG}"),
    Dataset("ex2", (25, 76, 173, 2, 10, 9, 4, 13, 23),
            f"Dept. of Probability and Mathematical Statistics, Saint-Petersburg State University; {_RG}"),
    Dataset("ex3", (25, 18, 50, 3, 2, 83, 60, 5, 37, 28, 14, 53, 51, 19, 47, 2, 37),
            f"Dept. of Mathematical Analysis, Charles University; {_RG}"),
    Dataset("ex4", (31, 93, 7, 1, 25, 14, 9, 43, 23, 25),
            f"Dept. of Algebra, Charles University; {_RG}"),
)

# straight-line fit cut-offs used for each department's plot
DEFAULT_THRESHOLDS = {"ex1": 50, "ex2": 30, "ex3": 50, "ex4": 25}


def embedded_datasets() -> tuple:
    return _EMBEDDED


def get_dataset(name: str) -> Dataset:
    for d in _EMBEDDED:
        if d.name == name:
            return d
    raise ParameterError(f"no embedded dataset {name!r}; choose from ex1..ex4")


def parse_counts(text: str, name: str = "data") -> Dataset:
    """One positive integer per row; first column of CSV rows; an optional header row."""
    counts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not row[0].strip():
            continue
        cell = row[0].strip()
        try:
            value = int(cell)
        except ValueError:
            try:
                value = float(cell)
            except ValueError:
                if lineno == 1 and not counts:
                    continue  # header
                raise ParameterError(f"line {lineno}: {cell!r} is not an integer") from None
            if value != int(value):
                raise ParameterError(f"line {lineno}: {cell!r} is not an integer") from None
            value = int(value)
        counts.append(value)
    return Dataset(name, tuple(counts), "file")


def load_dataset(source: str) -> Dataset:
    """An embedded name (``ex1``..``ex4``) or a path to a text/CSV file."""
    if source in DEFAULT_THRESHOLDS:
        return get_dataset(source)
    path = Path(source)
    if not path.exists():
        raise ParameterError(f"{source!r} is neither an embedded dataset nor a file")
    d = parse_counts(path.read_text(), name=path.stem)
    return replace(d, source=str(path))


# --------------------------------------------------------------------------
# empirical distribution and -log survival
# --------------------------------------------------------------------------

def ecdf(data: Dataset, x: float) -> float:
    arr = data.array
    return float(np.count_nonzero(arr <= x)) / arr.size


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float
    x_threshold: float

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept


@dataclass(frozen=True)
class SurvivalCurve:
    points: tuple
    fit: LinearFit | None = None

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)


def neg_log_survival(data: Dataset) -> SurvivalCurve:
    """``(x, -log(1 - F(x)))`` at every distinct value except the maximum."""
    arr = np.sort(data.array)
    values = np.unique(arr)
    if values.size < 2:
        raise InsufficientDataError("need at least two distinct values")
    n = arr.size
    points = []
    for v in values[:-1]:
        above = n - int(np.searchsorted(arr, v, side="right"))
        points.append((int(v), -math.log(above / n)))
    return SurvivalCurve(tuple(points))


def linear_fit(curve: SurvivalCurve, x_threshold: float) -> LinearFit:
    """OLS line through the curve points with ``x <= x_threshold``."""
    x, y = curve.x, curve.y
    keep = x <= x_threshold
    if keep.sum() < 3:
        raise InsufficientDataError(f"only {int(keep.sum())} points at or below {x_threshold}")
    x, y = x[keep], y[keep]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2, x_threshold)


def fitted_curve(data: Dataset, x_threshold: float) -> SurvivalCurve:
    curve = neg_log_survival(data)
    return replace(curve, fit=linear_fit(curve, x_threshold))


# --------------------------------------------------------------------------
# zero-truncated geometric and its beta mixture
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricFit:
    q_hat: float
    log_likelihood: float


def _histogram(data):
    arr = data.array if isinstance(data, Dataset) else np.asarray(data, dtype=np.int64)
    values, counts = np.unique(arr, return_counts=True)
    return values.astype(float), counts.astype(float)


def _geometric_loglik(q, values, counts):
    n = counts.sum()
    excess = float(np.dot(values - 1.0, counts))
    ll = n * math.log(q)
    if excess > 0:
        ll += excess * math.log1p(-q)
    return ll


def geometric_mle(data) -> GeometricFit:
    """``q_hat = 1 / mean`` for counts on ``k >= 1``."""
    values, counts = _histogram(data)
    q_hat = counts.sum() / float(np.dot(values, counts))
    return GeometricFit(q_hat, _geometric_loglik(q_hat, values, counts))


def _beta_geometric_loglik(theta, values, counts):
    s, b = np.exp(np.clip(theta, -12.0, 25.0))
    terms = special.betaln(s + 1.0, b + values - 1.0) - special.betaln(s, b)
    return float(np.dot(terms, counts))


@dataclass(frozen=True)
class MixtureFit:
    xi: BetaLike
    log_likelihood: float
    restarts: tuple


def _restart_grid(q_hat):
    # nine (mean, concentration) starts plus a near-degenerate one at the null fit
    means = (q_hat / 2.0, q_hat, (1.0 + q_hat) / 2.0)
    grid = [(m, kappa) for m in means for kappa in (1.0, 10.0, 100.0)]
    grid.append((q_hat, 1e7))
    return [(math.log(m * kappa), math.log((1.0 - m) * kappa)) for m, kappa in grid]


def fit_beta_mixture(data, q_hat=None) -> MixtureFit:
    values, counts = _histogram(data)
    if q_hat is None:
        q_hat = counts.sum() / float(np.dot(values, counts))
    q_hat = min(q_hat, 1.0 - 1e-9)

    def objective(theta):
        v = -_beta_geometric_loglik(theta, values, counts)
        return v if math.isfinite(v) else 1e300

    # coarse simplex search from every start, then a tight polish of the winner;
    # along the Equality ridge (s, b -> inf at fixed mean) the likelihood is
    # flat, and tight tolerances from all ten starts would mostly crawl along it
    best, diag = None, []
    for start in _restart_grid(q_hat):
        res = optimize.minimize(objective, np.array(start), method="Nelder-Mead",
                                options={"xatol": 1e-3, "fatol": 1e-6, "maxiter": 200})
        diag.append({"start": start, "success": bool(res.success), "fun": float(res.fun),
                     "nit": int(res.nit)})
        if res.fun < 1e300 and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise FitError("beta-mixture fit failed from every restart", diag)
    polished = optimize.minimize(objective, best.x, method="Nelder-Mead",
                                 options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 2000})
    diag.append({"start": tuple(best.x), "success": bool(polished.success),
                 "fun": float(polished.fun), "nit": int(polished.nit)})
    if polished.fun <= best.fun:
        best = polished
    s, b = np.exp(np.clip(best.x, -12.0, 25.0))
    return MixtureFit(BetaLike(float(s), float(b)), -float(best.fun), tuple(diag))


def _lr(data):
    null = geometric_mle(data)
    if null.q_hat >= 1.0:
        return 0.0, null, None
    alt = fit_beta_mixture(data, null.q_hat)
    # nested models: a deficit below roundoff is the optimiser sitting at the boundary
    return max(2.0 * (alt.log_likelihood - null.log_likelihood), 0.0), null, alt


@dataclass(frozen=True)
class EliteTestResult:
    lr_statistic: float
    p_value: float
    elite_fit: BetaLike | None
    null_q: float
    bootstrap_lr: tuple


def equality_vs_elite_test(data, bootstrap_reps: int, rng: RngState, workers: int = 1) -> EliteTestResult:
    """Likelihood-ratio test of a degenerate ``q`` (Equality) against a beta-mixed ``q`` (Elite).

    The p-value comes from a parametric bootstrap under the fitted null, with both
    models refit on every replicate, using ``(r + 1) / (B + 1)``.
    """
    if bootstrap_reps < 99:
        raise ParameterError("bootstrap_reps must be at least 99")
    values = data.array if isinstance(data, Dataset) else np.asarray(data, dtype=np.int64)
    lr_obs, null, alt = _lr(values)
    if alt is None:
        return EliteTestResult(0.0, 1.0, None, null.q_hat, ())
    n = values.size

    def replicate(r):
        sim = sample_publications(null.q_hat, rng.spawn(r), n).values
        return _lr(sim)[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            boot = list(pool.map(replicate, range(bootstrap_reps)))
    else:
        boot = [replicate(r) for r in range(bootstrap_reps)]
    exceed = sum(1 for v in boot if v >= lr_obs)
    p = (exceed + 1) / (bootstrap_reps + 1)
    return EliteTestResult(lr_obs, p, alt.xi, null.q_hat, tuple(boot))
