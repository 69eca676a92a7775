"""Pure-NumPy twins of the ``_kernels_numba`` functions.

Samplers are vectorised over draws; every draw walks the same counter
sequence as its scalar numba counterpart, so both backends agree draw for
draw up to last-ulp differences in ``log``.
"""
import math

import numpy as np

CAP = 10_000_000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0
_FLAT_BATCH = 1 << 21


# --------------------------------------------------------------------------
# power-series recurrences; math.fsum gives correctly rounded sums
# --------------------------------------------------------------------------

def cauchy(a, b):
    n = min(a.shape[0], b.shape[0])
    a = a[:n]
    b = b[:n]
    return np.array([math.fsum(a[: k + 1] * b[k::-1]) for k in range(n)])


def series_exp(a):
    n = a.shape[0]
    out = np.empty(n)
    out[0] = math.exp(a[0])
    ja = np.arange(n) * a
    for k in range(1, n):
        out[k] = math.fsum(ja[1 : k + 1] * out[k - 1 :: -1][:k]) / k
    return out


def series_log(a):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = math.log(a0)
    jb = np.zeros(n)
    for k in range(1, n):
        s = math.fsum(jb[1:k] * a[k - 1 : 0 : -1]) if k > 1 else 0.0
        out[k] = (a[k] - s / k) / a0
        jb[k] = k * out[k]
    return out


def series_pow(a, alpha):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = a0 ** alpha
    j = np.arange(n, dtype=float)
    for k in range(1, n):
        w = ((alpha + 1.0) * j[1 : k + 1] - k) * a[1 : k + 1]
        out[k] = math.fsum(w * out[k - 1 :: -1][:k]) / (k * a0)
    return out


def series_reciprocal(a):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = 1.0 / a0
    for k in range(1, n):
        out[k] = -math.fsum(a[1 : k + 1] * out[k - 1 :: -1][:k]) / a0
    return out


# --------------------------------------------------------------------------
# counter-based RNG on uint64 arrays
# --------------------------------------------------------------------------

def mix64(x):
    # uint64 wraparound is the point; 0-d inputs would otherwise warn
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def derive(keys, i):
    i = np.asarray(i).astype(np.uint64)
    return mix64(np.asarray(keys, dtype=np.uint64) ^ mix64(i))


def uniform(keys, ctr):
    return ((derive(keys, ctr) >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def derive_many(root, start, n):
    return derive(np.uint64(root), np.arange(start, start + n, dtype=np.int64))


def _flatten(counts):
    """Owner index and 1-based position for every child of every parent."""
    counts = np.asarray(counts, dtype=np.int64)
    owner = np.repeat(np.arange(counts.size), counts)
    starts = np.cumsum(counts) - counts
    pos = np.arange(owner.size, dtype=np.int64) - starts[owner] + 1
    return owner, pos


def _sum_by_owner(owner, values, n):
    return np.bincount(owner, weights=values, minlength=n).astype(np.int64)


# --------------------------------------------------------------------------
# vectorised samplers; each returns (values, total capped sub-draws)
# --------------------------------------------------------------------------

def geometric_vec(keys, q):
    n = keys.shape[0]
    q = np.broadcast_to(np.asarray(q, dtype=float), (n,))
    out = np.full(n, CAP, dtype=np.int64)
    idx = np.arange(n)
    t = 0
    while idx.size and t < CAP:
        # trials t .. t+width-1 at once; width grows as the active set shrinks
        width = int(min(CAP - t, max(1, _FLAT_BATCH // idx.size), 4096))
        ctrs = np.arange(t, t + width, dtype=np.int64)
        hit = uniform(keys[idx, None], ctrs[None, :]) < q[idx, None]
        any_hit = hit.any(axis=1)
        out[idx[any_hit]] = t + hit[any_hit].argmax(axis=1)
        idx = idx[~any_hit]
        t += width
    return out, int(idx.size)


def citations_vec(keys, a, p):
    n = keys.shape[0]
    out = np.zeros(n, dtype=np.int64)
    idx = np.flatnonzero(~(uniform(keys, 0) < a))
    holding = np.ones(idx.size, dtype=np.int64)
    ctr = 1
    over = 0
    while idx.size:
        h = p / holding
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.where(h >= 1.0, 0.0,
                           np.floor(np.log(uniform(keys[idx], ctr)) / np.log1p(-h)))
        ctr += 1
        capped = holding + gap >= CAP
        if capped.any():
            out[idx[capped]] = CAP
            over += int(capped.sum())
            keep = ~capped
            idx, holding, gap = idx[keep], holding[keep], gap[keep]
        j = holding + gap.astype(np.int64)
        accept = uniform(keys[idx], ctr) * j < holding
        ctr += 1
        out[idx[accept]] = j[accept]
        idx = idx[~accept]
        holding = j[~accept] + 1
    return out, over


def poisson_vec(keys, lam):
    n = keys.shape[0]
    out = np.zeros(n, dtype=np.int64)
    total = np.zeros(n)
    idx = np.arange(n)
    m = 0
    while idx.size:
        total[idx] -= np.log(uniform(keys[idx], m))
        done = total[idx] > lam
        out[idx[done]] = m
        idx = idx[~done]
        m += 1
    return out


def author_vec(keys, a, p, q):
    n = keys.shape[0]
    papers, over = geometric_vec(derive(keys, 0), q)
    owner, pos = _flatten(papers)
    cites, o = citations_vec(derive(keys[owner], pos), a, p)
    return _sum_by_owner(owner, cites, n), over + o


def field_vec(keys, lam, a, p, q):
    n = keys.shape[0]
    authors = poisson_vec(derive(keys, 0), lam)
    owner, pos = _flatten(authors)
    totals, over = author_vec(derive(keys[owner], pos), a, p, q)
    return _sum_by_owner(owner, totals, n), over


def std_normal(keys, ctr):
    u1 = uniform(keys, ctr)
    u2 = uniform(keys, ctr + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def gamma_vec(keys, shape):
    n = keys.shape[0]
    boost = np.ones(n)
    alpha = shape
    if shape < 1.0:
        boost = uniform(keys, 0) ** (1.0 / shape)
        alpha = shape + 1.0
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    idx = np.arange(n)
    ctr = 1
    while idx.size:
        sub = keys[idx]
        x = std_normal(sub, ctr)
        u = uniform(sub, ctr + 2)
        ctr += 3
        v = 1.0 + c * x
        ok = v > 0.0
        v = v * v * v
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * np.log(v))
        out[idx[accept]] = d * v[accept] * boost[idx[accept]]
        idx = idx[~accept]
    return out


def mixing_vec(keys, kind, atom_q, atom_cw, s, b):
    if kind == 0:
        u = uniform(keys, 0)
        pick = np.minimum(np.searchsorted(atom_cw, u, side="right"), atom_cw.size - 1)
        return atom_q[pick]
    x = gamma_vec(derive(keys, 1), s)
    y = gamma_vec(derive(keys, 2), b)
    return x / (x + y)


def elite_author_vec(keys, gamma, kind, atom_q, atom_cw, s, b):
    n = keys.shape[0]
    units, over = citations_vec(derive(keys, 0), 0.0, gamma)
    totals = np.zeros(n, dtype=np.int64)
    ends = np.cumsum(units)
    starts = ends - units
    n_units = int(ends[-1]) if n else 0
    for lo in range(0, n_units, _FLAT_BATCH):
        flat = np.arange(lo, min(lo + _FLAT_BATCH, n_units), dtype=np.int64)
        owner = np.searchsorted(ends, flat, side="right")
        pos = flat - starts[owner] + 1
        uk = derive(keys[owner], pos)
        qi = mixing_vec(derive(uk, 0), kind, atom_q, atom_cw, s, b)
        g, o = geometric_vec(derive(uk, 1), qi)
        totals += _sum_by_owner(owner, g, n)
        over += o
    return totals, over


# --------------------------------------------------------------------------
# bulk drivers, same signatures as the numba versions
# --------------------------------------------------------------------------

def bulk_geometric(root, start, n, q):
    return geometric_vec(derive_many(root, start, n), q)


def bulk_citations(root, start, n, a, p):
    return citations_vec(derive_many(root, start, n), a, p)


def bulk_author(root, start, n, a, p, q):
    return author_vec(derive_many(root, start, n), a, p, q)


def bulk_field(root, start, n, lam, a, p, q):
    return field_vec(derive_many(root, start, n), lam, a, p, q)


def bulk_elite(root, start, n, lam, gamma, kind, atom_q, atom_cw, s, b):
    keys = derive_many(root, start, n)
    authors = poisson_vec(derive(keys, 0), lam)
    owner, pos = _flatten(authors)
    totals, over = elite_author_vec(derive(keys[owner], pos), gamma, kind, atom_q, atom_cw, s, b)
    return _sum_by_owner(owner, totals, n), over


def bulk_mixed_truncated_geometric(root, start, n, kind, atom_q, atom_cw, s, b):
    keys = derive_many(root, start, n)
    qi = mixing_vec(derive(keys, 0), kind, atom_q, atom_cw, s, b)
    g, over = geometric_vec(derive(keys, 1), qi)
    return g + 1, over
