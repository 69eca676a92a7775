"""Numba kernels. Every function here has a twin in ``_kernels_numpy``.

Random numbers come from a counter-based SplitMix64 hash, so draw ``i`` of a
stream depends only on ``(key, i)`` and never on chunking or thread layout.
"""
import math

import numpy as np
from numba import njit

CAP = 10_000_000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


# --------------------------------------------------------------------------
# power-series recurrences (Neumaier-compensated accumulation)
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def cauchy(a, b):
    n = min(a.shape[0], b.shape[0])
    out = np.empty(n)
    for k in range(n):
        s = 0.0
        c = 0.0
        for j in range(k + 1):
            x = a[j] * b[k - j]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        out[k] = s + c
    return out


@njit(cache=True, nogil=True)
def series_exp(a):
    n = a.shape[0]
    out = np.empty(n)
    out[0] = math.exp(a[0])
    for k in range(1, n):
        s = 0.0
        c = 0.0
        for j in range(1, k + 1):
            x = j * a[j] * out[k - j]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        out[k] = (s + c) / k
    return out


@njit(cache=True, nogil=True)
def series_log(a):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = math.log(a0)
    for k in range(1, n):
        s = 0.0
        c = 0.0
        for j in range(1, k):
            x = j * out[j] * a[k - j]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        out[k] = (a[k] - (s + c) / k) / a0
    return out


@njit(cache=True, nogil=True)
def series_pow(a, alpha):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = a0 ** alpha
    for k in range(1, n):
        s = 0.0
        c = 0.0
        for j in range(1, k + 1):
            x = ((alpha + 1.0) * j - k) * a[j] * out[k - j]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        out[k] = (s + c) / (k * a0)
    return out


@njit(cache=True, nogil=True)
def series_reciprocal(a):
    n = a.shape[0]
    out = np.empty(n)
    a0 = a[0]
    out[0] = 1.0 / a0
    for k in range(1, n):
        s = 0.0
        c = 0.0
        for j in range(1, k + 1):
            x = a[j] * out[k - j]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        out[k] = -(s + c) / a0
    return out


# --------------------------------------------------------------------------
# counter-based RNG
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True, inline="always")
def mix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True, inline="always")
def derive(key, i):
    return mix64(key ^ mix64(np.uint64(i)))


@njit(cache=True, nogil=True, inline="always")
def uniform(key, ctr):
    # open interval (0, 1)
    return (float(derive(key, ctr) >> _S11) + 0.5) * _INV53


# --------------------------------------------------------------------------
# scalar samplers; each returns (value, number of capped sub-draws)
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def geometric_one(key, q):
    t = 0
    while t < CAP:
        if uniform(key, t) < q:
            return t, 0
        t += 1
    return CAP, 1


@njit(cache=True, nogil=True)
def citations_one(key, a, p):
    if uniform(key, 0) < a:
        return 0, 0
    holding = 1
    ctr = 1
    while True:
        h = p / holding
        if h >= 1.0:
            gap = 0.0
        else:
            gap = np.floor(math.log(uniform(key, ctr)) / math.log1p(-h))
        ctr += 1
        if holding + gap >= CAP:
            return CAP, 1
        j = holding + int(gap)
        accept = uniform(key, ctr) * j < holding
        ctr += 1
        if accept:
            return j, 0
        holding = j + 1


@njit(cache=True, nogil=True)
def poisson_one(key, lam):
    total = 0.0
    m = 0
    while True:
        total -= math.log(uniform(key, m))
        if total > lam:
            return m
        m += 1


@njit(cache=True, nogil=True)
def author_one(key, a, p, q):
    n, over = geometric_one(derive(key, 0), q)
    total = 0
    for j in range(1, n + 1):
        c, o = citations_one(derive(key, j), a, p)
        total += c
        over += o
    return total, over


@njit(cache=True, nogil=True)
def std_normal(key, ctr):
    u1 = uniform(key, ctr)
    u2 = uniform(key, ctr + 1)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@njit(cache=True, nogil=True)
def gamma_one(key, shape):
    # Marsaglia-Tsang; shapes below one boosted by U**(1/shape)
    boost = 1.0
    alpha = shape
    if shape < 1.0:
        boost = uniform(key, 0) ** (1.0 / shape)
        alpha = shape + 1.0
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    ctr = 1
    while True:
        x = std_normal(key, ctr)
        u = uniform(key, ctr + 2)
        ctr += 3
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return d * v * boost


@njit(cache=True, nogil=True)
def mixing_draw(key, kind, atom_q, atom_cw, s, b):
    if kind == 0:
        u = uniform(key, 0)
        for i in range(atom_cw.shape[0] - 1):
            if u < atom_cw[i]:
                return atom_q[i]
        return atom_q[atom_cw.shape[0] - 1]
    x = gamma_one(derive(key, 1), s)
    y = gamma_one(derive(key, 2), b)
    return x / (x + y)


@njit(cache=True, nogil=True)
def elite_author_one(key, gamma, kind, atom_q, atom_cw, s, b):
    units, over = citations_one(derive(key, 0), 0.0, gamma)
    total = 0
    for i in range(1, units + 1):
        uk = derive(key, i)
        qi = mixing_draw(derive(uk, 0), kind, atom_q, atom_cw, s, b)
        g, o = geometric_one(derive(uk, 1), qi)
        total += g
        over += o
    return total, over


# --------------------------------------------------------------------------
# bulk drivers over draw indices [start, start + n)
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def bulk_geometric(root, start, n, q):
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        v, o = geometric_one(derive(root, start + i), q)
        out[i] = v
        over += o
    return out, over


@njit(cache=True, nogil=True)
def bulk_citations(root, start, n, a, p):
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        v, o = citations_one(derive(root, start + i), a, p)
        out[i] = v
        over += o
    return out, over


@njit(cache=True, nogil=True)
def bulk_author(root, start, n, a, p, q):
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        v, o = author_one(derive(root, start + i), a, p, q)
        out[i] = v
        over += o
    return out, over


@njit(cache=True, nogil=True)
def bulk_field(root, start, n, lam, a, p, q):
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        key = derive(root, start + i)
        m = poisson_one(derive(key, 0), lam)
        total = 0
        for l in range(1, m + 1):
            v, o = author_one(derive(key, l), a, p, q)
            total += v
            over += o
        out[i] = total
    return out, over


@njit(cache=True, nogil=True)
def bulk_elite(root, start, n, lam, gamma, kind, atom_q, atom_cw, s, b):
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        key = derive(root, start + i)
        m = poisson_one(derive(key, 0), lam)
        total = 0
        for l in range(1, m + 1):
            v, o = elite_author_one(derive(key, l), gamma, kind, atom_q, atom_cw, s, b)
            total += v
            over += o
        out[i] = total
    return out, over


@njit(cache=True, nogil=True)
def bulk_mixed_truncated_geometric(root, start, n, kind, atom_q, atom_cw, s, b):
    # one q per individual, then a geometric count shifted onto k >= 1
    out = np.empty(n, dtype=np.int64)
    over = 0
    for i in range(n):
        key = derive(root, start + i)
        qi = mixing_draw(derive(key, 0), kind, atom_q, atom_cw, s, b)
        g, o = geometric_one(derive(key, 1), qi)
        out[i] = g + 1
        over += o
    return out, over


@njit(cache=True, nogil=True)
def derive_many(root, start, n):
    out = np.empty(n, dtype=np.uint64)
    for i in range(n):
        out[i] = derive(root, start + i)
    return out
