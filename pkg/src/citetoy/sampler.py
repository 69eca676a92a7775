"""Seeded event-by-event simulation of the publication and citation processes.

Each draw ``i`` of a stream gets its own key ``derive(stream_key, i)``, and every
sub-draw (paper, author, unit) is keyed off it. Output therefore depends only on
``(seed, stream path, i)``, not on chunk size or worker count.

Citation counts follow the stopping hazard ``p/k``. They are simulated by
discrete-time thinning against the constant bound ``p/k_current``, which is
exact and costs O(log k) steps per paper instead of O(k).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._kernels_numpy import derive as _derive, mix64 as _mix64
from .errors import ParameterError
from .models import (
    AuthorModelParams,
    Atoms,
    BetaLike,
    CitationParams,
    EliteModelParams,
    FieldModelParams,
    GeometricParams,
)

CAP = kernels.CAP
CHUNK = 1 << 16


@dataclass(frozen=True)
class RngState:
    """Deterministic generator state: a 64-bit seed plus a stream path.

    ``spawn(i)`` yields an independent child stream, and ``advance(n)`` skips
    ``n`` draws.
    """

    seed: int
    stream: tuple = (0,)
    offset: int = 0

    def __post_init__(self):
        stream = self.stream if isinstance(self.stream, tuple) else (int(self.stream),)
        object.__setattr__(self, "stream", tuple(int(s) for s in stream))
        if any(s < 0 for s in self.stream) or self.offset < 0:
            raise ParameterError("stream ids and offsets must be non-negative")

    @property
    def key(self) -> np.uint64:
        k = _mix64(np.uint64(int(self.seed) % (1 << 64)))
        for s in self.stream:
            k = _derive(k, s)
        return np.uint64(k)

    def spawn(self, i: int) -> "RngState":
        return RngState(self.seed, self.stream + (int(i),), 0)

    def advance(self, n: int) -> "RngState":
        return RngState(self.seed, self.stream, self.offset + int(n))


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    overflow: int

    def __len__(self):
        return self.values.size


def _kernel_for(model):
    fam = getattr(model, "family", None)
    if fam == "geometric":
        return kernels.bulk_geometric, (model.q,)
    if fam == "citation":
        return kernels.bulk_citations, (model.a, model.p)
    if fam == "author":
        return kernels.bulk_author, (model.a, model.p, model.q)
    if fam == "field":
        return kernels.bulk_field, (model.lam, model.a, model.p, model.q)
    if fam == "elite":
        kind, aq, acw, s, b = model.xi.sampler_arrays()
        return kernels.bulk_elite, (model.lam, model.gamma, kind,
                                    np.ascontiguousarray(aq, dtype=float),
                                    np.ascontiguousarray(acw, dtype=float), s, b)
    raise ParameterError(f"no sampler for family {fam!r}")


def _run(kernel, args, rng: RngState, size: int, workers: int) -> SampleBatch:
    if size < 0:
        raise ParameterError("size must be non-negative")
    root = rng.key
    starts = list(range(rng.offset, rng.offset + size, CHUNK))

    def one(start):
        n = min(CHUNK, rng.offset + size - start)
        return kernel(root, start, n, *args)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, starts))
    else:
        parts = [one(s) for s in starts]
    if not parts:
        return SampleBatch(np.zeros(0, dtype=np.int64), 0)
    values = np.concatenate([p[0] for p in parts])
    return SampleBatch(values, int(sum(p[1] for p in parts)))


def simulate(model, rng: RngState, size: int, workers: int = 1) -> SampleBatch:
    """Draw ``size`` samples of ``model`` (geometric, citation, author, field or elite)."""
    kernel, args = _kernel_for(model)
    return _run(kernel, args, rng, size, workers)


def _single_or_many(model, rng, size):
    batch = simulate(model, rng, 1 if size is None else size)
    return int(batch.values[0]) if size is None else batch.values


def sample_geometric(params: GeometricParams, rng: RngState, size=None):
    """Accepted papers before the first rejection, one Bernoulli trial at a time."""
    return _single_or_many(params, rng, size)


def sample_citations(params: CitationParams, rng: RngState, size=None):
    return _single_or_many(params, rng, size)


def sample_author(params: AuthorModelParams, rng: RngState, size=None):
    return _single_or_many(params, rng, size)


def sample_field(params: FieldModelParams | EliteModelParams, rng: RngState, size=None):
    """Total over a Poisson number of authors.

    For the elite variant each author holds a hazard-process number of units
    (stopping parameter ``gamma``), and every unit draws its own ``q`` from
    ``xi`` before contributing a geometric count.
    """
    return _single_or_many(params, rng, size)


def sample_publications(q_or_xi, rng: RngState, size: int, workers: int = 1) -> SampleBatch:
    """Non-zero publication counts ``1 + Geometric(q)``, with ``q`` fixed or drawn per person."""
    xi = q_or_xi if isinstance(q_or_xi, (Atoms, BetaLike)) else Atoms(((float(q_or_xi), 1.0),))
    kind, aq, acw, s, b = xi.sampler_arrays()
    args = (kind, np.ascontiguousarray(aq, dtype=float), np.ascontiguousarray(acw, dtype=float), s, b)
    return _run(kernels.bulk_mixed_truncated_geometric, args, rng, size, workers)


def empirical_pmf(values, max_k: int) -> np.ndarray:
    values = np.asarray(values)
    counts = np.bincount(values[values <= max_k], minlength=max_k + 1)
    return counts / values.size


def tv_distance(p, q) -> float:
    """Half the L1 distance between two pmf vectors of equal length."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
