"""Single-pass weighted sampling without replacement via exponent keys,
plus classic uniform reservoir sampling.

An item with weight u gets key a^(1/u) for a ~ unif(0,1); keeping the K
largest keys realizes weighted sampling without replacement in one pass
with O(K) retained items. Keys are compared in log space (ln a / u, a
strictly monotone transform) so that huge weights cannot collapse distinct
keys onto 1.0 through float rounding.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import InsufficientItemsError

_CHUNK = 4096


@dataclass(frozen=True)
class ScoredItem:
    """A stream element: opaque non-negative integer id plus positive weight."""

    id: int
    weight: float

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"item id must be non-negative, got {self.id}")
        if not (self.weight > 0.0 and math.isfinite(self.weight)):
            raise ValueError(f"weight must be positive and finite, got {self.weight}")


class RngState:
    """Deterministic random source: PCG64 seeded through SeedSequence.

    Identical (seed, path) plus an identical call sequence reproduces the
    output stream exactly. `derive` builds an independent child stream from
    integer keys, used to give trials and subsystems their own streams.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(p) for p in _path)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, *self.path]))
        )

    algorithm = "numpy-pcg64/seedsequence"

    def derive(self, *keys: int) -> "RngState":
        """Independent child stream addressed by integer keys."""
        return RngState(self.seed, self.path + tuple(int(k) for k in keys))

    def uniform_open(self) -> float:
        """One double in the open interval (0, 1); rejects boundary values."""
        x = self._gen.random()
        while x == 0.0:
            x = self._gen.random()
        return x

    def uniforms_open(self, size: int) -> np.ndarray:
        """Block of doubles in (0, 1); consumes the same stream as repeated
        scalar draws (zero hits are redrawn in place)."""
        arr = self._gen.random(size)
        zero = arr == 0.0
        while zero.any():
            arr[zero] = self._gen.random(int(zero.sum()))
            zero = arr == 0.0
        return arr

    def integers(self, high: int) -> int:
        """One integer uniform on [0, high)."""
        return int(self._gen.integers(0, high))

    def standard_normal(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self):
        return f"RngState(seed={self.seed}, path={self.path})"


@dataclass
class SelectionStats:
    """Instrumentation for the memory contract of select_top_k."""

    items_seen: int = 0
    peak_retained: int = 0


def gen_key(weight: float, a: float) -> float:
    """Exponent key a^(1/weight), computed as exp(ln(a)/weight).

    Strictly increasing in both arguments; stays in (0, 1) since ln(a) < 0.
    """
    if not (weight > 0.0 and math.isfinite(weight)):
        raise ValueError(f"weight must be positive and finite, got {weight}")
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must be in the open interval (0, 1), got {a}")
    return math.exp(math.log(a) / weight)


def log_key(weight: float, a: float) -> float:
    """ln of gen_key: ln(a)/weight. The selection order used internally."""
    if not (weight > 0.0 and math.isfinite(weight)):
        raise ValueError(f"weight must be positive and finite, got {weight}")
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must be in the open interval (0, 1), got {a}")
    return math.log(a) / weight


class TopKReservoir:
    """Bounded min-heap holding the current K best (log-key, id) entries.

    Ties on the key are broken toward the smaller id, which makes runs
    bit-reproducible. Heap entries are (log_key, -id) so the root is always
    the current worst item under that order.
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError(f"K must be >= 1, got {k}")
        self.k = k
        self._heap: list[tuple[float, int]] = []

    def offer(self, item_id: int, logkey: float) -> None:
        entry = (logkey, -item_id)
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, entry)
        elif entry > self._heap[0]:
            heapq.heapreplace(self._heap, entry)

    def __len__(self):
        return len(self._heap)

    def ids(self) -> set[int]:
        return {-neg for _, neg in self._heap}


def _iter_pairs(stream) -> Iterator[tuple[int, float]]:
    for item in stream:
        if isinstance(item, ScoredItem):
            yield item.id, item.weight
        else:
            i, w = item
            yield int(i), float(w)


def select_top_k(
    stream: Iterable,
    k: int,
    rng: RngState,
    stats: SelectionStats | None = None,
) -> set[int]:
    """K distinct ids sampled without replacement proportionally to weights.

    Accepts ScoredItem objects or (id, weight) pairs; ids must be distinct
    and weights positive. Single forward pass; retains at most K items plus
    a fixed-size buffer of uniforms. One uniform is consumed per stream
    element in stream order, so output is a pure function of (stream, K,
    rng seed).

    Raises InsufficientItemsError when the stream holds fewer than K items.
    """
    if k < 1:
        raise ValueError(f"K must be >= 1, got {k}")
    reservoir = TopKReservoir(k)
    n_seen = 0
    ids_buf: list[int] = []
    w_buf: list[float] = []

    def flush():
        nonlocal n_seen
        if not ids_buf:
            return
        w = np.asarray(w_buf, dtype=np.float64)
        if not ((w > 0.0).all() and np.isfinite(w).all()):
            bad = w_buf[int(np.argmin((w > 0.0) & np.isfinite(w)))]
            raise ValueError(f"weights must be positive and finite, got {bad}")
        a = rng.uniforms_open(len(w))
        logkeys = np.log(a) / w
        for i in range(len(ids_buf)):
            reservoir.offer(ids_buf[i], logkeys[i])
        n_seen += len(ids_buf)
        if stats is not None:
            stats.items_seen = n_seen
            stats.peak_retained = max(stats.peak_retained, len(reservoir))
        ids_buf.clear()
        w_buf.clear()

    for item_id, weight in _iter_pairs(stream):
        ids_buf.append(item_id)
        w_buf.append(weight)
        if len(ids_buf) >= _CHUNK:
            flush()
    flush()

    if n_seen < k:
        raise InsufficientItemsError(n_seen, k)
    return reservoir.ids()


def uniform_sample(ids: Iterable[int], k: int, rng: RngState) -> set[int]:
    """K ids drawn uniformly without replacement, single pass (reservoir).

    Every K-subset of the stream is equally likely. Raises
    InsufficientItemsError when fewer than K ids are supplied.
    """
    if k < 1:
        raise ValueError(f"K must be >= 1, got {k}")
    reservoir: list[int] = []
    n = 0
    for item_id in ids:
        if n < k:
            reservoir.append(item_id)
        else:
            j = rng.integers(n + 1)
            if j < k:
                reservoir[j] = item_id
        n += 1
    if n < k:
        raise InsufficientItemsError(n, k)
    return set(reservoir)
