"""Noise-guessing decoders: GRAND (hard decision) and ORBGRAND (soft).

Both decoders walk a fixed sequence of candidate noise patterns, XOR each
pattern into the received hard-decision word, and ask a membership oracle
whether the result is a codeword. The first acceptance wins; if the query
budget runs out (or the whole pattern space is exhausted) the block is
abandoned.

Pattern orders are pinned exactly:

* Hamming order (GRAND): nondecreasing flip count; within a weight class,
  increasing integer value of the pattern word, where position i carries
  value 2^i for this comparison only. For n = 3 that is
  000, 001, 010, 100, 011, 101, 110, 111 (as position sets:
  {}, {0}, {1}, {2}, {0,1}, {0,2}, {1,2}, {0,1,2}).

* Logistic order (ORBGRAND): patterns are sets of distinct reliability
  ranks (1 = least reliable); sort by rank sum, then by fewer flips, then
  lexicographically on the sorted rank tuple. Rank r flips the position
  with the r-th smallest |LLR|. For n = 4 the order starts
  {}, {1}, {2}, {3}, {1,2}, {4}, {1,3}, ...

Everything on the hot path works on packed words (np.packbits layout);
pattern chunks become (C, nbytes) XOR masks so one oracle call tests a few
thousand candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .bitblock import BitVec, split
from .channel import SoftWord, hard_bits, reliability_permutation

__all__ = [
    "DecodeOutcome",
    "hamming_order_patterns",
    "logistic_order_patterns",
    "pattern_positions",
    "grand_decode",
    "orbgrand_decode",
    "DEFAULT_MAX_QUERIES",
]

DEFAULT_MAX_QUERIES = 10**6

# Chunk of candidates tested per oracle call. Large enough to amortize the
# per-call python and cipher-setup overhead, small enough that a hit early
# in a chunk does not waste much batched work.
_CHUNK = 4096

# Cache the XOR-mask array for a whole weight class when it stays under
# this many bytes; heavier classes are streamed in _CHUNK-sized pieces.
_WEIGHT_CACHE_BYTES = 8 << 20


def hamming_order_patterns(n):
    """Yield all 2^n pattern words of n positions in Hamming order.

    A pattern word is an int whose bit i (value 2^i) flips position i.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    for w in range(n + 1):
        yield from _gosper(n, w)


def _gosper(n, w):
    # Within one weight class, Gosper's hack enumerates exactly in
    # increasing integer value.
    if w == 0:
        yield 0
        return
    v = (1 << w) - 1
    top = 1 << n
    while v < top:
        yield v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def pattern_positions(word):
    """Flip positions of a Hamming-order pattern word, ascending."""
    out = []
    i = 0
    while word:
        if word & 1:
            out.append(i)
        word >>= 1
        i += 1
    return tuple(out)


def logistic_order_patterns(n):
    """Yield all 2^n rank sets (sorted tuples of distinct ranks in 1..n)
    in logistic order: rank sum, then set size, then lexicographic."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    yield ()
    for w in range(1, n * (n + 1) // 2 + 1):
        for m in range(1, n + 1):
            if m * (m + 1) // 2 > w:
                break
            if m * n - m * (m - 1) // 2 < w:
                continue
            yield from _distinct_parts(w, m, 1, n)


def _distinct_parts(w, m, lo, hi):
    # Sorted tuples of m distinct values in [lo, hi] summing to w,
    # in lexicographic order.
    if m == 1:
        if lo <= w <= hi:
            yield (w,)
        return
    a_max = (w - m * (m - 1) // 2) // m
    rest_cap = (m - 1) * hi - (m - 1) * (m - 2) // 2
    for a in range(lo, a_max + 1):
        if w - a > rest_cap:
            continue
        for rest in _distinct_parts(w - a, m - 1, a + 1, hi):
            yield (a, *rest)


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decode: the message (None when abandoned), the number
    of oracle queries spent, and the weight of the accepted pattern
    (Hamming weight for grand, rank sum for orbgrand; None when abandoned)."""

    message: BitVec | None
    queries: int
    final_weight: int | None

    @property
    def decoded(self):
        return self.message is not None

    @property
    def abandoned(self):
        return self.message is None


# bit-reversal of a byte; pattern words are little-endian per byte while the
# packed word layout puts position 8j at the high bit of byte j
_BITREV = np.array([int(f"{i:08b}"[::-1], 2) for i in range(256)], dtype=np.uint8)


def _words_to_masks(words, nbytes):
    buf = b"".join(v.to_bytes(nbytes, "little") for v in words)
    arr = np.frombuffer(buf, dtype=np.uint8).reshape(-1, nbytes)
    return _BITREV[arr]


class _HammingMasks:
    """Per-n provider of weight-class XOR masks in pinned order."""

    def __init__(self, n):
        self.n = n
        self.nbytes = (n + 7) // 8
        self._cached = {}

    def chunks(self, start_weight=0):
        """Yield (weight, masks) with masks in global Hamming order;
        a weight class may arrive split across several arrays."""
        for w in range(start_weight, self.n + 1):
            if w in self._cached:
                full = self._cached[w]
                for i in range(0, len(full), _CHUNK):
                    yield w, full[i : i + _CHUNK]
                continue
            count = comb(self.n, w)
            if count * self.nbytes <= _WEIGHT_CACHE_BYTES:
                full = _words_to_masks(list(_gosper(self.n, w)), self.nbytes)
                full.setflags(write=False)
                self._cached[w] = full
                for i in range(0, len(full), _CHUNK):
                    yield w, full[i : i + _CHUNK]
            else:
                gen = _gosper(self.n, w)
                while True:
                    words = []
                    for v in gen:
                        words.append(v)
                        if len(words) == _CHUNK:
                            break
                    if not words:
                        break
                    yield w, _words_to_masks(words, self.nbytes)


class _LogisticPatterns:
    """Per-n store of rank sets in logistic order, grown on demand.

    Rank sets are kept flattened (uint16 ranks plus an offsets array) so a
    contiguous range of patterns can be turned into scatter indices without
    touching python tuples again.
    """

    _GROW = 1 << 16

    def __init__(self, n):
        self.n = n
        self._gen = logistic_order_patterns(n)
        self._flat = np.empty(0, dtype=np.uint16)
        self._offsets = np.zeros(1, dtype=np.int64)
        self._exhausted = False

    @property
    def count(self):
        return len(self._offsets) - 1

    def ensure(self, count):
        while self.count < count and not self._exhausted:
            fresh = []
            for pat in self._gen:
                fresh.append(pat)
                if len(fresh) == self._GROW:
                    break
            if not fresh:
                self._exhausted = True
                break
            flat = np.fromiter(
                (r for pat in fresh for r in pat),
                dtype=np.uint16,
                count=sum(len(p) for p in fresh),
            )
            sizes = np.fromiter((len(p) for p in fresh), dtype=np.int64, count=len(fresh))
            self._flat = np.concatenate([self._flat, flat])
            self._offsets = np.concatenate(
                [self._offsets, self._offsets[-1] + np.cumsum(sizes)]
            )

    def slice(self, i0, i1):
        """(flat ranks, row index per rank, rank sums) for patterns i0..i1."""
        rel = self._offsets[i0 : i1 + 1] - self._offsets[i0]
        flat = self._flat[self._offsets[i0] : self._offsets[i1]]
        rows = np.repeat(np.arange(i1 - i0), np.diff(rel))
        csum = np.concatenate([[0], np.cumsum(flat, dtype=np.int64)])
        return flat, rows, csum[rel[1:]] - csum[rel[:-1]]


_HAMMING_CACHE = {}
_LOGISTIC_CACHE = {}


def _hamming_masks(n):
    if n not in _HAMMING_CACHE:
        _HAMMING_CACHE[n] = _HammingMasks(n)
    return _HAMMING_CACHE[n]


def _logistic_patterns(n):
    if n not in _LOGISTIC_CACHE:
        _LOGISTIC_CACHE[n] = _LogisticPatterns(n)
    return _LOGISTIC_CACHE[n]


def _check_budget(max_queries):
    if max_queries < 1:
        raise ValueError(f"max_queries must be >= 1, got {max_queries}")


def _grand_engine(y_bytes, oracle, max_queries, start_weight=0, queries_done=0):
    """Search Hamming-order patterns. Returns (block bytes or None, queries,
    accepted weight or None). Abandonment (None block) happens when the
    budget is spent or every pattern failed."""
    provider = _hamming_masks(oracle.params.n)
    queries = queries_done
    for w, masks in provider.chunks(start_weight):
        room = max_queries - queries
        if room <= 0:
            return None, queries, None
        if len(masks) > room:
            masks = masks[:room]
        hit = oracle.first_accept(y_bytes ^ masks)
        if hit is None:
            queries += len(masks)
            continue
        idx, block = hit
        return block, queries + idx + 1, w
    return None, queries, None


def _orb_engine(y_bytes, perm, oracle, max_queries, start_index=0, queries_done=0):
    """Search logistic-order rank sets. Returns (block bytes or None,
    queries, accepted rank sum or None)."""
    n = oracle.params.n
    store = _logistic_patterns(n)
    y_bits = np.unpackbits(y_bytes)[:n]
    perm = np.asarray(perm)
    queries = queries_done
    i = start_index
    chunk = 64
    while queries < max_queries:
        want = min(chunk, max_queries - queries)
        store.ensure(i + want)
        i1 = min(i + want, store.count)
        if i1 <= i:
            return None, queries, None  # pattern space exhausted
        flat, rows, sums = store.slice(i, i1)
        cand_bits = np.broadcast_to(y_bits, (i1 - i, n)).copy()
        if len(flat):
            cand_bits[rows, perm[flat - 1]] ^= 1
        hit = oracle.first_accept(np.packbits(cand_bits, axis=1))
        if hit is None:
            queries += i1 - i
            i = i1
            chunk = min(chunk * 8, _CHUNK)
            continue
        idx, block = hit
        return block, queries + idx + 1, int(sums[idx])
    return None, queries, None


def _finish(oracle, block, queries, weight):
    if block is None:
        return DecodeOutcome(message=None, queries=queries, final_weight=None)
    full = BitVec.from_bytes(block.tobytes(), oracle.params.n)
    return DecodeOutcome(
        message=split(full, oracle.params.k)[0],
        queries=queries,
        final_weight=weight,
    )


def grand_decode(y, oracle, max_queries=DEFAULT_MAX_QUERIES):
    """Decode a hard-decision BitVec by guessing noise in Hamming order."""
    _check_budget(max_queries)
    if len(y) != oracle.params.n:
        raise ValueError(f"expected {oracle.params.n}-bit word, got {len(y)}")
    y_bytes = np.frombuffer(y.to_bytes(), dtype=np.uint8)
    return _finish(oracle, *_grand_engine(y_bytes, oracle, max_queries))


def orbgrand_decode(word, oracle, max_queries=DEFAULT_MAX_QUERIES):
    """Decode a SoftWord by guessing noise in logistic (rank-sum) order."""
    _check_budget(max_queries)
    if not isinstance(word, SoftWord):
        raise TypeError("orbgrand_decode needs a SoftWord with LLRs")
    if len(word) != oracle.params.n:
        raise ValueError(f"expected {oracle.params.n}-bit word, got {len(word)}")
    perm = reliability_permutation(word)
    y_bytes = np.packbits(hard_bits(word.samples))
    return _finish(oracle, *_orb_engine(y_bytes, perm, oracle, max_queries))
