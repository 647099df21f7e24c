"""Census of continued-fraction denominators below a bound.

For an alphabet A and a bound N this module enumerates every word over A
whose continuant is at most N, records which integers in [1, N] occur as
continuants (the membership bitset), and counts how many words produce
each value inside a window (the multiplicity histogram).  The walk over
the digit tree is exact: a child continuant always exceeds its parent, so
pruning at N loses nothing.

The enumeration is compiled with numba and split into prefix-rooted
chunks.  Chunk results merge by bitwise OR and integer addition, which
commute, so the outcome is identical for any thread count or chunking.
"""

from __future__ import annotations

import json
import math
import os
import struct
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from numba import njit, prange

from .cf import Alphabet
from .errors import (
    CensusFormatError,
    CensusTruncatedError,
    CensusVersionError,
    DomainError,
    ResourceLimitError,
)

_MAGIC = b"ZCEN"
_VERSION = 1

# Scratch arrays for one wave of chunks are kept under this many bytes.
_SHARD_BUDGET = 512 << 20

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


@dataclass(frozen=True)
class CensusConfig:
    """Parameters for one census run.

    ``histogram_window`` defaults to [N // 2, N], the window used by the
    multiplicity growth fit.  ``even_lengths_only`` restricts the count to
    words of even length; membership and histogram then cover only those
    words, while the tree walk itself is unchanged.
    """

    alphabet: Alphabet
    n_limit: int
    thread_count: int = 1
    histogram_window: Optional[Tuple[int, int]] = None
    even_lengths_only: bool = False
    checkpoint_path: Optional[str] = None

    def __post_init__(self):
        if self.n_limit < 1:
            raise DomainError("n_limit must be >= 1, got %r" % (self.n_limit,))
        if self.thread_count < 1:
            raise DomainError("thread_count must be >= 1, got %r" % (self.thread_count,))
        # child continuants reach (max_digit + 1) * n_limit before pruning;
        # they must stay inside int64 for the compiled kernel
        if (self.alphabet.max_digit + 1) * self.n_limit >= 2 ** 62:
            raise ResourceLimitError(
                "n_limit %d with max digit %d exceeds the 64-bit enumeration range"
                % (self.n_limit, self.alphabet.max_digit)
            )
        lo, hi = self.window()
        if not (1 <= lo <= hi <= self.n_limit):
            raise DomainError("histogram window [%d, %d] must sit inside [1, %d]"
                              % (lo, hi, self.n_limit))

    def window(self) -> Tuple[int, int]:
        if self.histogram_window is None:
            return (max(1, self.n_limit // 2), self.n_limit)
        return (int(self.histogram_window[0]), int(self.histogram_window[1]))


@dataclass
class Histogram:
    """Word counts per continuant value on a closed window [lo, hi]."""

    lo: int
    hi: int
    counts: np.ndarray

    def get(self, d: int) -> int:
        if d < self.lo or d > self.hi:
            raise DomainError("value %d outside histogram window [%d, %d]" % (d, self.lo, self.hi))
        return int(self.counts[d - self.lo])

    def total(self) -> int:
        return int(self.counts.sum())

    def support_count(self) -> int:
        return int(np.count_nonzero(self.counts))

    def items(self) -> Iterator[Tuple[int, int]]:
        """Nonzero (value, count) pairs in increasing value order."""
        for idx in np.flatnonzero(self.counts):
            yield self.lo + int(idx), int(self.counts[idx])

    def restricted(self, lo: int, hi: int) -> "Histogram":
        if lo < self.lo or hi > self.hi:
            raise DomainError("subwindow [%d, %d] escapes [%d, %d]" % (lo, hi, self.lo, self.hi))
        return Histogram(lo, hi, self.counts[lo - self.lo : hi - self.lo + 1])

    def mean_multiplicity(self) -> float:
        support = self.support_count()
        if support == 0:
            raise DomainError("histogram window holds no continuants")
        return self.total() / support


@dataclass
class CensusResult:
    """Output of one census run.

    ``membership`` is a packed little-endian bitset over [1, n_limit]:
    bit (d - 1) is set when d occurs as a continuant.  ``multiplicity``
    counts words per value on the configured window.  ``word_count`` is
    the total number of counted words.
    """

    alphabet: Alphabet
    n_limit: int
    membership: np.ndarray
    multiplicity: Histogram
    word_count: int
    even_lengths_only: bool = False

    def contains(self, d: int) -> bool:
        if d < 1 or d > self.n_limit:
            return False
        i = d - 1
        return bool((self.membership[i >> 3] >> (i & 7)) & 1)

    def member_count(self) -> int:
        return int(_POPCOUNT[self.membership].sum())

    def members(self) -> np.ndarray:
        """All denominators in increasing order.  Allocates O(n_limit) scratch."""
        bits = np.unpackbits(self.membership, bitorder="little")[: self.n_limit]
        return np.flatnonzero(bits).astype(np.int64) + 1


def proportion(result: CensusResult) -> float:
    """Fraction of [1, N] realized as a continuant."""
    return result.member_count() / result.n_limit


@njit(cache=True, parallel=True)
def _census_chunks(digits, n_limit, pre_p, pre_c, pre_even, chunk_lo, chunk_hi,
                   seen_shards, hist_shards, counts, hist_lo, hist_hi,
                   even_only, stack_cap):
    nd = digits.shape[0]
    for ci in prange(chunk_lo.shape[0]):
        seen = seen_shards[ci]
        hist = hist_shards[ci]
        stack_p = np.empty(stack_cap, np.int64)
        stack_c = np.empty(stack_cap, np.int64)
        stack_e = np.empty(stack_cap, np.uint8)
        total = 0
        for pi in range(chunk_lo[ci], chunk_hi[ci]):
            stack_p[0] = pre_p[pi]
            stack_c[0] = pre_c[pi]
            stack_e[0] = pre_even[pi]
            top = 1
            while top > 0:
                top -= 1
                p = stack_p[top]
                c = stack_c[top]
                ne = 1 - stack_e[top]
                for i in range(nd):
                    nc = digits[i] * c + p
                    if nc <= n_limit:
                        if ne == 1 or not even_only:
                            total += 1
                            seen[nc] = 1
                            if hist_lo <= nc <= hist_hi:
                                hist[nc - hist_lo] += 1
                        stack_p[top] = c
                        stack_c[top] = nc
                        stack_e[top] = ne
                        top += 1
        counts[ci] = total


def _max_word_length(n_limit: int) -> int:
    # continuants grow at least as fast as Fibonacci numbers
    a, b, length = 1, 1, 0
    while b <= n_limit:
        a, b = b, a + b
        length += 1
    return length


def _mark_level(seen, hist, hist_lo, hist_hi, values) -> None:
    seen[values] = 1
    inside = values[(values >= hist_lo) & (values <= hist_hi)]
    if inside.size:
        np.add.at(hist, inside - hist_lo, 1)


def _expand_prefixes(digits: np.ndarray, n_limit: int, want: int,
                     seen, hist, hist_lo, hist_hi, even_only: bool):
    """Grow the digit tree level by level until at least ``want`` live
    prefixes exist (or the tree is exhausted).  Words completed along the
    way are recorded directly.  Returns (P, C, depth, counted_words)."""
    P = np.zeros(1, dtype=np.int64)
    C = np.ones(1, dtype=np.int64)
    depth = 0
    counted = 0
    k = digits.shape[0]
    while C.size and C.size < want and depth < 24 and C.size * k <= 4_000_000:
        NP = np.empty(C.size * k, dtype=np.int64)
        NC = np.empty(C.size * k, dtype=np.int64)
        for i in range(k):
            NP[i::k] = C
            NC[i::k] = digits[i] * C + P
        keep = NC <= n_limit
        P, C = NP[keep], NC[keep]
        depth += 1
        if C.size and (not even_only or depth % 2 == 0):
            counted += C.size
            _mark_level(seen, hist, hist_lo, hist_hi, C)
    return P, C, depth, counted


def enumerate_denominators(config: CensusConfig) -> CensusResult:
    """Run the census described by ``config``.

    Every word w over the alphabet with continuant(w) <= n_limit is
    visited exactly once.  The result is independent of thread count and
    of how the prefix tree was chunked.
    """
    import numba

    n = config.n_limit
    hist_lo, hist_hi = config.window()
    digits = np.array(config.alphabet.digits, dtype=np.int64)

    seen = np.zeros(n + 1, dtype=np.uint8)
    hist = np.zeros(hist_hi - hist_lo + 1, dtype=np.int64)

    threads = max(1, min(config.thread_count, numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)

    want = max(8 * config.thread_count, 32)
    pre_p, pre_c, depth, word_count = _expand_prefixes(
        digits, n, want, seen, hist, hist_lo, hist_hi, config.even_lengths_only)

    if pre_c.size:
        stack_cap = (_max_word_length(n) + 2) * max(1, digits.shape[0])
        n_chunks = min(pre_c.size, max(4 * config.thread_count, 16))
        bounds = np.linspace(0, pre_c.size, n_chunks + 1).astype(np.int64)
        chunk_lo, chunk_hi = bounds[:-1], bounds[1:]

        per_chunk_bytes = (n + 1) + 8 * (hist_hi - hist_lo + 1)
        per_wave = int(max(1, min(n_chunks, _SHARD_BUDGET // max(1, per_chunk_bytes))))
        parity = np.uint8(depth % 2 == 0)
        pre_even = np.full(pre_c.size, parity, dtype=np.uint8)

        start_chunk = 0
        if config.checkpoint_path:
            resume = _load_checkpoint(config, pre_c.size, n_chunks)
            if resume is not None:
                start_chunk, seen, hist, word_count = resume

        ci = start_chunk
        while ci < n_chunks:
            hi = min(ci + per_wave, n_chunks)
            m = hi - ci
            seen_shards = np.zeros((m, n + 1), dtype=np.uint8)
            hist_shards = np.zeros((m, hist_hi - hist_lo + 1), dtype=np.int64)
            counts = np.zeros(m, dtype=np.int64)
            _census_chunks(digits, n, pre_p, pre_c, pre_even,
                           chunk_lo[ci:hi], chunk_hi[ci:hi],
                           seen_shards, hist_shards, counts,
                           hist_lo, hist_hi, config.even_lengths_only, stack_cap)
            np.bitwise_or(seen, seen_shards.max(axis=0), out=seen)
            hist += hist_shards.sum(axis=0)
            word_count += int(counts.sum())
            ci = hi
            if config.checkpoint_path and ci < n_chunks:
                _save_checkpoint(config, pre_c.size, n_chunks, ci, seen, hist, word_count)

        if config.checkpoint_path:
            _clear_checkpoint(config.checkpoint_path)

    packed = np.packbits(seen[1:], bitorder="little")
    if packed.size % 8:
        packed = np.concatenate([packed, np.zeros(8 - packed.size % 8, dtype=np.uint8)])

    return CensusResult(
        alphabet=config.alphabet,
        n_limit=n,
        membership=packed,
        multiplicity=Histogram(hist_lo, hist_hi, hist),
        word_count=word_count,
        even_lengths_only=config.even_lengths_only,
    )


# ---------------------------------------------------------------------------
# multiplicity growth fit

@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of log mean multiplicity against log N."""

    slope: float
    intercept: float
    n_values: Tuple[int, ...]
    means: Tuple[float, ...]
    residuals: Tuple[float, ...]

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals)


def multiplicity_exponent(results: Sequence[CensusResult]) -> ExponentFit:
    """Fit the growth exponent of the mean multiplicity over [N/2, N].

    Takes censuses of one alphabet at strictly increasing bounds, computes
    the mean word count per realized denominator in each window, and
    returns the slope of log(mean) against log(N) with per-point
    residuals.  Fewer than two points, repeated bounds, mixed alphabets,
    or empty windows are domain errors, never silent degeneracy.
    """
    if len(results) < 2:
        raise DomainError("exponent fit needs at least two census results")
    base = results[0]
    ns, means = [], []
    for r in results:
        if r.alphabet != base.alphabet or r.even_lengths_only != base.even_lengths_only:
            raise DomainError("exponent fit requires censuses of a single alphabet")
        lo, hi = max(1, r.n_limit // 2), r.n_limit
        if r.multiplicity.lo > lo or r.multiplicity.hi < hi:
            raise DomainError(
                "census at N=%d lacks the [N/2, N] window needed for the fit" % r.n_limit)
        means.append(r.multiplicity.restricted(lo, hi).mean_multiplicity())
        ns.append(r.n_limit)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("census bounds must be strictly increasing, got %r" % (ns,))

    x = np.log(np.array(ns, dtype=np.float64))
    y = np.log(np.array(means, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    return ExponentFit(
        slope=float(slope),
        intercept=float(intercept),
        n_values=tuple(ns),
        means=tuple(means),
        residuals=tuple(float(v) for v in (y - fitted)),
    )


# ---------------------------------------------------------------------------
# file format
#
# Census files are little-endian throughout:
#   magic "ZCEN" | u32 version | u32 flags (bit 0: even-length words only)
#   u64 n_limit | u32 digit count | u64 digits...
#   u64 word_count | u64 hist_lo | u64 hist_hi
#   u64 bitset byte length | bitset (packed, little bit order, 8-byte padded)
#   u64 pair count | (u64 value, u64 count) pairs, increasing value
#
# Only nonzero histogram entries are stored.

def _read_exact(fh, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise CensusTruncatedError(
            "census file ends early: wanted %d bytes, got %d" % (size, len(data)))
    return data


def save_census(result: CensusResult, path: str) -> None:
    """Write a census to disk in the binary format described above."""
    hist = result.multiplicity
    nz = np.flatnonzero(hist.counts)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, 1 if result.even_lengths_only else 0))
        fh.write(struct.pack("<QI", result.n_limit, len(result.alphabet.digits)))
        fh.write(struct.pack("<%dQ" % len(result.alphabet.digits), *result.alphabet.digits))
        fh.write(struct.pack("<QQQ", result.word_count, hist.lo, hist.hi))
        fh.write(struct.pack("<Q", result.membership.size))
        fh.write(result.membership.tobytes())
        fh.write(struct.pack("<Q", nz.size))
        for idx in nz:
            fh.write(struct.pack("<QQ", hist.lo + int(idx), int(hist.counts[idx])))


def load_census(path: str) -> CensusResult:
    """Read a census file, checking magic, version, and framing."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise CensusFormatError("not a census file: bad magic %r" % (magic,))
        version, flags = struct.unpack("<II", _read_exact(fh, 8))
        if version != _VERSION:
            raise CensusVersionError("unsupported census format version %d" % version)
        n_limit, n_digits = struct.unpack("<QI", _read_exact(fh, 12))
        if n_digits == 0:
            raise CensusFormatError("census file declares an empty alphabet")
        digits = struct.unpack("<%dQ" % n_digits, _read_exact(fh, 8 * n_digits))
        word_count, hist_lo, hist_hi = struct.unpack("<QQQ", _read_exact(fh, 24))
        if not (1 <= hist_lo <= hist_hi <= n_limit):
            raise CensusFormatError("census file window [%d, %d] is inconsistent"
                                    % (hist_lo, hist_hi))
        (bitset_len,) = struct.unpack("<Q", _read_exact(fh, 8))
        if bitset_len < (n_limit + 7) // 8:
            raise CensusFormatError("census bitset shorter than its range")
        membership = np.frombuffer(_read_exact(fh, bitset_len), dtype=np.uint8).copy()
        (pairs,) = struct.unpack("<Q", _read_exact(fh, 8))
        counts = np.zeros(hist_hi - hist_lo + 1, dtype=np.int64)
        for _ in range(pairs):
            value, count = struct.unpack("<QQ", _read_exact(fh, 16))
            if not (hist_lo <= value <= hist_hi):
                raise CensusFormatError("histogram entry %d escapes window" % value)
            counts[value - hist_lo] = count
        if fh.read(1):
            raise CensusFormatError("trailing bytes after census payload")
    return CensusResult(
        alphabet=Alphabet(digits),
        n_limit=int(n_limit),
        membership=membership,
        multiplicity=Histogram(int(hist_lo), int(hist_hi), counts),
        word_count=int(word_count),
        even_lengths_only=bool(flags & 1),
    )


def export_histogram_csv(result: CensusResult, path: str) -> None:
    """Write the nonzero multiplicity histogram as ``value,count`` rows."""
    with open(path, "w") as fh:
        fh.write("value,count\n")
        for value, count in result.multiplicity.items():
            fh.write("%d,%d\n" % (value, count))


# ---------------------------------------------------------------------------
# checkpointing for long runs

def _checkpoint_meta(config: CensusConfig, prefix_count: int, n_chunks: int) -> dict:
    lo, hi = config.window()
    return {
        "n_limit": config.n_limit,
        "digits": list(config.alphabet.digits),
        "window": [lo, hi],
        "even_lengths_only": config.even_lengths_only,
        "prefix_count": prefix_count,
        "chunk_count": n_chunks,
    }


def _save_checkpoint(config, prefix_count, n_chunks, chunks_done, seen, hist, word_count):
    lo, hi = config.window()
    meta = _checkpoint_meta(config, prefix_count, n_chunks)
    meta["chunks_done"] = chunks_done
    meta["word_count"] = word_count
    path = config.checkpoint_path
    with open(path + ".tmp", "wb") as fh:
        fh.write(json.dumps(meta, sort_keys=True).encode() + b"\n")
        fh.write(seen.tobytes())
        fh.write(hist.tobytes())
    os.replace(path + ".tmp", path)


def _load_checkpoint(config, prefix_count, n_chunks):
    path = config.checkpoint_path
    if not path or not os.path.exists(path):
        return None
    lo, hi = config.window()
    try:
        with open(path, "rb") as fh:
            meta = json.loads(fh.readline().decode())
            expect = _checkpoint_meta(config, prefix_count, n_chunks)
            if {k: meta.get(k) for k in expect} != expect:
                return None
            seen = np.frombuffer(fh.read(config.n_limit + 1), dtype=np.uint8).copy()
            hist = np.frombuffer(fh.read(8 * (hi - lo + 1)), dtype=np.int64).copy()
            if seen.size != config.n_limit + 1 or hist.size != hi - lo + 1:
                return None
        return int(meta["chunks_done"]), seen, hist, int(meta["word_count"])
    except (ValueError, KeyError, OSError):
        return None


def _clear_checkpoint(path: str) -> None:
    try:
        os.remove(path)
    except OSError:
        pass
