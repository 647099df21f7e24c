"""Residues of continuants modulo q via semigroup closure.

Products of the pair generators [[1, v], [u, u*v+1]] realize exactly the
matrices of even-length words.  Working modulo q, the set of reachable
matrices is finite, so a breadth-first closure finds every bottom-right
entry that any even-length word can produce mod q.  An integer d is
admissible up to q_max when its residue class is realized for every
modulus 2..q_max.

States are packed into int64 keys (base-q digits of the four entries) and
each wave of the search is a vectorized batch multiply, so closures for
moduli in the hundreds finish quickly.  Residues are collected from every
product formed, including re-visits, which keeps the identity matrix from
contributing a residue unless some nonempty product actually lands on it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterator, Optional, Sequence, Tuple

import numpy as np

from .cf import Alphabet
from .errors import DomainError, ResourceLimitError

# Keys pack four base-q digits into an int64, so q**4 must stay below 2**63.
_Q_CAP = 50_000


@dataclass(frozen=True)
class ResidueClosure:
    """Closure of the pair-generator semigroup modulo q.

    ``matrix_keys`` holds every reachable matrix as a sorted array of
    packed keys; ``residues`` is the set of realized bottom-right entries.
    """

    q: int
    matrix_keys: np.ndarray
    residues: FrozenSet[int]

    @property
    def matrix_count(self) -> int:
        return int(self.matrix_keys.size)

    def matrices(self) -> Iterator[Tuple[int, int, int, int]]:
        for key in self.matrix_keys:
            yield _unpack_key(int(key), self.q)

    def contains_matrix(self, entries: Tuple[int, int, int, int]) -> bool:
        key = _pack_entries(entries, self.q)
        idx = np.searchsorted(self.matrix_keys, key)
        return bool(idx < self.matrix_keys.size and self.matrix_keys[idx] == key)


def _pack_entries(entries: Tuple[int, int, int, int], q: int) -> int:
    a, b, c, d = (int(x) % q for x in entries)
    return ((a * q + b) * q + c) * q + d


def _unpack_key(key: int, q: int) -> Tuple[int, int, int, int]:
    d = key % q
    key //= q
    c = key % q
    key //= q
    b = key % q
    return (key // q, b, c, d)


def _generator_entries(alphabet: Alphabet, q: int):
    seen = set()
    for u in alphabet.digits:
        for v in alphabet.digits:
            g = (1 % q, v % q, u % q, (u * v + 1) % q)
            seen.add(g)
    return sorted(seen)


def _closure_waves(alphabet: Alphabet, q: int, stop_when_full: bool):
    """Run the breadth-first closure; returns (visited keys, residue mask).

    With ``stop_when_full`` the walk stops as soon as every residue class
    is realized; the matrix set is then incomplete but the residue set is
    already exact, since residues only accumulate.
    """
    gens = _generator_entries(alphabet, q)
    ga = np.array([g[0] for g in gens], dtype=np.int64)
    gb = np.array([g[1] for g in gens], dtype=np.int64)
    gc = np.array([g[2] for g in gens], dtype=np.int64)
    gd = np.array([g[3] for g in gens], dtype=np.int64)

    mask = np.zeros(q, dtype=bool)
    identity = _pack_entries((1, 0, 0, 1), q)
    visited = np.array([identity], dtype=np.int64)
    frontier = visited

    while frontier.size:
        a = frontier // (q * q * q)
        b = (frontier // (q * q)) % q
        c = (frontier // q) % q
        d = frontier % q

        batches = []
        for gi in range(ga.size):
            na = (a * ga[gi] + b * gc[gi]) % q
            nb = (a * gb[gi] + b * gd[gi]) % q
            nc = (c * ga[gi] + d * gc[gi]) % q
            nd = (c * gb[gi] + d * gd[gi]) % q
            mask[nd] = True
            batches.append(((na * q + nb) * q + nc) * q + nd)

        if stop_when_full and mask.all():
            return visited, mask

        cand = np.unique(np.concatenate(batches))
        pos = np.searchsorted(visited, cand)
        pos_clipped = np.minimum(pos, visited.size - 1)
        fresh = cand[visited[pos_clipped] != cand]
        if fresh.size:
            visited = np.union1d(visited, fresh)
        frontier = fresh
    return visited, mask


def _validate_modulus(q: int) -> None:
    if q < 1:
        raise DomainError("modulus must be >= 1, got %r" % (q,))
    if q > _Q_CAP:
        raise ResourceLimitError("modulus %d exceeds the packed-state cap %d" % (q, _Q_CAP))


def semigroup_closure_mod_q(alphabet: Alphabet, q: int) -> ResidueClosure:
    """Full closure of the even-word matrix semigroup modulo q."""
    _validate_modulus(q)
    if q == 1:
        return ResidueClosure(q=1, matrix_keys=np.zeros(1, dtype=np.int64),
                              residues=frozenset({0}))
    visited, mask = _closure_waves(alphabet, q, stop_when_full=False)
    return ResidueClosure(q=q, matrix_keys=visited,
                          residues=frozenset(int(r) for r in np.flatnonzero(mask)))


@lru_cache(maxsize=4096)
def _residues_cached(digits: Tuple[int, ...], q: int) -> FrozenSet[int]:
    if q == 1:
        return frozenset({0})
    _, mask = _closure_waves(Alphabet(digits), q, stop_when_full=True)
    return frozenset(int(r) for r in np.flatnonzero(mask))


def residues_mod_q(alphabet: Alphabet, q: int) -> FrozenSet[int]:
    """Residue classes mod q realized by continuants of even-length words.

    Results are memoized per (alphabet, q); the underlying walk stops
    early once all of Z/q is realized, which is the common case.
    """
    _validate_modulus(q)
    return _residues_cached(alphabet.digits, q)


def first_obstruction(d: int, alphabet: Alphabet, q_max: int) -> Optional[int]:
    """Smallest q in [2, q_max] whose residue set misses d mod q, if any."""
    if q_max < 2:
        raise DomainError("q_max must be >= 2, got %r" % (q_max,))
    for q in range(2, q_max + 1):
        if (d % q) not in residues_mod_q(alphabet, q):
            return q
    return None


def is_admissible(d: int, alphabet: Alphabet, q_max: int) -> bool:
    """Whether d mod q is realized for every modulus q in [2, q_max]."""
    return first_obstruction(d, alphabet, q_max) is None


def residue_profile(alphabet: Alphabet, q_max: int):
    """Rows (q, residue_count, full) for q in [2, q_max]."""
    if q_max < 2:
        raise DomainError("q_max must be >= 2, got %r" % (q_max,))
    rows = []
    for q in range(2, q_max + 1):
        res = residues_mod_q(alphabet, q)
        rows.append((q, len(res), len(res) == q))
    return rows


def write_residue_profile_csv(alphabet: Alphabet, q_max: int, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "residue_count", "full"])
        for q, count, full in residue_profile(alphabet, q_max):
            writer.writerow([q, count, int(full)])


def write_admissibility_csv(alphabet: Alphabet, values: Sequence[int],
                            q_max: int, path: str) -> None:
    """One row per tested integer: value, verdict, and the witness modulus
    (empty when admissible)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "admissible", "obstruction_q"])
        for d in values:
            q = first_obstruction(d, alphabet, q_max)
            writer.writerow([d, int(q is None), "" if q is None else q])
