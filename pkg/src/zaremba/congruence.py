"""Pair-correlation counts of a vector set modulo q.

For a finite set Xi of coprime integer pairs (u, U), the count

    R_q = #{ (x, y) in Xi^2 : x is proportional to y mod q }

(proportional meaning u V - U v = 0 mod q) can be computed directly in
O(|Xi|^2), or through characters: stratify Xi by r = gcd(u, q), reduce to
the modulus q0 = q / r where u/r is invertible, and R_q becomes an
average of squared moduli of exponential sums.  The two must agree to an
integer exactly; the character route is kept honest by requiring its
floating-point total to sit within 1e-6 of one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import DomainError, InternalConsistencyError


@dataclass(frozen=True)
class VectorSet:
    """A finite multiset of coprime pairs (u, U) with both entries >= 1."""

    pairs: Tuple[Tuple[int, int], ...]

    def __init__(self, pairs: Sequence[Tuple[int, int]]):
        normalized = tuple((int(u), int(v)) for u, v in pairs)
        if not normalized:
            raise DomainError("vector set must be nonempty")
        for u, v in normalized:
            if u < 1 or v < 1:
                raise DomainError("vector entries must be >= 1, got (%d, %d)" % (u, v))
            if math.gcd(u, v) != 1:
                raise DomainError("vector (%d, %d) is not coprime" % (u, v))
        object.__setattr__(self, "pairs", normalized)

    def __len__(self) -> int:
        return len(self.pairs)


def _validate_q(q: int) -> None:
    if not isinstance(q, int) or isinstance(q, bool) or q < 1:
        raise DomainError("modulus must be a positive integer, got %r" % (q,))


def rq_direct(xi: VectorSet, q: int) -> int:
    """Pairwise count of proportionality mod q by definition."""
    _validate_q(q)
    count = 0
    for u, bu in xi.pairs:
        for v, bv in xi.pairs:
            if (u * bv - bu * v) % q == 0:
                count += 1
    return count


def _divisors(q: int):
    small, large = [], []
    d = 1
    while d * d <= q:
        if q % d == 0:
            small.append(d)
            if d != q // d:
                large.append(q // d)
        d += 1
    return small + large[::-1]


def rq_charsum(xi: VectorSet, q: int) -> int:
    """The same count through exponential sums.

    Pairs can only be proportional mod q when gcd(u, q) matches, so the
    set splits into strata indexed by r | q.  Within a stratum u/r is
    invertible mod q0 = q/r and proportionality of (u, U), (v, V) becomes
    U u^(-1) = V v^(-1) mod q0, detected by averaging e(k t / q0) over k.
    The float total must land within 1e-6 of an integer or the routine
    refuses the answer.
    """
    _validate_q(q)
    total = 0.0
    for r in _divisors(q):
        stratum = [(u, bu) for u, bu in xi.pairs if math.gcd(u, q) == r]
        if not stratum:
            continue
        q0 = q // r
        targets = [(bu * pow((u // r) % q0, -1, q0)) % q0 if q0 > 1 else 0
                   for u, bu in stratum]
        for k in range(1, q0 + 1):
            z = 0.0 + 0.0j
            for t in targets:
                z += cmath.exp(2j * cmath.pi * t * k / q0)
            total += (z.real * z.real + z.imag * z.imag) / q0
    nearest = round(total)
    if abs(total - nearest) > 1e-6:
        raise InternalConsistencyError(
            "character-sum count %.9f is not within 1e-6 of an integer" % total)
    return int(nearest)
