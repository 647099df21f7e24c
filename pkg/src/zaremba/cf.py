"""Exact integer machinery for continued fractions over a digit alphabet.

A word is a finite tuple of partial quotients drawn from a fixed alphabet
of positive integers.  The continuant of a word is the denominator of the
finite continued fraction it spells, computed by the classical three-term
recurrence.  Words also act as products of the elementary matrices

    M(d) = [[0, 1], [1, d]]

so that the continuant is the bottom-right entry of the product.  All
arithmetic here is exact; a configurable bit-width guard turns silent
bignum growth into an explicit error for callers that expect machine-word
sized results.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from .errors import ContinuantOverflowError, DomainError

# Digit strings index a tuple; a Word is just that tuple.
Word = Tuple[int, ...]

# Entries wider than this raise unless the caller opts out.  128 unsigned
# bits is far past anything a desk-scale enumeration produces, so hitting
# the guard means the caller asked for something unintended.
DEFAULT_MAX_BITS = 128


def _guard(value: int, max_bits) -> int:
    if max_bits is not None and value.bit_length() > max_bits:
        raise ContinuantOverflowError(
            "integer needs %d bits, guard is %d" % (value.bit_length(), max_bits)
        )
    return value


@dataclass(frozen=True)
class Alphabet:
    """A finite set of allowed partial quotients, kept sorted.

    Digits must be positive integers.  Construction normalizes the input
    to a strictly increasing tuple, so ``Alphabet((2, 1, 2))`` equals
    ``Alphabet((1, 2))``.
    """

    digits: Tuple[int, ...]

    def __init__(self, digits: Iterable[int]):
        seen = sorted(set(digits))
        if not seen:
            raise DomainError("alphabet must contain at least one digit")
        for d in seen:
            if not isinstance(d, int) or isinstance(d, bool) or d < 1:
                raise DomainError("alphabet digits must be positive integers, got %r" % (d,))
        object.__setattr__(self, "digits", tuple(seen))

    @property
    def max_digit(self) -> int:
        return self.digits[-1]

    @property
    def min_digit(self) -> int:
        return self.digits[0]

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __contains__(self, digit) -> bool:
        return digit in self.digits

    def word(self, digits: Sequence[int]) -> Word:
        """Validate a digit sequence against this alphabet and return it as a Word."""
        w = tuple(digits)
        for d in w:
            if d not in self.digits:
                raise DomainError("digit %r not in alphabet %r" % (d, self.digits))
        return w

    def label(self) -> str:
        return ",".join(str(d) for d in self.digits)

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """Parse a comma-separated digit list such as ``"1,2,3,4"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise DomainError("empty alphabet spec %r" % text)
        try:
            digits = [int(p) for p in parts]
        except ValueError:
            raise DomainError("bad alphabet spec %r" % text) from None
        return cls(digits)


@dataclass(frozen=True)
class Mat2:
    """2x2 integer matrix with determinant +1 or -1.

    Every matrix built from words of partial quotients is a product of
    unimodular elementary matrices, so the determinant restriction costs
    nothing and catches construction mistakes early.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det not in (1, -1):
            raise DomainError("determinant must be +1 or -1, got %d" % self.det)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def elementary(cls, digit: int) -> "Mat2":
        if digit < 1:
            raise DomainError("partial quotient must be >= 1, got %r" % (digit,))
        return cls(0, 1, 1, digit)

    def mul(self, other: "Mat2", max_bits=DEFAULT_MAX_BITS) -> "Mat2":
        a = _guard(self.a * other.a + self.b * other.c, max_bits)
        b = _guard(self.a * other.b + self.b * other.d, max_bits)
        c = _guard(self.c * other.a + self.d * other.c, max_bits)
        d = _guard(self.c * other.b + self.d * other.d, max_bits)
        return Mat2(a, b, c, d)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return self.mul(other)

    def norm(self) -> float:
        """Frobenius norm, the size measure used for ensemble windows."""
        return math.sqrt(
            float(self.a) ** 2 + float(self.b) ** 2 + float(self.c) ** 2 + float(self.d) ** 2
        )

    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


def continuant(word: Sequence[int], max_bits=DEFAULT_MAX_BITS) -> int:
    """Denominator of the continued fraction spelled by ``word``.

    Uses the recurrence K() = 1, K(d1) = d1,
    K(d1..dj) = dj * K(d1..d(j-1)) + K(d1..d(j-2)).
    The empty word has continuant 1.  Set ``max_bits=None`` to allow
    unbounded bignum growth.
    """
    prev, cur = 0, 1
    for d in word:
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise DomainError("partial quotients must be positive integers, got %r" % (d,))
        prev, cur = cur, _guard(d * cur + prev, max_bits)
    return cur


def continuant_pair(word: Sequence[int], max_bits=DEFAULT_MAX_BITS) -> Tuple[int, int]:
    """(K(word minus last digit), K(word)) in one pass."""
    prev, cur = 0, 1
    for d in word:
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise DomainError("partial quotients must be positive integers, got %r" % (d,))
        prev, cur = cur, _guard(d * cur + prev, max_bits)
    return prev, cur


def cf_value(word: Sequence[int]) -> Fraction:
    """Exact value of the continued fraction [0; d1, d2, ..., dk].

    The numerator is the continuant of the word with its first digit
    dropped, the denominator is the continuant of the full word; the two
    are automatically coprime.
    """
    w = tuple(word)
    if not w:
        raise DomainError("cf_value needs at least one partial quotient")
    return Fraction(continuant(w[1:], max_bits=None), continuant(w, max_bits=None))


def word_to_matrix(word: Sequence[int], max_bits=DEFAULT_MAX_BITS) -> Mat2:
    """Product of elementary matrices M(d) = [[0,1],[1,d]] along the word.

    The bottom-right entry of the result is the continuant of the word,
    and the determinant is (-1)^len(word).
    """
    m = Mat2.identity()
    for d in word:
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise DomainError("partial quotients must be positive integers, got %r" % (d,))
        m = m.mul(Mat2.elementary(d), max_bits)
    return m


def pair_generator(alphabet: Alphabet, u: int, v: int) -> Mat2:
    """The matrix M(u) M(v) = [[1, v], [u, u*v + 1]] for alphabet digits u, v.

    Products of these generate the even-length-word semigroup; each has
    determinant +1.
    """
    if u not in alphabet or v not in alphabet:
        raise DomainError("pair generator digits (%r, %r) must lie in alphabet %r"
                          % (u, v, alphabet.digits))
    return Mat2(1, v, u, u * v + 1)


def korobov_delta(n: int, m: int) -> int:
    """Indicator that n divides m, written as a normalized exponential sum.

    Equals (1/n) * sum over k = 1..n of exp(2*pi*i*k*m/n), which is 1 when
    n | m and 0 otherwise.  Evaluated exactly via the divisibility test.
    """
    if n < 1:
        raise DomainError("modulus must be >= 1, got %r" % (n,))
    return 1 if m % n == 0 else 0


def korobov_delta_numeric(n: int, m: int) -> complex:
    """Direct numeric evaluation of the defining exponential sum.

    Provided as a cross-check against :func:`korobov_delta`; the real part
    matches the indicator to floating-point accuracy.
    """
    if n < 1:
        raise DomainError("modulus must be >= 1, got %r" % (n,))
    return sum(cmath.exp(2j * cmath.pi * k * m / n) for k in range(1, n + 1)) / n
