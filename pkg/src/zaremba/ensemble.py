"""Independent-factor word ensembles: constructors and verifiers.

An ensemble is an ordered list of word sets whose concatenation map is
injective: picking one word from each factor always yields a distinct
product word, so the product set has exactly the product cardinality.
Fixed-length factors get this for free; the first-crossing prefix cut
gets it from prefix-freeness.  Verification is exhaustive over the
materialized product, capped at 10^7 combinations.

Factor size is measured by the continuant.  Window checks compare each
factor's continuant extremes against configurable brackets of the shape
m / (c A^2) below and c' A^2 m^(1 + 2 eps) above, with every constant a
parameter rather than a baked-in number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cf import Alphabet, Word, continuant
from .errors import DomainError, ResourceLimitError

_PRODUCT_CAP = 10_000_000
_FACTOR_CAP = 10_000_000
_COLLISION_SEARCH_CAP = 2_000_000

Window = Tuple[float, float]


@dataclass(frozen=True)
class FactoredEnsemble:
    """Ordered factors of words, optionally with per-factor norm windows.

    ``product_size`` is the number of factor combinations; unique
    factorization means the concatenation products are that many distinct
    words, which :func:`verify_independence` checks exhaustively.
    """

    factors: Tuple[Tuple[Word, ...], ...]
    norm_windows: Optional[Tuple[Optional[Window], ...]] = None
    product_size: int = field(init=False)

    def __post_init__(self):
        if not self.factors or any(not f for f in self.factors):
            raise DomainError("ensemble needs at least one nonempty factor")
        factors = tuple(tuple(tuple(w) for w in f) for f in self.factors)
        object.__setattr__(self, "factors", factors)
        size = 1
        for f in factors:
            size *= len(f)
        object.__setattr__(self, "product_size", size)
        if self.norm_windows is not None and len(self.norm_windows) != len(factors):
            raise DomainError("norm_windows must match the number of factors")


@dataclass(frozen=True)
class EnsembleParams:
    """Scale parameters and configurable constants for window checks.

    m1, m2, m4 are the target sizes of the leading, second, and fourth
    factors; epsilon0 is the small exponent slack.  The c-constants are
    desk-scale stand-ins for the absolute constants of the size windows
    (70 A^2 and the 1.01 exponent cap on the leading factor, 160 A^2 and
    73 A^2 on the remainder, 150 A^2 on the inner factors).  n_limit, when
    set, scales the remainder window of a two-factor split.
    """

    m1: float = 1.0
    m2: float = 1.0
    m4: float = 1.0
    epsilon0: float = 0.0002
    n_limit: Optional[int] = None
    c_lead_lower: float = 70.0
    c_lead_upper: float = 1.01
    c_inner_lower: float = 150.0
    c_rem_lower: float = 160.0
    c_upper: float = 73.0

    def __post_init__(self):
        for name in ("m1", "m2", "m4"):
            if getattr(self, name) < 1.0:
                raise DomainError("%s must be >= 1, got %r" % (name, getattr(self, name)))
        if not (0.0 < self.epsilon0 < 0.0004):
            raise DomainError("epsilon0 must lie in (0, 0.0004), got %r" % (self.epsilon0,))
        for name in ("c_lead_lower", "c_lead_upper", "c_inner_lower",
                     "c_rem_lower", "c_upper"):
            if getattr(self, name) <= 0.0:
                raise DomainError("%s must be positive" % name)

    def leading_window(self, alphabet: Alphabet) -> Window:
        a2 = alphabet.max_digit ** 2
        return (self.m1 / (self.c_lead_lower * a2),
                self.c_lead_upper * self.m1 ** (1.0 + 2.0 * self.epsilon0))

    def remainder_window(self, alphabet: Alphabet) -> Optional[Window]:
        if self.n_limit is None:
            return None
        a2 = alphabet.max_digit ** 2
        lo = self.n_limit / (self.c_rem_lower * a2 * self.m1 ** (1.0 + 2.0 * self.epsilon0))
        hi = self.c_upper * a2 * self.n_limit / self.m1
        return (lo, hi)

    def second_window(self, alphabet: Alphabet) -> Window:
        a2 = alphabet.max_digit ** 2
        lo = self.m2 / (self.c_inner_lower * a2 * self.m1 ** (2.0 * self.epsilon0))
        hi = self.c_upper * a2 * self.m2 * (self.m1 * self.m2) ** (2.0 * self.epsilon0)
        return (lo, hi)

    def fourth_window(self, alphabet: Alphabet) -> Window:
        a2 = alphabet.max_digit ** 2
        return (self.m4 ** (1.0 - self.epsilon0) / (self.c_inner_lower * a2),
                self.c_upper * a2 * self.m4)

    def derived_windows(self, alphabet: Alphabet,
                        factor_count: int) -> Tuple[Optional[Window], ...]:
        """Standard window layout by factor count: a two-factor split is
        leading + remainder; a four-factor split is leading, second,
        unconstrained, fourth.  Other shapes get no derived windows."""
        if factor_count == 2:
            return (self.leading_window(alphabet), self.remainder_window(alphabet))
        if factor_count == 4:
            return (self.leading_window(alphabet), self.second_window(alphabet),
                    None, self.fourth_window(alphabet))
        return tuple([None] * factor_count)


def build_fixed_length_ensemble(alphabet: Alphabet,
                                lengths: Sequence[int]) -> FactoredEnsemble:
    """Factors Ω_i = all words of length lengths[i] over the alphabet.

    Length bookkeeping makes the factorization unique: the cut points of
    any concatenation are determined by the fixed lengths.
    """
    if not lengths:
        raise DomainError("lengths must be nonempty")
    factors = []
    for n in lengths:
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise DomainError("factor lengths must be positive integers, got %r" % (n,))
        if len(alphabet) ** n > _FACTOR_CAP:
            raise ResourceLimitError(
                "factor of %d^%d words exceeds the materialization cap" % (len(alphabet), n))
        factors.append(tuple(itertools.product(alphabet.digits, repeat=n)))
    return FactoredEnsemble(factors=tuple(factors))


@dataclass(frozen=True)
class SplitReport:
    """Measurements of a first-crossing prefix cut."""

    size: int
    min_continuant: int
    max_continuant: int
    growth_bound: float
    growth_bound_ok: bool
    odd_length_count: int
    max_length: int


def split_by_norm(alphabet: Alphabet, n_limit: int, m1: float):
    """All minimal words whose continuant first reaches m1.

    Walks the digit tree, expanding only below the threshold, and collects
    each child that crosses it.  The result is an antichain in the prefix
    order, hence prefix-free.  One growth step multiplies the continuant
    by at most max_digit + 1, so the maximum collected continuant stays
    below 2 * max_digit * m1; the report verifies this bound.  Word
    lengths here have either parity, and the report counts the odd ones
    explicitly since only even-length words correspond to pair-generator
    products.
    """
    if m1 <= 1:
        raise DomainError("m1 must exceed 1, got %r" % (m1,))
    if not m1 < n_limit:
        raise DomainError("m1 must be below n_limit, got m1=%r, n_limit=%r" % (m1, n_limit))

    collected: List[Word] = []
    stack: List[Tuple[int, int, Word]] = [(0, 1, ())]
    while stack:
        prev, cur, word = stack.pop()
        for d in alphabet.digits:
            child = d * cur + prev
            grown = word + (d,)
            if child >= m1:
                collected.append(grown)
            else:
                stack.append((cur, child, grown))
            if len(collected) + len(stack) > _PRODUCT_CAP:
                raise ResourceLimitError("prefix cut at m1=%r exceeds the size cap" % (m1,))

    collected.sort()
    conts = [continuant(w) for w in collected]
    bound = 2.0 * alphabet.max_digit * m1
    report = SplitReport(
        size=len(collected),
        min_continuant=min(conts),
        max_continuant=max(conts),
        growth_bound=bound,
        growth_bound_ok=max(conts) <= bound,
        odd_length_count=sum(1 for w in collected if len(w) % 2 == 1),
        max_length=max(len(w) for w in collected),
    )
    return tuple(collected), report


# ---------------------------------------------------------------------------
# independence

def _factor_codes(factors, base: int):
    """Per-factor integer codes: word (d1..dk) -> sum of d_i base^(k-i).

    Digits in [1, base) make this injective across lengths, and the code
    of a concatenation is code(u) * base^len(v) + code(v)."""
    coded = []
    for f in factors:
        codes = []
        lens = []
        for w in f:
            c = 0
            for d in w:
                c = c * base + d
            codes.append(c)
            lens.append(len(w))
        coded.append((codes, lens))
    return coded


def _distinct_product_count(ensemble: FactoredEnsemble) -> int:
    base = max((d for f in ensemble.factors for w in f for d in w), default=1) + 1
    total_bits = sum(max(len(w) for w in f) for f in ensemble.factors) \
        * math.log2(base)
    coded = _factor_codes(ensemble.factors, base)

    if total_bits <= 62:
        acc = np.zeros(1, dtype=np.int64)
        for codes, lens in coded:
            codes_a = np.array(codes, dtype=np.int64)
            mult = np.array([base ** k for k in lens], dtype=np.int64)
            acc = (acc[:, None] * mult[None, :] + codes_a[None, :]).ravel()
        return int(np.unique(acc).size)

    # digit values too large for packed 64-bit codes: exact bignum fallback
    products = {0}
    for codes, lens in coded:
        mults = [base ** k for k in lens]
        products = {p * mults[i] + codes[i]
                    for p in products for i in range(len(codes))}
    return len(products)


def verify_independence(ensemble: FactoredEnsemble) -> bool:
    """True iff all factor combinations concatenate to distinct words.

    Materializes the product through injective integer coding and counts
    distinct outcomes; independence holds exactly when that count equals
    ``product_size``.  Products beyond 10^7 combinations are refused.
    """
    if ensemble.product_size > _PRODUCT_CAP:
        raise ResourceLimitError(
            "product of %d combinations exceeds the cap %d"
            % (ensemble.product_size, _PRODUCT_CAP))
    return _distinct_product_count(ensemble) == ensemble.product_size


def find_collision(ensemble: FactoredEnsemble):
    """A concrete witness of dependence: two different factor tuples whose
    concatenations agree, or None if the ensemble is independent.  Only
    available for products up to 2 * 10^6 combinations."""
    if ensemble.product_size > _COLLISION_SEARCH_CAP:
        raise ResourceLimitError("collision search capped at %d combinations"
                                 % _COLLISION_SEARCH_CAP)
    seen: Dict[Word, Tuple[Word, ...]] = {}
    for combo in itertools.product(*ensemble.factors):
        word = tuple(d for part in combo for d in part)
        if word in seen and seen[word] != combo:
            return seen[word], combo
        seen.setdefault(word, combo)
    return None


# ---------------------------------------------------------------------------
# window and cardinality diagnostics

@dataclass(frozen=True)
class FactorWindowCheck:
    index: int
    size: int
    min_continuant: int
    max_continuant: int
    odd_length_count: int
    window: Optional[Window]
    inside: Optional[bool]


@dataclass(frozen=True)
class WindowReport:
    checks: Tuple[FactorWindowCheck, ...]

    @property
    def all_inside(self) -> bool:
        return all(c.inside for c in self.checks if c.inside is not None)


def _factor_extremes(factor) -> Tuple[int, int, int]:
    lo, hi, odd = None, None, 0
    for w in factor:
        c = continuant(w, max_bits=None)
        lo = c if lo is None else min(lo, c)
        hi = c if hi is None else max(hi, c)
        odd += len(w) % 2
    return lo, hi, odd


def verify_norm_windows(ensemble: FactoredEnsemble,
                        params: Optional[EnsembleParams] = None,
                        alphabet: Optional[Alphabet] = None) -> WindowReport:
    """Measure each factor's continuant extremes against its window.

    Windows come from the ensemble itself when set; otherwise, given
    ``params`` and ``alphabet``, the standard layout for the factor count
    is derived.  Factors without a window are reported with measurements
    only (``inside`` is None).
    """
    windows: Sequence[Optional[Window]]
    if ensemble.norm_windows is not None:
        windows = ensemble.norm_windows
    elif params is not None and alphabet is not None:
        windows = params.derived_windows(alphabet, len(ensemble.factors))
    else:
        windows = [None] * len(ensemble.factors)

    checks = []
    for i, factor in enumerate(ensemble.factors):
        lo, hi, odd = _factor_extremes(factor)
        window = windows[i]
        inside = None
        if window is not None:
            inside = window[0] <= lo and hi <= window[1]
        checks.append(FactorWindowCheck(
            index=i, size=len(factor), min_continuant=lo, max_continuant=hi,
            odd_length_count=odd, window=window, inside=inside))
    return WindowReport(checks=tuple(checks))


@dataclass(frozen=True)
class FactorExponent:
    index: int
    size: int
    max_continuant: int
    exponent: float
    reference: float

    @property
    def deficit(self) -> float:
        return self.reference - self.exponent


def factor_cardinality_check(ensemble: FactoredEnsemble, delta_hat: float,
                             params: Optional[EnsembleParams] = None
                             ) -> List[FactorExponent]:
    """Observed size exponents log|Ω_i| / log(max continuant) against the
    reference 2 * delta_hat.  Diagnostic only; no pass/fail, since the
    comparison constant is not effective.  Singleton factors report
    exponent 0."""
    if not (0.0 < delta_hat < 1.0):
        raise DomainError("delta_hat must lie in (0, 1), got %r" % (delta_hat,))
    del params  # reserved for future constant overrides
    rows = []
    for i, factor in enumerate(ensemble.factors):
        _, hi, _ = _factor_extremes(factor)
        if len(factor) > 1 and hi > 1:
            exponent = math.log(len(factor)) / math.log(hi)
        else:
            exponent = 0.0
        rows.append(FactorExponent(index=i, size=len(factor), max_continuant=hi,
                                   exponent=exponent, reference=2.0 * delta_hat))
    return rows


def ensemble_report(ensemble: FactoredEnsemble,
                    params: Optional[EnsembleParams] = None,
                    alphabet: Optional[Alphabet] = None,
                    delta_hat: Optional[float] = None) -> dict:
    """JSON-ready summary: factor sizes, continuant extremes, window
    verdicts, independence, and exponent diagnostics."""
    window_report = verify_norm_windows(ensemble, params, alphabet)
    out = {
        "factor_count": len(ensemble.factors),
        "product_size": ensemble.product_size,
        "factors": [
            {
                "index": c.index,
                "size": c.size,
                "min_continuant": c.min_continuant,
                "max_continuant": c.max_continuant,
                "odd_length_count": c.odd_length_count,
                "window": list(c.window) if c.window is not None else None,
                "inside_window": c.inside,
            }
            for c in window_report.checks
        ],
    }
    try:
        out["independent"] = verify_independence(ensemble)
    except ResourceLimitError:
        out["independent"] = None
        out["independence_note"] = "product too large for exhaustive verification"
    if delta_hat is not None:
        out["cardinality"] = [
            {
                "index": r.index,
                "size": r.size,
                "max_continuant": r.max_continuant,
                "exponent": r.exponent,
                "reference": r.reference,
                "deficit": r.deficit,
            }
            for r in factor_cardinality_check(ensemble, delta_hat)
        ]
    return out
