"""Bracketing the Hausdorff dimension of a bounded-quotient fractal set.

The dimension of the set of irrationals whose partial quotients stay in a
finite alphabet is pinned between the roots of two pressure equations.
With f_n(s) = sum over length-n words w of continuant(w)^(-2s):

* s_upper solves f_n(s) = 1, and
* s_lower solves f_n(s) = 2^(2s),

because continuants are submultiplicative under concatenation and
supermultiplicative up to a factor 2.  Both roots converge to the true
dimension as n grows, pinching at rate O(1/n).

For small |A|^n the partition sum is a direct pass over all continuants.
Past that the word is split in half and the concatenation identity
    K(uv) = K(u) K(v) + K(u-) K(v-)
(with one boundary digit dropped on each side) turns f_n into a double
sum over the two halves, evaluated by a binomial series in the product of
the half ratios.  Each half needs length at least 2 so the ratios stay
strictly below 1; the split path therefore starts at n = 4.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
from numba import njit

from .cf import Alphabet
from .errors import DomainError, InternalConsistencyError, ResourceLimitError

BISECT_TOL = 1e-10

_S_EPS = 1e-9
_DIRECT_LIMIT = 1 << 21
_SPLIT_LIMIT = 20_000_000
_SERIES_KMAX = 2048
_MOMENT_CUTOFF = 1e-21


@dataclass(frozen=True)
class PressureBracket:
    """A two-sided dimension estimate from depth-n pressure roots."""

    n: int
    s_lower: float
    s_upper: float
    width: float
    evaluations: int
    clamped: bool = False
    converged: bool = True


@njit(cache=True)
def _pow_sum(qv, s):
    # compensated sum of qv[i] ** (-2 s)
    total = 0.0
    comp = 0.0
    for i in range(qv.shape[0]):
        y = qv[i] ** (-2.0 * s) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@njit(cache=True)
def _moment_sums(qv, pv, s, kmax, cutoff):
    # out[k] = sum_i qv[i]**(-2s) * (pv[i]/qv[i])**k, each compensated;
    # per-item tails below cutoff are dropped, which costs < len * cutoff
    # per moment in absolute terms
    out = np.zeros(kmax)
    comp = np.zeros(kmax)
    for i in range(qv.shape[0]):
        u = qv[i] ** (-2.0 * s)
        x = pv[i] / qv[i]
        for k in range(kmax):
            if u < cutoff:
                break
            y = u - comp[k]
            t = out[k] + y
            comp[k] = (t - out[k]) - y
            out[k] = t
            u *= x
    return out


def _check_enumeration_size(alphabet: Alphabet, length: int, cap: int) -> None:
    if len(alphabet) ** length > cap:
        raise ResourceLimitError(
            "enumerating %d-letter words over %d digits exceeds the cap of %d"
            % (length, len(alphabet), cap))
    # continuants of the enumerated half must fit int64
    worst = 1
    prev = 0
    for _ in range(length):
        prev, worst = worst, alphabet.max_digit * worst + prev
        if worst >= 2 ** 62:
            raise ResourceLimitError(
                "continuants of length-%d words over %r overflow 64 bits"
                % (length, alphabet.digits))


@lru_cache(maxsize=3)
def _pq_arrays(digits: Tuple[int, ...], length: int):
    """(K(w), K(w minus last digit)) over all words w of the given length,
    as float64 arrays in a fixed enumeration order."""
    k = len(digits)
    P = np.zeros(1, dtype=np.int64)
    C = np.ones(1, dtype=np.int64)
    for _ in range(length):
        NP = np.empty(C.size * k, dtype=np.int64)
        NC = np.empty(C.size * k, dtype=np.int64)
        for i in range(k):
            NP[i::k] = C
            NC[i::k] = digits[i] * C + P
        P, C = NP, NC
    return C.astype(np.float64), P.astype(np.float64)


def _series_coefficient_step(c: float, s: float, k: int) -> float:
    # binomial coefficients of (1 + z)^(-2s): c_k = c_{k-1} (-2s - k + 1) / k
    return c * (-2.0 * s - k + 1.0) / k


def partition_sum(alphabet: Alphabet, n: int, s: float) -> float:
    """f_n(s) = sum of continuant(w)^(-2s) over all length-n words.

    Exact enumeration when |A|^n is small; otherwise the split-identity
    series described in the module docstring, accurate to ~1e-12 relative
    at desk scale.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError("word length must be a positive integer, got %r" % (n,))
    if not (0.0 < s < 1.0):
        raise DomainError("s must lie in (0, 1), got %r" % (s,))

    size = len(alphabet) ** n
    if n <= 3 or size <= _DIRECT_LIMIT:
        _check_enumeration_size(alphabet, n, max(_DIRECT_LIMIT, _SPLIT_LIMIT))
        qv, _ = _pq_arrays(alphabet.digits, n)
        return float(_pow_sum(qv, s))

    h1 = n // 2
    h2 = n - h1
    _check_enumeration_size(alphabet, h2, _SPLIT_LIMIT)
    qa, pa = _pq_arrays(alphabet.digits, h1)
    moments_a = _moment_sums(qa, pa, s, _SERIES_KMAX, _MOMENT_CUTOFF)
    if h2 == h1:
        moments_b = moments_a
    else:
        qb, pb = _pq_arrays(alphabet.digits, h2)
        moments_b = _moment_sums(qb, pb, s, _SERIES_KMAX, _MOMENT_CUTOFF)

    total = 0.0
    comp = 0.0
    c = 1.0
    quiet = 0
    for k in range(_SERIES_KMAX):
        term = c * moments_a[k] * moments_b[k]
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < 1e-17 * abs(total):
            quiet += 1
            if quiet >= 3 and k >= 8:
                return total
        else:
            quiet = 0
        c = _series_coefficient_step(c, s, k + 1)
    raise InternalConsistencyError(
        "partition sum series failed to converge in %d terms" % _SERIES_KMAX)


def _bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    # fn is decreasing; fn(lo) > 0 > fn(hi) on entry
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dimension_bracket(alphabet: Alphabet, n: int) -> PressureBracket:
    """Bracket the dimension between the depth-n pressure roots.

    Roots are located by bisection to ``BISECT_TOL``.  When a root falls
    outside (0, 1) the bracket clamps to the domain edge and says so via
    the ``clamped`` flag; single-digit alphabets clamp both roots toward
    zero because every partition sum is already below 1.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError("bracket depth must be a positive integer, got %r" % (n,))

    evals = [0]

    def log_f(s: float) -> float:
        evals[0] += 1
        return math.log(partition_sum(alphabet, n, s))

    lo, hi = _S_EPS, 1.0 - _S_EPS
    clamped = False

    def upper_gap(s):
        return log_f(s)

    def lower_gap(s):
        return log_f(s) - 2.0 * s * math.log(2.0)

    # root of f = 1
    if upper_gap(lo) <= 0.0:
        s_upper = lo
        clamped = True
    elif upper_gap(hi) >= 0.0:
        s_upper = hi
        clamped = True
    else:
        s_upper = _bisect(upper_gap, lo, hi, BISECT_TOL)

    # root of f = 2^(2s)
    if lower_gap(lo) <= 0.0:
        s_lower = lo
        clamped = True
    elif lower_gap(hi) >= 0.0:
        s_lower = hi
        clamped = True
    else:
        s_lower = _bisect(lower_gap, lo, hi, BISECT_TOL)

    if s_lower > s_upper + 1e-9:
        raise InternalConsistencyError(
            "pressure roots out of order: s_lower=%.12f > s_upper=%.12f" % (s_lower, s_upper))
    s_lower = min(s_lower, s_upper)
    return PressureBracket(
        n=n,
        s_lower=s_lower,
        s_upper=s_upper,
        width=s_upper - s_lower,
        evaluations=evals[0],
        clamped=clamped,
    )


def _depth_schedule(n_max: int) -> List[int]:
    ns = []
    n = 1
    while n <= n_max:
        ns.append(n)
        n *= 2
    if ns[-1] != n_max:
        ns.append(n_max)
    return ns


def estimate_dimension(alphabet: Alphabet, target_width: float,
                       n_max: int = 32) -> PressureBracket:
    """Deepen the bracket along a doubling schedule until it is narrower
    than ``target_width`` or the depth cap is hit.

    Returns the final bracket with cumulative evaluation count; if the cap
    was reached first the result carries ``converged=False``.  Doubling
    the depth never widens either side, so the last bracket is the best.
    """
    if target_width <= 0.0:
        raise DomainError("target width must be positive, got %r" % (target_width,))
    if not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 1:
        raise DomainError("depth cap must be a positive integer, got %r" % (n_max,))

    total_evals = 0
    bracket = None
    for n in _depth_schedule(n_max):
        try:
            deeper = dimension_bracket(alphabet, n)
        except ResourceLimitError:
            # the schedule outgrew the enumeration cap; the last completed
            # depth is the best achievable bracket
            if bracket is None:
                raise
            break
        bracket = deeper
        total_evals += bracket.evaluations
        if bracket.width <= target_width:
            return replace(bracket, evaluations=total_evals, converged=True)
    return replace(bracket, evaluations=total_evals, converged=False)


def convergence_table(alphabet: Alphabet, target_width: float, n_max: int = 32):
    """Per-depth rows (n, s_lower, s_upper, width, wall_time) along the
    schedule used by :func:`estimate_dimension`."""
    if target_width <= 0.0:
        raise DomainError("target width must be positive, got %r" % (target_width,))
    rows = []
    for n in _depth_schedule(n_max):
        start = time.perf_counter()
        try:
            b = dimension_bracket(alphabet, n)
        except ResourceLimitError:
            if not rows:
                raise
            break
        rows.append((n, b.s_lower, b.s_upper, b.width, time.perf_counter() - start))
        if b.width <= target_width:
            break
    return rows


def write_convergence_csv(alphabet: Alphabet, target_width: float,
                          n_max: int, path: str) -> None:
    rows = convergence_table(alphabet, target_width, n_max)
    with open(path, "w") as fh:
        fh.write("n,s_lower,s_upper,width,wall_time\n")
        for n, sl, su, w, dt in rows:
            fh.write("%d,%.10f,%.10f,%.10f,%.3f\n" % (n, sl, su, w, dt))
