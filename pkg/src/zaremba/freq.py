"""Dirichlet decomposition of frequencies and windowed exponential sums.

Every frequency theta in [0, 1) splits, relative to a bound N and a
geometric scale ladder Q_j = q1**j, into a rational center a/q plus a
half-integer offset and a small remainder:

    theta = a/q + l/(2N) + lambda/N   (mod 1)

where a/q is the best rational approximation with q*Q_1 <= sqrt(N), l is
the unique integer with l/(2N) within 1/(4N) of the residual, and lambda
lands in (-1/4, 1/4].  The pair (q, l) places theta in a cell indexed by
the smallest rungs of the ladder that dominate q and |l|.

The decomposition is computed in exact rational arithmetic on the binary
value of the input double, so reconstruction is exact up to float
rounding and every stated range check is an honest assertion rather than
a tolerance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from numba import njit

from .census import Histogram
from .errors import DomainError, InternalConsistencyError


@dataclass(frozen=True)
class ScaleSequence:
    """The ladder Q_0 = 0, Q_j = q1**j for j >= 1."""

    q1: int

    def __post_init__(self):
        if not isinstance(self.q1, int) or isinstance(self.q1, bool) or self.q1 < 2:
            raise DomainError("scale base must be an integer >= 2, got %r" % (self.q1,))

    def Q(self, j: int) -> int:
        if j < 0:
            raise DomainError("scale index must be >= 0, got %r" % (j,))
        return 0 if j == 0 else self.q1 ** j


@dataclass(frozen=True)
class DirichletData:
    """One decomposed frequency: theta = a/q + l/(2N) + lam/N (mod 1)."""

    theta: float
    a: int
    q: int
    l: int
    lam: float


@dataclass(frozen=True)
class CellIndex:
    """Ladder cell of a decomposed frequency.

    alpha is the smallest j >= 1 with q <= Q_j, beta the smallest j >= 1
    with |l| <= Q_j; l = 0 therefore always lands in beta = 1.
    """

    alpha: int
    beta: int


def _best_convergent(theta: Fraction, q_bound: int) -> Tuple[int, int]:
    """Last continued-fraction convergent of theta with denominator at
    most q_bound.  theta is in [0, 1), so the first convergent is 0/1 and
    the result always exists."""
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    best = (0, 1)
    a, b = theta.denominator, theta.numerator
    while b > 0:
        digit, rem = divmod(a, b)
        a, b = b, rem
        p_next = digit * p_cur + p_prev
        q_next = digit * q_cur + q_prev
        if q_next > q_bound:
            break
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        best = (p_cur, q_cur)
    return best


def dirichlet_decompose(theta: float, n_limit: int, scale: ScaleSequence) -> DirichletData:
    """Split theta into rational center, half-integer offset, and remainder.

    Requires 0 <= theta < 1 and n_limit >= q1**2 (so at least the trivial
    denominator 1 fits under sqrt(N)/Q_1).  The center a/q is the best
    convergent of theta with (q * Q_1)**2 <= N, taken mod 1 so a ranges in
    [0, q) with gcd(a, q) = 1.  The offset l is the unique integer in
    [2x - 1/2, 2x + 1/2) for x = N * (theta - a/q), computed exactly, and
    lam = x - l/2 falls in (-1/4, 1/4].  Range violations after the exact
    computation are internal errors, not input errors.
    """
    if not (0.0 <= theta < 1.0):
        raise DomainError("theta must lie in [0, 1), got %r" % (theta,))
    if n_limit < scale.q1 ** 2:
        raise DomainError("n_limit %d is below q1^2 = %d" % (n_limit, scale.q1 ** 2))

    exact = Fraction(theta)
    q_bound = math.isqrt(n_limit // (scale.q1 * scale.q1))
    a_raw, q = _best_convergent(exact, q_bound)
    a = a_raw % q

    x = n_limit * (exact - Fraction(a_raw, q))
    l = math.ceil(2 * x - Fraction(1, 2))
    lam_exact = x - Fraction(l, 2)

    if not (q >= 1 and 0 <= a < q and math.gcd(a, q) == 1):
        raise InternalConsistencyError("convergent (%d, %d) malformed" % (a, q))
    if (q * scale.q1) ** 2 > n_limit:
        raise InternalConsistencyError("convergent denominator %d escapes sqrt(N)/Q1" % q)
    if not (Fraction(-1, 4) < lam_exact <= Fraction(1, 4)):
        raise InternalConsistencyError("remainder %r escapes (-1/4, 1/4]" % (lam_exact,))
    # |l| <= 3 Q1 sqrt(N) / q, guaranteed by best approximation; checked
    # exactly via (|l| q)^2 <= 9 Q1^2 N
    if (abs(l) * q) ** 2 > 9 * scale.q1 ** 2 * n_limit:
        raise InternalConsistencyError(
            "offset l=%d too large for the approximation quality of %d/%d" % (l, a, q))

    return DirichletData(theta=theta, a=a, q=q, l=l, lam=float(lam_exact))


def reconstruct(data: DirichletData, n_limit: int) -> float:
    """Fractional part of a/q + l/(2N) + lam/N; inverse of the decomposition."""
    value = data.a / data.q + data.l / (2.0 * n_limit) + data.lam / n_limit
    return value % 1.0


def cell_of(data: DirichletData, scale: ScaleSequence) -> CellIndex:
    alpha = 1
    rung = scale.q1
    while data.q > rung:
        alpha += 1
        rung *= scale.q1
    beta = 1
    rung = scale.q1
    while abs(data.l) > rung:
        beta += 1
        rung *= scale.q1
    return CellIndex(alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# exponential sums

Multiplicities = Union[Mapping[int, int], Histogram]


def _multiplicity_arrays(multiplicities: Multiplicities):
    if isinstance(multiplicities, Histogram):
        pairs = list(multiplicities.items())
    else:
        pairs = sorted((int(d), int(r)) for d, r in multiplicities.items())
    if not pairs:
        raise DomainError("multiplicities must be non-empty")
    values = np.array([p[0] for p in pairs], dtype=np.float64)
    weights = np.array([p[1] for p in pairs], dtype=np.float64)
    if (values < 1).any():
        raise DomainError("multiplicity keys must be positive integers")
    if (weights < 0).any():
        raise DomainError("multiplicities must be nonnegative")
    return values, weights


@njit(cache=True)
def _weighted_trig_sum(values, weights, theta):
    # compensated accumulation of sum_d r(d) exp(2 pi i d theta); the
    # phase is reduced per term to keep the argument small
    re_total = 0.0
    re_comp = 0.0
    im_total = 0.0
    im_comp = 0.0
    for i in range(values.shape[0]):
        phase = 2.0 * math.pi * ((values[i] * theta) % 1.0)
        y = weights[i] * math.cos(phase) - re_comp
        t = re_total + y
        re_comp = (t - re_total) - y
        re_total = t
        y = weights[i] * math.sin(phase) - im_comp
        t = im_total + y
        im_comp = (t - im_total) - y
        im_total = t
    return re_total, im_total


def sigma_nz(frequencies: Sequence[float], multiplicities: Multiplicities) -> float:
    """Sum over the frequency set of |sum_d r(d) e(d theta)|.

    ``multiplicities`` maps denominators to word counts (a census
    histogram works directly).  The inner sums use compensated
    accumulation and the outer sum runs in the given frequency order, so
    the result is deterministic for a fixed input.
    """
    values, weights = _multiplicity_arrays(multiplicities)
    total = 0.0
    comp = 0.0
    for theta in frequencies:
        re, im = _weighted_trig_sum(values, weights, float(theta))
        y = math.hypot(re, im) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def bound_diagnostic(sigma: float, omega_size: int, z_size: int,
                     cell: CellIndex, c: float, scale: ScaleSequence) -> float:
    """Ratio of sigma against the cell benchmark omega_size * sqrt(z_size)
    damped by (Q_alpha Q_beta)^c.  Values at or below 1 mean the sum beats
    the benchmark on this cell."""
    if omega_size < 1 or z_size < 1:
        raise DomainError("ensemble and frequency-set sizes must be >= 1")
    if sigma < 0.0:
        raise DomainError("sigma is an absolute sum and cannot be negative")
    damping = float(scale.Q(cell.alpha) * scale.Q(cell.beta)) ** c
    return sigma * damping / (omega_size * math.sqrt(z_size))


# ---------------------------------------------------------------------------
# per-cell reporting

@dataclass(frozen=True)
class CellRow:
    alpha: int
    beta: int
    count: int
    sigma_part: float


def cell_report(frequencies: Sequence[float], multiplicities: Multiplicities,
                n_limit: int, scale: ScaleSequence) -> List[CellRow]:
    """Decompose every frequency, group by cell, and total the exponential
    sum within each cell.  Rows come back sorted by (alpha, beta)."""
    values, weights = _multiplicity_arrays(multiplicities)
    buckets: Dict[Tuple[int, int], List[float]] = {}
    for theta in frequencies:
        data = dirichlet_decompose(float(theta), n_limit, scale)
        cell = cell_of(data, scale)
        buckets.setdefault((cell.alpha, cell.beta), []).append(float(theta))

    rows = []
    for (alpha, beta) in sorted(buckets):
        part = 0.0
        comp = 0.0
        for theta in buckets[(alpha, beta)]:
            re, im = _weighted_trig_sum(values, weights, theta)
            y = math.hypot(re, im) - comp
            t = part + y
            comp = (t - part) - y
            part = t
        rows.append(CellRow(alpha=alpha, beta=beta,
                            count=len(buckets[(alpha, beta)]), sigma_part=part))
    return rows


def write_cell_csv(rows: Iterable[CellRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "count", "sigma_part"])
        for row in rows:
            writer.writerow([row.alpha, row.beta, row.count, "%.12g" % row.sigma_part])
