"""Exact enumeration by area, width and last column size.

Two independent code paths:

* ``count_table`` adds one column ("slice") at a time, weighting each
  transition by the gluing count U(k, j);
* ``exact_perimeter_histogram`` places every column geometrically (as a
  cell interval on a vertical line, or on an anti-diagonal for dc) and
  reads the perimeter off the cell adjacencies, 4n - 2 * (adjacent pairs).

For dc the cells of a column sit on one anti-diagonal, so no two of them
share an edge and the perimeter is 4 x_1 plus the vertical contact
increments; there is no separate horizontal term.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._numeric import ResourceLimitError
from .families import FamilyId, as_family, gluing_count
from .spectral import bender_width_constants

N_MAX_CAP = 60
HISTOGRAM_CAP = 14
MOMENTS_CAP = 300


@dataclass(frozen=True)
class ExactCountTable:
    """T(m, n, j): polyominoes of width m, area n and last column j.

    ``counts[(m, n)]`` is a tuple indexed by j = 0..n (entry 0 unused).
    """

    family: FamilyId
    n_max: int
    counts: dict = field(repr=False)

    def T(self, m: int, n: int, j: int) -> int:
        row = self.counts.get((m, n))
        if row is None or not 0 < j <= n:
            return 0
        return row[j]

    def by_width(self, n: int) -> list[int]:
        """[T(m, n) for m = 0..n] summed over the last column."""
        return [sum(self.counts.get((m, n), ())) for m in range(n + 1)]

    def total(self, n: int) -> int:
        return sum(self.by_width(n))

    def totals(self) -> list[int]:
        return [self.total(n) for n in range(1, self.n_max + 1)]


@dataclass(frozen=True)
class PerimeterHistogram:
    family: FamilyId
    n: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def mean(self) -> float:
        return sum(p * c for p, c in self.counts.items()) / self.total


def count_table(family, n_max: int) -> ExactCountTable:
    f = as_family(family)
    if not 1 <= n_max <= N_MAX_CAP:
        raise ResourceLimitError(f"n_max must lie in 1..{N_MAX_CAP}, got {n_max}")
    return _count_table(f, int(n_max))


@lru_cache(maxsize=None)
def _count_table(f: FamilyId, n_max: int) -> ExactCountTable:
    U = [[gluing_count(f, k, j) if k and j else 0 for j in range(n_max + 1)]
         for k in range(n_max + 1)]
    counts = {}
    for n in range(1, n_max + 1):
        row = [0] * (n + 1)
        row[n] = 1
        counts[(1, n)] = tuple(row)
    for m in range(2, n_max + 1):
        for n in range(m, n_max + 1):
            row = [0] * (n + 1)
            for j in range(1, n - m + 2):
                prev = counts.get((m - 1, n - j))
                if prev is None:
                    continue
                row[j] = sum(U[k][j] * c for k, c in enumerate(prev) if c)
            counts[(m, n)] = tuple(row)
    return ExactCountTable(f, n_max, counts)


def composition_totals(family, n: int) -> int:
    """Total count at area n by summing gluing products over compositions of n."""
    f = as_family(family)

    def walk(prev, left):
        if left == 0:
            return 1
        return sum(gluing_count(f, prev, j) * walk(j, left - j) for j in range(1, left + 1))

    return sum(walk(k, n - k) for k in range(1, n + 1))


def growth_estimate(table: ExactCountTable) -> float:
    """Estimate of rho from the last three count ratios.

    Corrections to T(n - 1)/T(n) decay geometrically, so the extrapolation
    step is Aitken's delta-squared rather than a 1/n Richardson step.
    """
    if table.n_max < 20:
        raise ValueError("growth_estimate needs n_max >= 20")
    n = table.n_max
    r = [table.total(i - 1) / table.total(i) for i in (n - 2, n - 1, n)]
    d2 = r[2] - 2 * r[1] + r[0]
    if d2 == 0:
        return r[2]
    est = r[2] - (r[2] - r[1]) ** 2 / d2
    # fall back to the plain ratio when the extrapolation is ill-conditioned
    return est if abs(est - r[2]) <= abs(r[2] - r[1]) * 10 else r[2]


def llt_residual(family, n: int, table: ExactCountTable | None = None) -> float:
    """Max relative error of the local limit approximation of T(m, n).

    Taken over m within two standard deviations of n mu1 (at least the
    nearest integer to n mu1 is always included).
    """
    f = as_family(family)
    t = table or count_table(f, n)
    if n > t.n_max:
        raise ValueError("n exceeds the table size")
    sc = bender_width_constants(f)
    rho, mu1 = float(sc.rho), float(sc.mu1)
    s1 = math.sqrt(float(sc.sigma1_sq))
    C1 = float(sc.C1_total)
    widths = t.by_width(n)
    lo = math.ceil(n * mu1 - 2 * math.sqrt(n) * s1)
    hi = math.floor(n * mu1 + 2 * math.sqrt(n) * s1)
    ms = set(range(max(lo, 1), min(hi, n) + 1)) or {min(max(round(n * mu1), 1), n)}
    worst = 0.0
    log_scale = math.log(C1) - n * math.log(rho) - 0.5 * math.log(2 * math.pi * n) - math.log(s1)
    for m in sorted(ms):
        log_pred = log_scale - (m - n * mu1) ** 2 / (2 * n * s1 * s1)
        worst = max(worst, abs(math.exp(math.log(widths[m]) - log_pred) - 1))
    return worst


def width_mean(table: ExactCountTable, n: int) -> float:
    w = table.by_width(n)
    return sum(m * c for m, c in enumerate(w)) / sum(w)


# geometric enumeration ---------------------------------------------------------

def _placements(f: FamilyId, k: int, j: int):
    """(number of shared edges) for each admissible placement of j after k.

    Square families: previous column occupies [0, k-1], the next one
    [b, b+j-1]. dc: previous anti-diagonal cells x in [0, k-1], next
    diagonal cells x in [b, b+j-1] each touching x and x-1.
    """
    if f is FamilyId.DC:
        out = []
        for b in range(0, k - j + 2):
            out.append(2 * j - (b == 0) - (b + j - 1 == k))
        return out
    if f is FamilyId.DCC:
        bs = range(0, k)
    elif f is FamilyId.CC:
        bs = range(-(j - 1), k)
    elif f is FamilyId.ST:
        bs = range(max(0, k - j), k)
    elif f is FamilyId.ES:
        bs = range(0, 1) if j >= k - 1 else range(0)
    else:
        bs = range(0, 1)
    return [min(k, b + j) - max(0, b) for b in bs]


def _internal(f: FamilyId, j: int) -> int:
    return 0 if f is FamilyId.DC else j - 1


@lru_cache(maxsize=None)
def _continue(f: FamilyId, k: int, left: int):
    """Histogram of perimeter added by all ways to place `left` more cells."""
    if left == 0:
        return {0: 1}
    out: dict[int, int] = {}
    for j in range(1, left + 1):
        adj = _placements(f, k, j)
        if not adj:
            continue
        tail = _continue(f, j, left - j)
        for a in adj:
            inc = 4 * j - 2 * (_internal(f, j) + a)
            for p, c in tail.items():
                out[p + inc] = out.get(p + inc, 0) + c
    return out


def exact_perimeter_histogram(family, n: int) -> PerimeterHistogram:
    f = as_family(family)
    if not 1 <= n <= HISTOGRAM_CAP:
        raise ResourceLimitError(f"n must lie in 1..{HISTOGRAM_CAP}, got {n}")
    out: dict[int, int] = {}
    for k in range(1, n + 1):
        first = 4 * k - 2 * _internal(f, k)
        for p, c in _continue(f, k, n - k).items():
            out[p + first] = out.get(p + first, 0) + c
    return PerimeterHistogram(f, n, dict(sorted(out.items())))


@lru_cache(maxsize=None)
def _continue_moments(f: FamilyId, k: int, left: int):
    """(count, sum P, sum P^2) of the perimeter added by `left` more cells."""
    if left == 0:
        return 1, 0, 0
    N = S1 = S2 = 0
    for j in range(1, left + 1):
        adj = _placements(f, k, j)
        if not adj:
            continue
        n0, s1, s2 = _continue_moments(f, j, left - j)
        for a in adj:
            inc = 4 * j - 2 * (_internal(f, j) + a)
            N += n0
            S1 += n0 * inc + s1
            S2 += n0 * inc * inc + 2 * inc * s1 + s2
    return N, S1, S2


def perimeter_moments(family, n: int) -> tuple[int, int, int]:
    """Exact (count, sum of perimeters, sum of squared perimeters) at area n.

    Same geometry as the histogram but only the first two moments are
    carried. The cost grows like n^4 for families with O(n) placements per
    column pair (cc at n = 120 takes seconds), like n^2 for es and wa.
    """
    f = as_family(family)
    if not 1 <= n <= MOMENTS_CAP:
        raise ResourceLimitError(f"n must lie in 1..{MOMENTS_CAP}, got {n}")
    N = S1 = S2 = 0
    for k in range(1, n + 1):
        n0, s1, s2 = _continue_moments(f, k, n - k)
        p = 4 * k - 2 * _internal(f, k)
        N += n0
        S1 += n0 * p + s1
        S2 += n0 * p * p + 2 * p * s1 + s2
    return N, S1, S2


def perimeter_mean_per_area(family, ns) -> np.ndarray:
    return np.array([exact_perimeter_histogram(family, n).mean() / n for n in ns])


# CSV ----------------------------------------------------------------------------

def write_counts_csv(table: ExactCountTable, fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["n", "m", "j", "count"])
    for (m, n), row in sorted(table.counts.items(), key=lambda t: (t[0][1], t[0][0])):
        for j, c in enumerate(row):
            if c:
                w.writerow([n, m, j, c])


def write_totals_csv(table: ExactCountTable, fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["n", "count"])
    for n, c in enumerate(table.totals(), start=1):
        w.writerow([n, c])


def write_histogram_csv(hist: PerimeterHistogram, fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["n", "perimeter", "count"])
    for p, c in hist.counts.items():
        w.writerow([hist.n, p, c])
