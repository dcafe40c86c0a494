import io
import math

import pytest

from oracles import exact_perimeter_moments
from polyostat import enumerate as en
from polyostat._numeric import ResourceLimitError
from polyostat.moments import joint_stats
from polyostat.spectral import bender_width_constants

ALL = ["dcc", "cc", "dc", "st", "es", "wa"]


def test_wall_totals_are_compositions():
    assert en.count_table("wa", 10).totals() == [2 ** (n - 1) for n in range(1, 11)]


@pytest.mark.parametrize("family,totals", [
    ("dcc", [1, 2, 5, 13, 34]), ("st", [1, 2, 4, 9, 20]),
])
def test_small_totals(family, totals):
    assert en.count_table(family, 5).totals() == totals


@pytest.mark.parametrize("family", ALL)
def test_table_against_compositions(family):
    t = en.count_table(family, 10)
    assert t.totals() == [en.composition_totals(family, n) for n in range(1, 11)]


@pytest.mark.parametrize("family", ALL)
def test_table_invariants(family):
    t = en.count_table(family, 25)
    for n in range(1, 26):
        assert [t.T(1, n, j) for j in range(1, n + 1)] == [int(j == n) for j in range(1, n + 1)]
    tot = t.totals()
    assert all(a < b for a, b in zip(tot, tot[1:]))
    assert t.T(3, 2, 1) == 0 and t.T(1, 5, 9) == 0


def test_counts_exceed_machine_integers():
    assert en.count_table("cc", 60).total(60) > 2 ** 63


def test_dcc_recurrence():
    tot = en.count_table("dcc", 60).totals()
    assert all(tot[i] == 3 * tot[i - 1] - tot[i - 2] for i in range(2, 60))


@pytest.mark.parametrize("family,want,tol", [
    ("dcc", (3 - math.sqrt(5)) / 2, 1e-4), ("es", 0.57615, 1e-3),
])
def test_growth_estimate(family, want, tol):
    assert abs(en.growth_estimate(en.count_table(family, 40)) - want) < tol


def test_growth_estimate_wall_and_small_tables():
    assert en.growth_estimate(en.count_table("wa", 30)) == 0.5
    with pytest.raises(ValueError):
        en.growth_estimate(en.count_table("wa", 19))


@pytest.mark.parametrize("family", ALL)
def test_growth_estimate_matches_root(family):
    rho = float(bender_width_constants(family).rho)
    assert abs(en.growth_estimate(en.count_table(family, 40)) - rho) < 1e-3


def test_llt_improves_with_n():
    t = en.count_table("dcc", 40)
    assert en.llt_residual("dcc", 40, t) < en.llt_residual("dcc", 20, t)


def test_llt_wall_bound():
    assert en.llt_residual("wa", 30) < 0.08


def test_llt_dcc_bound():
    assert en.llt_residual("dcc", 40) < 0.15


def test_llt_rejects_n_beyond_table():
    with pytest.raises(ValueError):
        en.llt_residual("dcc", 30, en.count_table("dcc", 20))


@pytest.mark.parametrize("family", ALL)
def test_width_mean(family):
    t = en.count_table(family, 40)
    mu1 = float(bender_width_constants(family).mu1)
    assert abs(en.width_mean(t, 40) / 40 - mu1) <= 0.02


@pytest.mark.parametrize("family", ALL)
def test_width_mean_offset_is_constant(family):
    # mean width = n mu1 + c + o(1): the offset itself must settle
    t = en.count_table(family, 60)
    mu1 = float(bender_width_constants(family).mu1)
    c50 = en.width_mean(t, 50) - 50 * mu1
    c60 = en.width_mean(t, 60) - 60 * mu1
    assert abs(c60 - c50) < 1e-5


def test_wall_width_mean_is_exact():
    # compositions of n: mean number of parts is (n + 1)/2
    t = en.count_table("wa", 30)
    assert en.width_mean(t, 30) == pytest.approx(15.5, abs=1e-12)


def test_histogram_examples():
    assert en.exact_perimeter_histogram("wa", 3).counts == {8: 4}
    assert en.exact_perimeter_histogram("dcc", 2).counts == {6: 2}
    h = en.exact_perimeter_histogram("cc", 1)
    assert h.counts == {4: 1} and h.mean() == 4


@pytest.mark.parametrize("family", ALL)
def test_histogram_invariants(family):
    t = en.count_table(family, 10)
    for n in range(1, 11):
        h = en.exact_perimeter_histogram(family, n)
        assert h.total == t.total(n)
        assert all(p % 2 == 0 and p >= 4 for p in h.counts)
        N, S1, S2 = exact_perimeter_moments(family, n)
        assert (N, S1, S2) == (h.total, sum(p * c for p, c in h.counts.items()),
                               sum(p * p * c for p, c in h.counts.items()))


def test_square_family_perimeter_bounds():
    # a column of n cells has perimeter 2n + 2; nothing exceeds it
    for f in ("dcc", "cc", "st", "es", "wa"):
        h = en.exact_perimeter_histogram(f, 9)
        assert max(h.counts) == 20
        assert min(h.counts) >= 12


def test_cc_means_move_toward_mu4():
    mu4 = float(joint_stats("cc").mu4)
    gaps = [abs(en.exact_perimeter_histogram("cc", n).mean() / n - mu4) for n in range(6, 11)]
    rises = sum(b > a for a, b in zip(gaps, gaps[1:]))
    assert rises <= 1 and gaps[-1] < gaps[0]


def test_resource_caps():
    with pytest.raises(ResourceLimitError):
        en.count_table("dcc", en.N_MAX_CAP + 1)
    with pytest.raises(ResourceLimitError):
        en.exact_perimeter_histogram("dcc", en.HISTOGRAM_CAP + 1)
    with pytest.raises(ResourceLimitError):
        en.count_table("dcc", 0)


def test_csv_exports():
    buf = io.StringIO()
    en.write_counts_csv(en.count_table("wa", 3), buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "n,m,j,count"
    assert "3,2,1,1" in rows and "3,1,3,1" in rows
    assert sum(int(r.split(",")[3]) for r in rows[1:] if r.startswith("3,")) == 4
    buf = io.StringIO()
    en.write_totals_csv(en.count_table("dcc", 4), buf)
    assert buf.getvalue() == "n,count\n1,1\n2,2\n3,5\n4,13\n"
    buf = io.StringIO()
    en.write_histogram_csv(en.exact_perimeter_histogram("wa", 3), buf)
    assert buf.getvalue() == "n,perimeter,count\n3,8,4\n"


def test_llt_wall_residual_matches_binomial_oracle():
    # T(m, n) = binom(n - 1, m - 1); the stated Gaussian uses the centre n mu1 = n/2
    # while the exact mean is (n + 1)/2, which sets the residual at n = 30
    n, mu1, s1, C1 = 30, 0.5, 0.5, 0.5
    lo = math.ceil(n * mu1 - 2 * math.sqrt(n) * s1)
    hi = math.floor(n * mu1 + 2 * math.sqrt(n) * s1)
    worst = 0.0
    for m in range(lo, hi + 1):
        pred = C1 * 2 ** n * math.exp(-(m - n * mu1) ** 2 / (2 * n * s1 * s1)) \
            / (math.sqrt(2 * math.pi * n) * s1)
        worst = max(worst, abs(math.comb(n - 1, m - 1) / pred - 1))
    assert en.llt_residual("wa", 30) == pytest.approx(worst, rel=1e-9)


@pytest.mark.parametrize("family", ALL)
def test_perimeter_moments_against_oracle(family):
    for n in (1, 7, 13, 30):
        assert en.perimeter_moments(family, n) == exact_perimeter_moments(family, n)
    with pytest.raises(ResourceLimitError):
        en.perimeter_moments(family, en.MOMENTS_CAP + 1)
