import itertools
import math

import numpy as np
import pytest
from scipy import special as sp_special
from scipy import stats as sp

from conftest import MONTHLY
from incidentstats.errors import DataError
from incidentstats.stats import (betainc, bonferroni, chi_square_gof, chisq_cdf, chisq_sf,
                                 describe, dunn_posthoc, f_cdf, f_sf, gammainc_lower,
                                 kruskal_wallis, median, normal_cdf, shapiro_wilk, t_cdf, t_ppf,
                                 t_sf, welch_t)

# scipy serves only as an independent reference here.


def test_special_against_reference():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b, x = rng.uniform(0.05, 60, 3)
        u = rng.uniform()
        assert gammainc_lower(a, x) == pytest.approx(sp_special.gammainc(a, x), abs=1e-12)
        assert betainc(a, b, u) == pytest.approx(sp_special.betainc(a, b, u), abs=1e-11)


@pytest.mark.parametrize("x", [-40, -5.5, -1, 0, 0.3, 2, 8.2])
def test_distribution_cdfs(x):
    assert normal_cdf(x) == pytest.approx(sp.norm.cdf(x), abs=1e-14)
    for df in (1, 2.5, 7, 30, 400):
        assert t_cdf(x, df) == pytest.approx(sp.t.cdf(x, df), abs=1e-12)
        assert t_sf(x, df) == pytest.approx(sp.t.sf(x, df), rel=1e-9, abs=1e-300)
    if x > 0:
        for df in (1, 3, 11, 120):
            assert chisq_cdf(x, df) == pytest.approx(sp.chi2.cdf(x, df), abs=1e-12)
            assert chisq_sf(x, df) == pytest.approx(sp.chi2.sf(x, df), rel=1e-9)
        for d1, d2 in ((1, 1), (3, 676), (20, 5)):
            assert f_cdf(x, d1, d2) == pytest.approx(sp.f.cdf(x, d1, d2), abs=1e-12)
            assert f_sf(x, d1, d2) == pytest.approx(sp.f.sf(x, d1, d2), rel=1e-9)


def test_deep_upper_tail_is_not_cancelled():
    assert chisq_sf(324.62, 11) == pytest.approx(sp.chi2.sf(324.62, 11), rel=1e-8)
    assert chisq_sf(324.62, 11) < 2.2e-16


def test_special_examples():
    assert normal_cdf(0) == 0.5
    assert chisq_cdf(1e6, 3) == 1.0
    assert abs(t_cdf(1.0, 1e6) - normal_cdf(1.0)) < 1e-6
    assert t_ppf(0.975, 10) == pytest.approx(sp.t.ppf(0.975, 10), abs=1e-9)


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_special_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        normal_cdf(bad)
    with pytest.raises(ValueError):
        t_cdf(0.5, bad)


def test_describe_monthly():
    d = describe(MONTHLY)
    assert d.n == 12 and d.missing_count == 0
    assert d.mean == pytest.approx(214.6667, abs=5e-5)
    assert d.median == 217
    assert d.sd == pytest.approx(79.59, abs=0.005)
    assert (d.min, d.max) == (70, 344)


def test_describe_small():
    d = describe([5])
    assert (d.mean, d.median, d.sd) == (5, 5, 0)
    d = describe([1, 2, 2, 9])
    assert (d.mode, d.median, d.mean) == (2, 2, 3.5)
    assert d.sd == pytest.approx(math.sqrt(41 / 3), abs=1e-12)


def test_describe_missing_and_ties():
    d = describe([3, None, 1, float("nan"), 3, 1])
    assert d.missing_count == 2 and d.n == 4 and d.mode == 1
    with pytest.raises(DataError):
        describe([None])


def test_median_even():
    assert median([203, 231]) == 217


def test_chisq_monthly():
    res = chi_square_gof(MONTHLY)
    assert res.chi2 == pytest.approx(324.62, abs=0.01) and res.df == 11 and res.p < 2.2e-16
    got = {r.label: round(r.pearson_residual, 2) for r in
           chi_square_gof(MONTHLY, labels=[str(i) for i in range(1, 13)]).rows}
    assert (got["1"], got["7"], got["9"]) == (3.50, -9.87, 8.83)
    assert sum(r.pearson_residual ** 2 for r in res.rows) == pytest.approx(res.chi2)


def test_chisq_small():
    assert chi_square_gof([5, 5, 5, 5]).chi2 == 0 and chi_square_gof([5, 5, 5, 5]).p == 1
    res = chi_square_gof([10, 20])
    assert res.chi2 == pytest.approx(10 / 3) and res.df == 1
    assert res.p == pytest.approx(sp.chi2.sf(10 / 3, 1), rel=1e-10)


def test_chisq_rejects_bad_input():
    with pytest.raises(DataError):
        chi_square_gof([3])
    with pytest.raises(DataError):
        chi_square_gof([1, 2], [0, 3])


def test_welch_examples():
    r = welch_t([1, 2, 3], [1, 2, 3])
    assert r.t == 0 and r.p == pytest.approx(1) and r.ci_low == pytest.approx(-r.ci_high)
    r = welch_t([1, 2, 3], [2, 4, 6])
    assert r.t == pytest.approx(-1.5491933, abs=1e-6)
    assert r.df == pytest.approx(50 / 17, abs=1e-9)
    ref = sp.ttest_ind([1, 2, 3], [2, 4, 6], equal_var=False)
    assert r.p == pytest.approx(ref.pvalue, rel=1e-8)
    ci = ref.confidence_interval()
    assert (r.ci_low, r.ci_high) == (pytest.approx(ci.low, rel=1e-7), pytest.approx(ci.high, rel=1e-7))


def test_welch_antisymmetry():
    x, y = [3.1, 4.2, 5.0, 1.2], [2.0, 2.5, 9.1]
    a, b = welch_t(x, y), welch_t(y, x)
    assert a.t == pytest.approx(-b.t) and a.p == pytest.approx(b.p)
    assert a.ci_low == pytest.approx(-b.ci_high)


def test_kruskal_examples():
    r = kruskal_wallis([[1, 2, 3], [4, 5, 6]])
    assert r.H == pytest.approx(27 / 7, abs=1e-9) and r.df == 1
    assert r.p == pytest.approx(0.0495, abs=5e-5)
    assert kruskal_wallis([[1, 2, 3], [1, 2, 3]]).H == pytest.approx(0, abs=1e-12)


def test_kruskal_ties_against_reference():
    groups = [[1, 1, 2, 5], [2, 2, 3, 7, 7], [0, 1, 9]]
    ref = sp.kruskal(*groups)
    r = kruskal_wallis(groups)
    assert r.H == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_bonferroni():
    assert bonferroni([0.01], 28) == [pytest.approx(0.28)]
    assert bonferroni([0.5, 0.2]) == [1.0, 0.4]


def _brute_dunn(groups):
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks = sp.rankdata(pooled)
    tie = sum(c ** 3 - c for c in np.unique(pooled, return_counts=True)[1])
    out, k = [], 0
    means = []
    for g in groups:
        means.append(ranks[k:k + len(g)].mean())
        k += len(g)
    for i, j in itertools.combinations(range(len(groups)), 2):
        var = (n * (n + 1) / 12 - tie / (12 * (n - 1))) * (1 / len(groups[i]) + 1 / len(groups[j]))
        out.append((means[i] - means[j]) / math.sqrt(var))
    return out


def test_dunn_against_brute_force():
    groups = [[1.0, 3.0, 3.0, 4.5], [2.0, 7.0, 8.0], [9.0, 9.0, 10.0, 0.5, 6.0]]
    rows = dunn_posthoc(groups, ["a", "b", "c"])
    assert [(r.group_a, r.group_b) for r in rows] == [("a", "b"), ("a", "c"), ("b", "c")]
    for row, z in zip(rows, _brute_dunn(groups)):
        assert row.z == pytest.approx(z, abs=1e-6)
        assert row.p_unadj == pytest.approx(2 * sp.norm.sf(abs(z)), abs=1e-9)
        assert row.p_adj == min(1.0, 3 * row.p_unadj)


def test_dunn_ratio_is_number_of_pairs():
    rng = np.random.default_rng(3)
    groups = [list(rng.normal(i * 0.01, 1, 40)) for i in range(8)]
    rows = dunn_posthoc(groups)
    assert len(rows) == 28
    for r in rows:
        if r.p_adj < 1:
            assert r.p_adj == 28 * r.p_unadj


SHAPIRO_N20 = [148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236, 140, 145, 150, 152, 156,
               164, 168, 172, 178]
# frozen from a trusted reference implementation before this module was written
SHAPIRO_N20_W = 0.8230686453391315
SHAPIRO_N20_P = 0.0019482787625812277


def test_shapiro_examples():
    r = shapiro_wilk([1, 2, 3])
    assert r.W == pytest.approx(1.0, abs=1e-9) and r.n == 3
    r = shapiro_wilk(SHAPIRO_N20)
    assert r.W == pytest.approx(SHAPIRO_N20_W, abs=1e-3)
    assert r.p == pytest.approx(SHAPIRO_N20_P, rel=1e-3)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 11, 12, 25, 100, 1000])
def test_shapiro_against_reference(n):
    x = np.random.default_rng(n).gamma(2.0, size=n)
    ref = sp.shapiro(x)
    r = shapiro_wilk(x)
    assert r.W == pytest.approx(ref.statistic, abs=1e-8)
    assert r.p == pytest.approx(ref.pvalue, abs=1e-7)


def test_shapiro_affine_invariance():
    x = np.random.default_rng(1).normal(size=30)
    assert shapiro_wilk(x).W == pytest.approx(shapiro_wilk(3.5 * x - 20).W, abs=1e-9)


def test_shapiro_rejects():
    with pytest.raises(DataError):
        shapiro_wilk([1, 2])
    with pytest.raises(DataError):
        shapiro_wilk([4, 4, 4, 4])
