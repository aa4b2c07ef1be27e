import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from inkage.capture import Sex, WriterMeta
from inkage.errors import EmptyInput, LengthMismatch, TooFewWriters, TooShort, UnknownFeature, ZeroVariance
from inkage.features import FEATURE_NAMES, FeatureVector
from inkage.stats import (
    Band,
    betainc,
    classify_band,
    correlate_cohort,
    histogram,
    p_value,
    pearson,
    scatter_pairs,
    t_statistic,
)


def pearson_mp(x, y):
    """Textbook Pearson r in 50-digit arithmetic."""
    with mpmath.workdps(50):
        xs = [mpmath.mpf(float(v)) for v in x]
        ys = [mpmath.mpf(float(v)) for v in y]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
        sxx = sum((a - mx) ** 2 for a in xs)
        syy = sum((b - my) ** 2 for b in ys)
        return float(sxy / mpmath.sqrt(sxx * syy))


def p_quadrature(rho, n):
    """Two-tailed p by integrating the Student t density numerically."""
    nu = n - 2
    t = abs(rho) * math.sqrt(nu / (1 - rho * rho))
    log_c = math.lgamma((nu + 1) / 2) - math.lgamma(nu / 2) - 0.5 * math.log(nu * math.pi)

    def density(u):
        return math.exp(log_c - (nu + 1) / 2 * math.log1p(u * u / nu))

    tail, _ = integrate.quad(density, t, math.inf, epsabs=1e-13, epsrel=1e-10, limit=200)
    return 2 * tail


def test_pearson_exact_line():
    assert pearson([1, 2, 3], [2, 4, 6]) == 1.0


def test_pearson_zero():
    assert pearson([1, 2, 3], [1, 0, 1]) == 0.0


def test_pearson_errors():
    with pytest.raises(ZeroVariance) as info:
        pearson([1, 2, 3], [5, 5, 5])
    assert info.value.which == "y"
    with pytest.raises(LengthMismatch):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(TooShort):
        pearson([1, 2], [2, 1])


def test_pearson_against_extended_precision():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(3, 51))
        x, y = rng.normal(size=n) * 10, rng.normal(size=n) + rng.normal(size=n)
        assert abs(pearson(x, y) - pearson_mp(x, y)) <= 1e-12


@given(st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)), min_size=3, max_size=30))
def test_pearson_properties(pairs):
    x, y = (np.array(v, dtype=float) for v in zip(*pairs))
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return
    r = pearson(x, y)
    assert -1 <= r <= 1
    assert pearson(y, x) == r
    assert pearson(3.5 * x + 7, y) == pytest.approx(r, abs=1e-12)
    assert pearson(-2 * x, y) == pytest.approx(-r, abs=1e-12)


@pytest.mark.parametrize("a, b, x", [(0.5, 0.5, 0.3), (2, 3, 0.4), (199, 0.5, 0.99), (1.5, 0.5, 0.9), (10, 10, 0.5)])
def test_betainc_matches_scipy(a, b, x):
    assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), rel=1e-11, abs=1e-15)


def test_betainc_edges():
    assert betainc(2, 3, 0.0) == 0.0 and betainc(2, 3, 1.0) == 1.0
    with pytest.raises(ValueError):
        betainc(0, 1, 0.5)


def test_p_value_zero_rho():
    assert p_value(0.0, 400) == 1.0


def test_p_value_perfect_correlation():
    assert p_value(1.0, 10) == 0.0 and p_value(-1.0, 10) == 0.0


def test_p_value_nt_up_row():
    # rho = 0.29 over 400 writers; the published p (4.50E-09) comes from an unrounded rho
    p = p_value(0.29, 400)
    assert p == pytest.approx(p_quadrature(0.29, 400), rel=1e-7)
    assert 3.0e-9 < p < 3.8e-9
    assert p_value(0.295, 400) < 4.50e-9 < p_value(0.285, 400)


@pytest.mark.parametrize("n", [3, 4, 5, 30, 400])
@pytest.mark.parametrize("rho", [0.05, 0.1, 0.2, 0.29, 0.5, -0.5, 0.9])
def test_p_value_against_quadrature(rho, n):
    assert abs(p_value(rho, n) - p_quadrature(rho, n)) <= 1e-8


def test_p_value_monotone():
    rhos = np.linspace(0.001, 0.999, 300)
    for n in (5, 30, 400):
        ps = [p_value(r, n) for r in rhos]
        assert all(a > b or b == 0 for a, b in zip(ps, ps[1:]))


def test_p_value_errors():
    with pytest.raises(TooShort):
        p_value(0.5, 2)
    with pytest.raises(ValueError):
        p_value(1.5, 10)


def test_t_statistic():
    assert t_statistic(0.5, 11) == pytest.approx(0.5 * math.sqrt(9 / 0.75))


@pytest.mark.parametrize(
    "rho, band",
    [(0.6, Band.HIGH), (-0.35, Band.MEDIUM), (0.05, Band.NEGLIGIBLE), (0.5, Band.HIGH), (0.3, Band.MEDIUM),
     (0.1, Band.LOW), (-0.1, Band.LOW), (0.0999, Band.NEGLIGIBLE), (1.0, Band.HIGH), (-1.0, Band.HIGH)],
)
def test_classify_band(rho, band):
    assert classify_band(rho) is band


def vector(**values):
    base = dict.fromkeys(FEATURE_NAMES, 0.0)
    base.update(values)
    return FeatureVector(**base)


def meta(key, age):
    return WriterMeta(key, age, Sex.UNSPECIFIED, 2)


def test_cohort_perfect_feature_and_constant_feature():
    ages = {"a": 20, "b": 40, "c": 60}
    feats = {k: vector(t_upm=2.0 * a, nt_up=float(a % 7)) for k, a in ages.items()}
    report = correlate_cohort(feats, {k: meta(k, a) for k, a in ages.items()})
    assert len(report.rows) == 39 and report.n == 3
    assert [r.feature_name for r in report.rows] == list(FEATURE_NAMES)
    top = report.row("t_upm")
    assert top.rho == 1.0 and top.band is Band.HIGH and top.p_value == 0.0
    flat = report.row("p_meanm")
    assert not flat.applicable and flat.band is Band.NOT_APPLICABLE
    assert all(r.n == 3 for r in report.rows)


def test_cohort_exclusions_and_minimum():
    feats = {k: vector(t_upm=float(i)) for i, k in enumerate("abcd")}
    metas = {k: meta(k, 20 + 10 * i) for i, k in enumerate("abce")}
    report = correlate_cohort(feats, metas)
    assert report.n == 3
    assert report.excluded == (("d", "no metadata"), ("e", "no recording"))
    with pytest.raises(TooFewWriters):
        correlate_cohort({"a": vector(), "b": vector()}, metas)


def test_cohort_planted_correlation_monte_carlo():
    rng = np.random.default_rng(11)
    n, target = 400, 0.29
    ages = rng.integers(18, 71, size=n)
    z = (ages - ages.mean()) / ages.std()
    signal = target * z + math.sqrt(1 - target**2) * rng.normal(size=n)
    feats = {f"w{i:03d}": vector(nt_up=float(s), t_downm=float(rng.normal())) for i, s in enumerate(signal)}
    metas = {f"w{i:03d}": meta(f"w{i:03d}", int(a)) for i, a in enumerate(ages)}
    row = correlate_cohort(feats, metas).row("nt_up")
    assert abs(row.rho - target) <= 3 / math.sqrt(n)
    assert row.p_value < 1e-4


def test_report_serialization():
    ages = {"a": 20, "b": 40, "c": 61, "d": 33}
    feats = {k: vector(t_upm=a + (a % 3), nt_up=0.001 * a) for k, a in ages.items()}
    report = correlate_cohort(feats, {k: meta(k, a) for k, a in ages.items()})
    lines = report.to_csv().splitlines()
    assert lines[0] == "feature,rho,p,t,n,band" and len(lines) == 40
    assert lines[FEATURE_NAMES.index("p_meanm") + 1] == "p_meanm,NA,NA,NA,4,n/a"
    name, rho, p, t, n, band = lines[1].split(",")
    assert float(rho) == report.rows[0].rho and float(p) == report.rows[0].p_value

    styled = report.to_csv(table1_style=True).splitlines()
    row = styled[FEATURE_NAMES.index("nt_up") + 1].split(",")
    assert row[1] == "1" and row[2] == "0.00E+00"
    doc = json.loads(report.to_json())
    assert doc["n"] == 4 and len(doc["rows"]) == 39 and doc["rows"][0]["feature"] == "t_upm"


def test_histogram_examples():
    assert histogram([20, 20, 30], 10, 18) == [(18, 2), (28, 1)]
    assert histogram([42], 5, 18) == [(38, 1)]
    assert histogram([28], 10, 18) == [(28, 1)]
    assert histogram([20, 20, 30], 5, 18) == [(18, 2), (28, 1)]


def test_histogram_empty():
    with pytest.raises(EmptyInput):
        histogram([], 5, 18)


@given(st.lists(st.integers(1, 130), min_size=1, max_size=200), st.integers(1, 20))
def test_histogram_conservation(values, width):
    bins = histogram(values, width, 18)
    assert sum(c for _, c in bins) == len(values)
    for edge, _ in bins:
        assert (edge - 18) % width == 0


def test_scatter_pairs():
    feats = {"b": vector(t_upm=9.9), "a": vector(t_upm=4.1)}
    metas = {"a": meta("a", 20), "b": meta("b", 50), "c": meta("c", 70)}
    assert scatter_pairs(feats, metas, "t_upm") == [(20, 4.1), (50, 9.9)]
    with pytest.raises(UnknownFeature):
        scatter_pairs(feats, metas, "foo")
