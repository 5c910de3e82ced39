import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainbowpack.bounds import (
    chernoff_tail,
    choose_r0,
    compute_r0,
    expected_m_geq_r,
    expected_m_geq_r_upper,
    expected_m_r,
    multiplicity_counts,
    multiplicity_profile,
    talagrand_deviation,
    talagrand_tail,
)


def test_known_value_m1():
    # 20 * 5 * (1/20) * (19/20)**4, quoted to four decimals as 4.0725
    v = expected_m_r(2, 10, 5, 1)
    assert v == pytest.approx(4.07253125, rel=1e-12)
    assert abs(v - 4.0725) < 1e-4


def test_zero_beyond_sample_size():
    assert expected_m_r(2, 10, 5, 6) == 0.0
    assert expected_m_geq_r_upper(2, 10, 5, 6) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(1, 60), st.integers(0, 80))
def test_profile_sums(k, n, alpha_n):
    prof = multiplicity_profile(k, n, alpha_n)
    assert math.fsum(prof.mu) == pytest.approx(k * n, rel=1e-9)
    assert prof.mass() == pytest.approx(alpha_n, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(1, 40), st.integers(1, 60), st.integers(1, 8))
def test_upper_bound_dominates(k, n, alpha_n, r):
    exact = expected_m_geq_r(k, n, alpha_n, r)
    assert expected_m_geq_r_upper(k, n, alpha_n, r) >= exact * (1 - 1e-9)


def test_large_arguments_stay_finite():
    v = expected_m_r(2, 10**6, 10**6, 3)
    assert math.isfinite(v) and v > 0


@pytest.mark.parametrize("eps", [0.9, 0.5, 0.1, 0.01])
@pytest.mark.parametrize("k", [2, 3, 23])
def test_r0_is_smallest(eps, k):
    r = compute_r0(eps, k)
    assert 2 * k**-r <= eps**2 / 2
    assert r == 1 or 2 * k ** -(r - 1) > eps**2 / 2


def test_r0_example():
    assert compute_r0(0.1, 2) == 9


def test_choose_r0_shortcut():
    assert choose_r0(0.2, 2, 0.05) == 1
    assert choose_r0(0.2, 2, 0.5) == compute_r0(0.2, 2)


@pytest.mark.parametrize("eps,k", [(0.0, 2), (1.0, 2), (0.5, 1)])
def test_r0_domain(eps, k):
    with pytest.raises(ValueError):
        compute_r0(eps, k)


def test_chernoff():
    assert chernoff_tail(100, 0.1) == pytest.approx(math.exp(-0.5))
    assert chernoff_tail(300, 0.1, "upper") == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        chernoff_tail(10, 1.5, "upper")
    with pytest.raises(ValueError):
        chernoff_tail(10, 0.1, "middle")


def test_chernoff_is_an_upper_bound():
    from scipy.stats import binom

    mu = 40
    for a in (0.1, 0.3, 0.5):
        assert binom.cdf(math.floor((1 - a) * mu), 80, 0.5) <= chernoff_tail(mu, a)


def test_talagrand():
    assert talagrand_tail(100, 1, 1, 0) == 4.0
    vals = [talagrand_tail(1000, 2, 3, t) for t in (10, 100, 500, 1000)]
    assert vals == sorted(vals, reverse=True)
    assert talagrand_deviation(100, 1, 4, 5) == pytest.approx(5 + 60 * 20)
    with pytest.raises(ValueError):
        talagrand_tail(10, 1, 1, 11)


def test_multiplicity_counts():
    m = multiplicity_counts([1, 1, 2, 5, 5, 5], 6)
    assert m == [3, 1, 1, 1, 0, 0, 0]
    assert sum(r * x for r, x in enumerate(m)) == 6


def test_monte_carlo_m1_close_to_formula():
    rng = random.Random(3)
    trials = 20000
    total = 0
    for _ in range(trials):
        draws = [rng.randint(1, 20) for _ in range(5)]
        total += multiplicity_counts(draws, 20)[1]
    assert abs(total / trials - expected_m_r(2, 10, 5, 1)) < 0.03
