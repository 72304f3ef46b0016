import math

import numpy as np
import pytest
from scipy.special import expi

from psdperm.special import (EULER_GAMMA, ei_series_tail, ei_upper_bound, exp_int_neg,
                             expected_log_noncentral, log_binomial, noncentral_lower_bound)


def test_ei_at_one():
    assert exp_int_neg(1.0) == pytest.approx(-0.21938393439552029, abs=1e-14)


def test_ei_matches_reference_on_wide_range():
    x = np.concatenate([np.logspace(-8, 0, 50), np.linspace(1, 60, 200)])
    assert np.max(np.abs(exp_int_neg(x) - expi(-x))) < 1e-12


def test_ei_small_x_limit():
    x = 1e-9
    assert exp_int_neg(x) - (EULER_GAMMA + math.log(x)) == pytest.approx(0.0, abs=1e-8)
    assert exp_int_neg(0.0) == -math.inf


def test_ei_rejects_negative():
    with pytest.raises(ValueError):
        exp_int_neg(-1.0)


def test_series_tail_is_the_series():
    assert ei_series_tail(1.0) == pytest.approx(sum((-1) ** k / (k * math.factorial(k)) for k in range(1, 30)))


def test_noncentral_values():
    assert expected_log_noncentral(0.0) == pytest.approx(-EULER_GAMMA, abs=1e-15)
    assert expected_log_noncentral(1.0) == pytest.approx(0.21938393439552029, abs=1e-13)
    # continuous across the method switch
    a, b = expected_log_noncentral(math.sqrt(2.0) - 1e-9), expected_log_noncentral(math.sqrt(2.0) + 1e-9)
    assert abs(a - b) < 1e-8


def test_noncentral_monte_carlo():
    rng = np.random.default_rng(0)
    g = (rng.standard_normal(500_000) + 1j * rng.standard_normal(500_000)) * math.sqrt(0.5)
    v = np.log(np.abs(g + 0.5) ** 2)
    se = v.std() / math.sqrt(v.size)
    assert abs(v.mean() - expected_log_noncentral(0.5)) < 5 * se


def test_bounds_hold_on_grids():
    x = np.linspace(1e-3, 10, 10_000)
    assert np.min(ei_upper_bound(x) - exp_int_neg(x)) >= -1e-12
    c = np.linspace(0, 2, 2001)
    assert np.min(expected_log_noncentral(c) - noncentral_lower_bound(c)) >= -1e-12


def test_log_binomial():
    assert log_binomial(10, 3) == pytest.approx(math.log(120))
