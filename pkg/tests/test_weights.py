import math

import pytest

from cycleweights import weights


def test_theta_polynomial():
    w = weights.polynomial(1.0)
    value, log_value = weights.theta_eval(w, 7)
    assert value == 7.0
    assert log_value == pytest.approx(math.log(7))


def test_theta_ewens_constant():
    w = weights.ewens(2.0)
    assert weights.theta_eval(w, 100)[0] == 2.0
    assert weights.theta_eval(w, 1)[0] == 2.0


def test_theta_fractional_alpha():
    w = weights.polynomial(2.5)
    value, log_value = weights.theta_eval(w, 4)
    assert value == pytest.approx(32.0, rel=1e-14)
    assert log_value == pytest.approx(2.5 * math.log(4), rel=1e-14)
    assert math.exp(log_value) == pytest.approx(value, rel=1e-14)


def test_theta_rejects_bad_k():
    w = weights.polynomial(1.0)
    with pytest.raises(ValueError):
        weights.theta_eval(w, 0)
    with pytest.raises(ValueError):
        weights.theta_eval(w, -3)


def test_theta_large_k_log_space():
    w = weights.polynomial(5.0)
    value, log_value = weights.theta_eval(w, 10**7)
    assert log_value == pytest.approx(5.0 * math.log(10**7))
    assert value == pytest.approx(1e35)
    # past float range the log stays finite and usable
    w = weights.polynomial(50.0)
    value, log_value = weights.theta_eval(w, 10**7)
    assert log_value == pytest.approx(50.0 * math.log(10**7))
    assert value == math.inf or value > 1e300


def test_table_family_extension():
    # last-ratio extrapolation: 2,4 has ratio fit alpha = 1
    w = weights.table([2.0, 4.0])
    assert weights.theta_eval(w, 1)[0] == 2.0
    assert weights.theta_eval(w, 2)[0] == 4.0
    assert weights.theta_eval(w, 4)[0] == pytest.approx(8.0, rel=1e-12)


def test_g_partial_ewens_closed_form():
    value, K, tail = weights.g_theta_partial(weights.ewens(1.0), 0.5, 1e-12)
    assert value == pytest.approx(-math.log(0.5), abs=1e-11)
    assert tail <= 1e-12


def test_g_partial_polynomial_closed_form():
    # alpha=1: sum t^k = t/(1-t)
    for t in [0.1 * i for i in range(1, 10)]:
        value, _, _ = weights.g_theta_partial(weights.polynomial(1.0), t, 1e-12)
        assert value == pytest.approx(t / (1 - t), abs=1e-10)


def test_g_partial_zero():
    value, K, tail = weights.g_theta_partial(weights.polynomial(2.0), 0.0, 1e-12)
    assert (value, K, tail) == (0.0, 0, 0.0)


def test_g_partial_domain():
    with pytest.raises(ValueError):
        weights.g_theta_partial(weights.polynomial(1.0), 1.0, 1e-12)
    with pytest.raises(ValueError):
        weights.g_theta_partial(weights.polynomial(1.0), 0.5, -1.0)


def test_g_partial_monotone_in_t():
    w = weights.polynomial(0.5)
    prev = -1.0
    for t in [0.0, 0.2, 0.4, 0.6, 0.8, 0.9]:
        value, _, _ = weights.g_theta_partial(w, t, 1e-12)
        assert value >= prev
        prev = value


def test_tail_certification():
    # refining eps by 100x moves the value by less than the reported bound
    w = weights.polynomial(2.0)
    v1, _, tail1 = weights.g_theta_partial(w, 0.8, 1e-8)
    v2, _, _ = weights.g_theta_partial(w, 0.8, 1e-10)
    assert abs(v2 - v1) <= tail1
