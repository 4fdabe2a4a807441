import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from clusterforge.compiler import ResourceCount, build_lattice, count_resources
from clusterforge.errormodel import (
    EntanglerParams,
    error_probability,
    parse_range,
    regime_check,
    schedule_success,
    sweep,
    to_csv,
)


def reference_p_error(alpha, gamma, theta, eta, dps=50):
    with mpmath.workdps(dps):
        a, g, t, e = map(mpmath.mpf, (alpha, gamma, theta, eta))
        inner = 1 - mpmath.exp(-e * g**2 * t**2 / 2)
        return mpmath.exp(-2 * inner * a**2 * mpmath.sin(t) ** 2)


def params_with_p_error(target):
    # gamma large enough that the detector factor is exactly 1 in floating point
    theta = 0.3
    alpha = math.sqrt(-math.log(target) / 2) / math.sin(theta)
    return EntanglerParams(alpha=alpha, gamma=1e4, theta=theta, eta=1.0)


def test_trivial_limits():
    assert error_probability(EntanglerParams(100, 5, 0.0, 1)) == 1.0
    assert error_probability(EntanglerParams(100, 5, 0.2, 0.0)) == 1.0


def test_derived_point_against_mpmath():
    p = EntanglerParams(alpha=100, gamma=100, theta=0.1, eta=1)
    assert p.eta * p.gamma**2 * p.theta**2 == pytest.approx(100)
    ref = reference_p_error(100, 100, 0.1, 1)
    assert float(mpmath.log(ref)) == pytest.approx(-199.33, abs=0.005)
    assert error_probability(p) == pytest.approx(float(ref), rel=1e-10)


@pytest.mark.parametrize("bad", [
    dict(alpha=-1), dict(gamma=-1), dict(theta=-0.1), dict(theta=2.0), dict(eta=1.5), dict(eta=float("nan")),
])
def test_range_validation(bad):
    kwargs = dict(alpha=1, gamma=1, theta=0.1, eta=0.5) | bad
    with pytest.raises(ValueError):
        EntanglerParams(**kwargs)


def test_regime_check():
    r = regime_check(EntanglerParams(alpha=1000, gamma=1, theta=0.01, eta=1))
    assert r.alpha_sin_theta == pytest.approx(10.0, rel=1e-4)
    r = regime_check(EntanglerParams(alpha=1000, gamma=5, theta=0.0, eta=1))
    assert (r.alpha_sin_theta, r.eta_gamma2_theta2, r.deterministic) == (0.0, 0.0, False)
    # the flag uses >=, so a figure of merit exactly at the threshold counts
    at = regime_check(EntanglerParams(alpha=10, gamma=10, theta=math.pi / 2, eta=1), threshold=10)
    assert at.alpha_sin_theta == 10.0 and at.deterministic
    below = regime_check(EntanglerParams(alpha=10, gamma=2, theta=math.pi / 2, eta=1), threshold=10)
    assert below.eta_gamma2_theta2 < 10 and not below.deterministic


def test_schedule_success():
    assert schedule_success(params_with_p_error(1e-300), 40) == 1.0
    assert schedule_success(EntanglerParams(1, 1, 0.0, 1), ResourceCount()) == 1.0
    p = params_with_p_error(0.01)
    assert error_probability(p) == pytest.approx(0.01, rel=1e-12)
    lattice = count_resources(build_lattice(5))
    assert schedule_success(p, lattice) == pytest.approx(0.99**40, rel=1e-10)
    assert round(schedule_success(p, lattice), 4) == 0.6690


def test_sweep_and_csv():
    base = EntanglerParams(alpha=50, gamma=30, theta=0.05, eta=0.9)
    rows = sweep(base, "theta", [0.0, 0.01, 0.02])
    assert rows[0].p_error == 1.0
    text = to_csv("theta", rows)
    lines = text.splitlines()
    assert lines[0] == "axis,value,p_error,success_n40"
    assert len(lines) == 1 + 3 and text.endswith("\n")
    assert lines[2].startswith("theta,0.01,")
    with pytest.raises(ValueError):
        sweep(base, "kappa", [1.0])
    with pytest.raises(ValueError):
        sweep(base, "eta", [2.0])


def test_parse_range():
    assert parse_range("alpha=0:10:3") == ("alpha", [0.0, 5.0, 10.0])
    assert parse_range("eta=0.5:1:1") == ("eta", [0.5])
    with pytest.raises(ValueError):
        parse_range("alpha=0:10")


@given(st.floats(0, 500), st.floats(0, 500), st.floats(0, math.pi / 2), st.floats(0, 1))
def test_probability_range(alpha, gamma, theta, eta):
    p = EntanglerParams(alpha, gamma, theta, eta)
    pe = error_probability(p)
    assert 0 <= pe <= 1
    exponent = 2 * (1 - math.exp(-0.5 * eta * gamma**2 * theta**2)) * alpha**2 * math.sin(theta) ** 2
    assert (pe == 1.0) == (exponent == 0.0) or exponent < 1e-16


def test_monotone_in_alpha_and_eta_on_random_grid():
    rng = np.random.default_rng(7)
    for _ in range(20):
        gamma, theta = rng.uniform(0, 50), rng.uniform(0, math.pi / 2)
        alphas = np.sort(rng.uniform(0, 30, 20))
        etas = np.sort(rng.uniform(0, 1, 20))
        eta = rng.uniform(0, 1)
        pe = [error_probability(EntanglerParams(a, gamma, theta, eta)) for a in alphas]
        assert all(x >= y for x, y in zip(pe, pe[1:]))
        alpha = rng.uniform(0, 30)
        pe = [error_probability(EntanglerParams(alpha, gamma, theta, e)) for e in etas]
        assert all(x >= y for x, y in zip(pe, pe[1:]))


@given(st.integers(0, 200), st.integers(0, 200))
def test_success_non_increasing_in_equiv(a, b):
    p = EntanglerParams(3, 2, 0.4, 0.8)
    lo, hi = sorted((a, b))
    assert schedule_success(p, hi) <= schedule_success(p, lo)
