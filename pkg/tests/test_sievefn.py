import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import spence

from dhrsieve.exceptions import DomainError
from dhrsieve.sievefn import (
    EULER_GAMMA,
    SieveConstants,
    SieveFunctions,
    march_sigma,
    method_of_steps,
)

EG = math.exp(EULER_GAMMA)
A2, B2 = 5.3577, 4.2664


def log_ratio_integral(s):
    """int_3^s log(t-2)/(t-1) dt through the dilogarithm."""
    def antider(w):
        return 0.5 * np.log(w) ** 2 + spence(1.0 - 1.0 / w)
    return antider(np.asarray(s) - 1.0) - antider(2.0)


def F1_oracle(s):
    return 2 * EG / s * (1.0 + log_ratio_integral(s)) if s > 3 else 2 * EG / s


def f1_oracle(s):
    mpmath.mp.dps = 30
    eg = mpmath.e ** mpmath.euler

    def F1(t):
        w = t - 1
        L = (mpmath.log(w) ** 2 / 2 + mpmath.polylog(2, 1 / w)) - (mpmath.log(2) ** 2 / 2
                                                                   + mpmath.polylog(2, mpmath.mpf(1) / 2))
        return 2 * eg / t * (1 + L) if t > 3 else 2 * eg / t

    tail = mpmath.quad(lambda t: F1(t - 1), [4, 5, s])
    return float((2 * eg * mpmath.log(3) + tail) / s)


def trapezoid_cumulative(y, h):
    return np.concatenate([[0.0], np.cumsum(0.5 * h * (y[1:] + y[:-1]))])


def brute_force_two_dim(h=2e-5):
    """F2 on (alpha2, 7) and f2 on (beta2, 6] by nested trapezoid sums.

    Only the elementary pieces of F2 enter in closed form; every integral is
    a fresh trapezoid sum on a fine grid.
    """
    t = np.arange(4.0, A2 + h / 2, h)
    g = (2 * (t - 3) ** 2 - (t - 2) ** 2 * np.log((t - 2) / 2)) / t ** 3
    inner = trapezoid_cumulative(g, h)
    F2_mid = 1.0 / ((9 - 8 * math.log(2)) * t ** 2 / (32 * EG ** 2) - t ** 2 / (2 * EG ** 2) * inner)

    def F2_low(s):
        return np.where(s <= 2, 8 * EG ** 2 / s ** 2,
                        np.where(s <= 4, 4 * EG ** 2 / (2 * (s - 1) ** 2 - s ** 2 * np.log(s / 2)),
                                 np.interp(s, t, F2_mid)))

    v = np.linspace(B2, 6.0, round((6.0 - B2) / h) + 1)
    f2 = 2.0 / v ** 2 * trapezoid_cumulative(v * F2_low(v - 1.0), v[1] - v[0])
    u = np.linspace(A2, 6.99, round((6.99 - A2) / h) + 1)
    f2_lag = np.interp(u - 1.0, v, f2, left=0.0)
    F2_hi = (A2 ** 2 * F2_mid[-1] + 2 * trapezoid_cumulative(u * f2_lag, u[1] - u[0])) / u ** 2
    return (v, f2), (u, F2_hi)


@pytest.fixture(scope="module")
def brute():
    return brute_force_two_dim()


# -- closed forms

def test_closed_form_spot_values(sf):
    assert sf.F1(2.0) == pytest.approx(EG, rel=1e-14)
    assert sf.f1(3.0) == pytest.approx(2 * EG * math.log(2) / 3, rel=1e-14)
    assert sf.f1(4.0) == pytest.approx(EG * math.log(3) / 2, rel=1e-14)
    assert sf.F2(2.0) == pytest.approx(2 * EG ** 2, rel=1e-14)
    assert sf.F2(3.0) == pytest.approx(4 * EG ** 2 / (8 - 9 * math.log(1.5)), rel=1e-14)
    assert sf.sigma2(4.0) == pytest.approx((18 - 16 * math.log(2)) / (4 * EG ** 2), rel=1e-13)
    assert sf.f2(4.0) == 0.0
    assert sf.f1(1.5) == 0.0


def test_f1_at_six(sf):
    assert sf.f1(6.0) == pytest.approx(0.99989, abs=5e-5)
    assert sf.f1(6.0) == pytest.approx(f1_oracle(6.0), abs=1e-10)


@pytest.mark.parametrize("s", [3.2, 3.9, 4.4, 4.77, 5.0])
def test_F1_against_dilogarithm(sf, s):
    assert sf.F1(s) == pytest.approx(F1_oracle(s), abs=1e-11)


@pytest.mark.parametrize("s", [4.1, 4.5, 5.3, 5.9])
def test_f1_against_mpmath(sf, s):
    assert sf.f1(s) == pytest.approx(f1_oracle(s), abs=1e-10)


def test_F2_and_f2_against_brute_force(sf, brute):
    (v, f2), (u, F2) = brute
    for s in (4.5, 5.0, 5.5, 6.0):
        assert sf.f2(s) == pytest.approx(np.interp(s, v, f2), abs=1e-7)
    for s in (5.5, 6.0, 6.5, 6.9):
        assert sf.F2(s) == pytest.approx(np.interp(s, u, F2), abs=1e-7)


def test_F2_continuation_against_mpmath(sf):
    # Independent single-integral check of F2(6.5) with f2 from the evaluator.
    integral = mpmath.quad(lambda t: t * float(sf.f2(float(t) - 1.0)), [A2, 5.2664 + 0.0, 6.5])
    expected = (A2 ** 2 * sf.F2(A2) + 2 * float(integral)) / 6.5 ** 2
    assert sf.F2(6.5) == pytest.approx(expected, abs=1e-9)


# -- delay equations, marched independently

def test_linear_method_of_steps(sf):
    grid, F, f = method_of_steps(1, lambda s: 2 * EG / s, lambda s: 0 * s, 2.0, 2.0, 6.0, 1e-4)
    sel = (grid > 0.5) & (grid <= 5.0)
    np.testing.assert_allclose(F[sel], sf.F1(grid[sel]), atol=2e-7)
    sel = (grid > 0.5) & (grid <= 6.0)
    np.testing.assert_allclose(f[sel], sf.f1(grid[sel]), atol=2e-7)


def test_two_dim_method_of_steps(sf):
    grid, F, f = method_of_steps(2, sf.F2, lambda s: 0 * s, A2, B2, 6.99, 1e-4)
    sel = (grid > 0.5) & (grid <= 6.99)
    np.testing.assert_allclose(F[sel], sf.F2(grid[sel]), atol=2e-7)
    sel = (grid > 0.5) & (grid <= 6.0)
    np.testing.assert_allclose(f[sel], sf.f2(grid[sel]), atol=2e-7)


def test_sigma_march_matches_reciprocal(sf):
    grid, sigma = march_sigma(2, A2, 1e-4)
    sel = grid > 0.1
    np.testing.assert_allclose(sigma[sel], sf.sigma2(grid[sel]), rtol=1e-6, atol=1e-9)


# -- structural properties

def test_junctions_are_continuous(sf):
    for name, rows in sf.junctions().items():
        for s, left, right in rows:
            assert abs(left - right) <= 1e-9, (name, s)


def test_tables_validated(sf):
    assert set(sf.table_errors) == {"F1", "f1", "f2", "F2", "sigma2"}
    assert max(sf.table_errors.values()) < 1e-8


def _interior_points(rng, lo, hi, n, avoid, margin):
    out = []
    while len(out) < n:
        s = rng.uniform(lo, hi)
        if all(abs(s - a) > margin for a in avoid):
            out.append(s)
    return out


def milli_grid(hi, closed=True):
    """Step-1e-3 grid on (0, hi], or (0, hi) when ``closed`` is false."""
    n = round(hi * 1000)
    grid = np.arange(1, n + 1) / 1000.0
    return grid if closed else grid[grid < hi]


KINKS = (2.0, 3.0, 4.0, 5.0, 6.0, A2, B2, A2 + 1, B2 + 1, A2 - 1, B2 - 1)


@pytest.mark.parametrize("which,lo,hi", [("F1", 2.0, 5.0), ("f1", 2.0, 6.0),
                                         ("F2", A2, 7.0), ("f2", B2, 6.0)])
def test_dde_residuals(sf, which, lo, hi):
    rng = np.random.default_rng(11)
    for s in _interior_points(rng, lo + 1e-3, hi - 1e-3, 50, KINKS, 3e-4):
        assert sf.dde_residual(which, s, 1e-4) < 1e-5, s


def test_dde_residual_rejects_outside(sf):
    with pytest.raises(DomainError):
        sf.dde_residual("F2", 5.0)
    with pytest.raises(ValueError):
        sf.dde_residual("F3", 5.5)
    with pytest.raises(ValueError):
        sf.dde_residual("F1", 4.0, h=0.1)


@pytest.mark.parametrize("name", ["F1", "F2"])
def test_upper_functions_nonincreasing_above_one(sf, name):
    hi = sf.DOMAINS[name][1]
    grid = milli_grid(hi, closed=name == "F1")
    values = sf.get(name)(grid)
    assert np.all(np.diff(values) <= 1e-12)
    assert np.all(values >= 1.0)


@pytest.mark.parametrize("name", ["f1", "f2"])
def test_lower_functions_nondecreasing_in_unit_interval(sf, name):
    grid = milli_grid(6.0)
    values = sf.get(name)(grid)
    assert np.all(np.diff(values) >= -1e-12)
    assert np.all((values >= 0.0) & (values <= 1.0))


@pytest.mark.parametrize("name,s", [("F1", 5.0001), ("f1", 6.01), ("F2", 7.0), ("f2", 6.5),
                                    ("sigma2", 5.4), ("F1", 0.0), ("f2", -1.0), ("F2", np.nan)])
def test_domain_errors(sf, name, s):
    with pytest.raises(DomainError):
        sf.get(name)(s)


def test_unknown_function(sf):
    with pytest.raises(ValueError):
        sf.get("F9")


@given(st.lists(st.floats(0.05, 6.99), min_size=1, max_size=20))
def test_vectorized_matches_scalar(sf, xs):
    arr = np.array(xs)
    np.testing.assert_array_equal(sf.F2(arr), [sf.F2(x) for x in xs])


def test_scalar_returns_float(sf):
    assert isinstance(sf.F1(4.0), float)
    assert sf.F2(np.ones((2, 3)) * 3).shape == (2, 3)


def test_constants_validation():
    with pytest.raises(ValueError):
        SieveConstants(alpha2=4.0, beta2=4.2)


def test_coarser_table_agrees():
    coarse = SieveFunctions(step=2e-3, validate=False)
    fine = SieveFunctions(validate=False)
    grid = np.linspace(0.5, 6.9, 200)
    np.testing.assert_allclose(coarse.F2(grid), fine.F2(grid), atol=1e-9)
