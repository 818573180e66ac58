import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dhrsieve.exceptions import NoSignChange, NonConvergence, NonFinite
from dhrsieve.numerics import (
    Bracket,
    QuadratureSpec,
    cumulative_integral,
    find_root,
    integrate,
)


def midpoint_rule(g, a, b, panels, chunk=1_000_000):
    """Composite midpoint rule, summed in chunks to bound memory."""
    h = (b - a) / panels
    total = 0.0
    for start in range(0, panels, chunk):
        i = np.arange(start, min(start + chunk, panels))
        total += math.fsum(g(a + (i + 0.5) * h))
    return total * h


def test_polynomial_is_exact():
    assert integrate(lambda t: 3 * t ** 2 - 2 * t + 1, -1.0, 2.0) == pytest.approx(9.0, abs=1e-13)


def test_log_endpoint_singularity():
    assert integrate(np.log, 0.0, 1.0) == pytest.approx(-1.0, abs=1e-10)


def test_inverse_sqrt_endpoint_singularity():
    val = integrate(lambda t: 1.0 / np.sqrt(t), 0.0, 1.0, QuadratureSpec(rel_tol=1e-10, abs_tol=1e-12))
    assert val == pytest.approx(2.0, rel=1e-9)


def test_against_ten_million_panel_midpoint():
    g = lambda t: np.log(t - 2.0) / (t - 1.0)  # noqa: E731
    ref = midpoint_rule(g, 3.0, 5.0, 10_000_000)
    assert integrate(g, 3.0, 5.0) == pytest.approx(ref, abs=1e-11)


def test_scalar_only_integrand_is_accepted():
    assert integrate(lambda t: math.exp(t), 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-12)


def test_empty_and_reversed_intervals():
    assert integrate(np.exp, 1.5, 1.5) == 0.0
    with pytest.raises(ValueError):
        integrate(np.exp, 2.0, 1.0)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFinite):
        integrate(lambda t: np.where(t > 0.5, np.nan, t), 0.0, 1.0)


def test_depth_limit_raises_nonconvergence():
    spec = QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300, max_depth=10)
    with pytest.raises(NonConvergence):
        integrate(lambda t: np.sign(t - 1.0 / 3.0), 0.0, 1.0, spec)


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0.0, abs_tol=0.0), dict(rel_tol=-1.0),
                                    dict(max_depth=5)])
def test_quadrature_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)


def test_bracket_validation():
    with pytest.raises(ValueError):
        Bracket(1.0, 1.0)


@given(a=st.floats(0.0, 2.0), w1=st.floats(0.01, 2.0), w2=st.floats(0.01, 2.0))
def test_additivity(a, w1, w2):
    g = lambda t: np.exp(-t) * np.cos(3.0 * t) + 1.0  # noqa: E731
    b, c = a + w1, a + w1 + w2
    assert integrate(g, a, b) + integrate(g, b, c) == pytest.approx(integrate(g, a, c), abs=1e-11)


@given(a=st.floats(0.0, 3.0), w=st.floats(0.01, 2.0), extra=st.floats(0.01, 1.0))
def test_monotone_in_upper_limit_for_positive_integrand(a, w, extra):
    g = lambda t: 1.0 / (1.0 + t * t)  # noqa: E731
    assert integrate(g, a, a + w + extra) > integrate(g, a, a + w)


def test_cumulative_integral_matches_antiderivative():
    grid = np.linspace(1.0, 4.0, 301)
    cum = cumulative_integral(lambda t: 1.0 / t, grid)
    np.testing.assert_allclose(cum, np.log(grid), atol=1e-13)


def test_find_root_cosine():
    assert find_root(np.cos, Bracket(1.0, 2.0)) == pytest.approx(math.pi / 2, abs=1e-12)


def test_find_root_no_sign_change():
    with pytest.raises(NoSignChange):
        find_root(lambda s: s * s + 1.0, Bracket(-1.0, 1.0))


@given(c=st.floats(-0.9, 0.9))
def test_find_root_residual(c):
    root = find_root(lambda s: s ** 3 - c, Bracket(-1.0, 1.0))
    assert abs(root ** 3 - c) < 1e-11
