import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varlex.domain_grid import GridFunction, build_domain
from varlex.errors import VarlexError
from varlex.exponent_field import ExponentField, constant_exponent, log_decay_exponent
from varlex.variable_norm import luxemburg_norm, modular, normalize

import oracles


@pytest.fixture
def unit():
    return build_domain([[0, 1]], 10)


def test_modular_simple_values(unit):
    p = log_decay_exponent(unit, 1.5, 0.7)
    assert modular(GridFunction.constant(unit, 1.0), p) == pytest.approx(1.0, rel=1e-15)
    assert modular(GridFunction.constant(unit, 0.0), p) == 0.0
    assert modular(GridFunction.constant(unit, 2.0), constant_exponent(unit, 3.0)) == pytest.approx(8.0, rel=1e-15)


def test_constant_closed_form(unit):
    res = luxemburg_norm(GridFunction.constant(unit, 2.0), constant_exponent(unit, 2.0))
    assert res.norm == pytest.approx(2.0, rel=1e-10)
    assert res.bracket[0] <= res.norm <= res.bracket[1]
    assert luxemburg_norm(GridFunction.constant(unit, 1.0), constant_exponent(unit, 2.0)).norm == pytest.approx(1.0, rel=1e-10)


def test_measure_scaling():
    d = build_domain([[0, 4]], 16)
    res = luxemburg_norm(GridFunction.constant(d, 2.0), constant_exponent(d, 2.0))
    assert res.norm == pytest.approx(2.0 * 4.0**0.5, rel=1e-10)


def test_zero_function():
    d = build_domain([[0, 1]], 4)
    res = luxemburg_norm(GridFunction.constant(d, 0.0), constant_exponent(d, 2.0))
    assert res.norm == 0.0 and res.iterations == 0


def test_two_cell_root():
    d = build_domain([[0, 1]], 2)
    p = ExponentField(GridFunction(d, [1.5, 3.0]))
    f = GridFunction(d, [1.0, 2.0])
    root = oracles.two_cell_root()
    with mpmath.workdps(50):
        assert abs(root - mpmath.mpf(oracles.TWO_CELL_ROOT)) < mpmath.mpf(10) ** -45
    assert luxemburg_norm(f, p).norm == pytest.approx(float(root), rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1.05, 6.0))
def test_constant_exponent_matches_lp(seed, p0):
    rng = np.random.default_rng(seed)
    d = build_domain([[0, 1]], int(rng.integers(1, 50)))
    v = rng.random(d.shape) * 10.0 ** rng.uniform(-3, 3)
    f = GridFunction(d, v)
    expected = (np.sum(v**p0) * d.h) ** (1 / p0)
    if expected > 0:
        assert luxemburg_norm(f, constant_exponent(d, p0)).norm == pytest.approx(expected, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normalize_gives_unit_modular(seed):
    rng = np.random.default_rng(seed)
    d = build_domain([[-1, 1], [-1, 1]], 8)
    p = ExponentField(GridFunction(d, 1.2 + 3 * rng.random(d.shape)))
    f = GridFunction(d, rng.random(d.shape) * 10.0 ** rng.uniform(-4, 4))
    g = normalize(f, p)
    assert modular(g, p) == pytest.approx(1.0, abs=1e-8)
    # already normalized input comes back unchanged
    assert np.allclose(normalize(g, p).values, g.values, rtol=1e-10, atol=0)


def test_normalize_constant(unit):
    g = normalize(GridFunction.constant(unit, 2.0), constant_exponent(unit, 2.0))
    assert np.allclose(g.values, 1.0, rtol=1e-10)


def test_homogeneity():
    rng = np.random.default_rng(0)
    d = build_domain([[0, 1]], 32)
    p = log_decay_exponent(d, 1.3, 1.0)
    f = GridFunction(d, rng.random(32))
    a = luxemburg_norm(f, p).norm
    b = luxemburg_norm(f.scale(37.5), p).norm
    assert b == pytest.approx(37.5 * a, rel=1e-9)


def test_tolerance_validated(unit):
    f = GridFunction.constant(unit, 1.0)
    for tol in (0.0, 1e-3):
        with pytest.raises(VarlexError):
            luxemburg_norm(f, constant_exponent(unit, 2.0), tol)


def test_extreme_magnitudes_bracket(unit):
    p = constant_exponent(unit, 2.0)
    for scale in (1e-150, 1e150):
        res = luxemburg_norm(GridFunction.constant(unit, scale), p)
        assert res.norm == pytest.approx(scale, rel=1e-9)
