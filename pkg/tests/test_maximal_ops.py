import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varlex.domain_grid import GridFunction, build_domain
from varlex.errors import VarlexError
from varlex.maximal_ops import (
    CubeFamily,
    benchmark,
    forward_window_max,
    fractional_maximal,
    hl_maximal,
    naive_maximal,
)

import oracles


def _random_function(rng, n, m, masked=False, sparse=False):
    rule = (lambda c: np.linalg.norm(c - 0.5, axis=-1) < 0.45) if masked else None
    d = build_domain([[0, 1]] * n, m, rule)
    v = rng.random(d.shape) * 10.0 ** rng.uniform(-6, 6, d.shape)
    if sparse:
        v *= rng.random(d.shape) < 0.2
    return GridFunction(d, v)


def test_single_cell_source_hl():
    d = build_domain([[0, 1]], 4)
    f = GridFunction(d, [1.0, 0, 0, 0])
    got = hl_maximal(f).values
    assert np.allclose(got, [1 / (j + 1) for j in range(4)], rtol=1e-14)


def test_single_cell_source_fractional():
    d = build_domain([[0, 1]], 4)
    f = GridFunction(d, [1.0, 0, 0, 0])
    got = fractional_maximal(f, 0.5).values
    assert np.allclose(got, [0.25**0.5 / (j + 1) ** 0.5 for j in range(4)], rtol=1e-14)


@pytest.mark.parametrize("n,c", [(1, 3.5), (2, 0.25)])
def test_constant_is_fixed(n, c):
    d = build_domain([[0, 1]] * n, 8)
    assert np.allclose(hl_maximal(GridFunction.constant(d, c)).values, c, rtol=1e-15)


def test_zero_maps_to_zero():
    d = build_domain([[0, 1]] * 2, 8)
    assert not fractional_maximal(GridFunction.constant(d, 0.0), 0.7).values.any()


def test_side_one_family_is_abs():
    rng = np.random.default_rng(0)
    d = build_domain([[0, 1]] * 2, 9)
    f = GridFunction(d, rng.normal(size=d.shape))
    assert np.array_equal(hl_maximal(f, CubeFamily(1)).values, np.abs(f.values))


@pytest.mark.parametrize("n,m,masked,alpha", [(1, 7, False, 0.0), (1, 6, True, 0.5), (2, 4, False, 0.7), (2, 5, True, 1.3)])
def test_matches_loop_oracle(n, m, masked, alpha):
    f = _random_function(np.random.default_rng(m), n, m, masked)
    d = f.domain
    K = max(d.resolution) + 2
    fast = fractional_maximal(f, alpha, CubeFamily(K)).values
    for idx, v in oracles.maximal(d, f.values, alpha, K).items():
        assert fast[idx] == pytest.approx(v, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.booleans(), st.booleans())
def test_matches_naive(seed, n, masked, sparse):
    rng = np.random.default_rng(seed)
    f = _random_function(rng, n, int(rng.integers(1, 33 if n == 2 else 200)), masked, sparse)
    family = CubeFamily(int(rng.integers(1, max(f.domain.resolution) + 3)))
    alpha = float(rng.uniform(0, n * 0.99))
    fast = fractional_maximal(f, alpha, family).values
    slow = naive_maximal(f, alpha, family).values
    assert np.array_equal(fast == 0, slow == 0)
    nz = slow > 0
    assert np.all(np.abs(fast[nz] - slow[nz]) <= 1e-12 * slow[nz])


def test_non_square_grid():
    d = build_domain([[0, 1], [0, 3]], (5, 15))
    f = GridFunction(d, np.random.default_rng(1).random(d.shape))
    fast = fractional_maximal(f, 0.4).values
    slow = naive_maximal(f, 0.4).values
    assert np.allclose(fast, slow, rtol=1e-12, atol=0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(-20, 20))
def test_power_of_two_homogeneity_is_exact(seed, n, e):
    rng = np.random.default_rng(seed)
    f = _random_function(rng, n, 16 if n == 2 else 64)
    c = 2.0**e
    assert np.array_equal(fractional_maximal(f.scale(c), 0.3).values, c * fractional_maximal(f, 0.3).values)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_order_properties(seed, n):
    rng = np.random.default_rng(seed)
    f = _random_function(rng, n, 16 if n == 2 else 64)
    g = f + GridFunction(f.domain, rng.random(f.domain.shape) * (rng.random(f.domain.shape) < 0.3))
    alpha = float(rng.uniform(0, n * 0.9))
    mf, mg = fractional_maximal(f, alpha).values, fractional_maximal(g, alpha).values
    assert np.all(mf <= mg * (1 + 1e-12))
    mfg = fractional_maximal(f + g, alpha).values
    assert np.all(mfg <= (mf + mg) * (1 + 1e-12))
    assert np.all(hl_maximal(f).values >= np.abs(f.values))


def test_negative_values_use_modulus():
    d = build_domain([[0, 1]], 8)
    f = GridFunction(d, np.linspace(-1, 1, 8))
    assert np.array_equal(hl_maximal(f).values, hl_maximal(f.abs()).values)


def test_result_independent_of_threads(monkeypatch):
    f = _random_function(np.random.default_rng(2), 2, 24, masked=True)
    ref = fractional_maximal(f, 0.6).values
    for t in ("2", "3", "7"):
        monkeypatch.setenv("VARLEX_THREADS", t)
        assert np.array_equal(fractional_maximal(f, 0.6).values, ref)


def test_alpha_range():
    d = build_domain([[0, 1]], 4)
    f = GridFunction.constant(d, 1.0)
    for alpha in (-0.1, 1.0):
        with pytest.raises(VarlexError):
            fractional_maximal(f, alpha)
    with pytest.raises(VarlexError):
        CubeFamily(0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.integers(1, 60))
def test_forward_window_max(values, width):
    width = min(width, len(values))
    expected = [max(values[i:i + width]) for i in range(len(values) - width + 1)]
    assert forward_window_max(values, width).tolist() == expected


def test_benchmark_reports_rates():
    d = build_domain([[0, 1]] * 2, 8)
    out = benchmark(GridFunction.constant(d, 1.0), 0.5, repeats=1)
    assert out["cells"] == 64
    assert out["fast_cells_per_second"] > 0 and out["naive_cells_per_second"] > 0
