import numpy as np
import pytest

from varlex.domain_grid import (
    GridFunction,
    build_domain,
    domain_from_spec,
    integrate,
    read_function_csv,
    write_function_csv,
)
from varlex.errors import DomainEmptyError, DomainMismatchError, SpacingError, VarlexError


def test_unit_interval_four_cells():
    d = build_domain([[0, 1]], 4, lambda c: True)
    assert d.active_count == 4
    assert d.h == 0.25
    assert np.allclose(d.axis_centers(0), [0.125, 0.375, 0.625, 0.875])


def test_disk_predicate_keeps_inside_centres():
    d = build_domain([[0, 1], [0, 1]], (8, 8), lambda c: np.linalg.norm(c, axis=-1) < 0.9)
    c = (np.arange(8) + 0.5) / 8
    expected = np.hypot(c[:, None], c[None, :]) < 0.9
    assert np.array_equal(d.mask, expected)
    assert 0 < d.active_count < 64


def test_scalar_predicate_falls_back_per_cell():
    # math-only rule that cannot broadcast
    import math
    d = build_domain([[0, 1]], 10, lambda c: math.fabs(c[0] - 0.5) < 0.2)
    assert d.active_count == 4


def test_empty_domain_rejected():
    with pytest.raises(DomainEmptyError):
        build_domain([[0, 1]], 4, lambda c: False)


def test_non_uniform_spacing_rejected():
    with pytest.raises(SpacingError):
        build_domain([[0, 1], [0, 2]], (4, 4))


@pytest.mark.parametrize("box,res", [([[1, 0]], 4), ([[0, 1]], 0), ([[0, 1]] * 3, 2)])
def test_bad_geometry_rejected(box, res):
    with pytest.raises(VarlexError):
        build_domain(box, res)


def test_integrate_constant_and_zero():
    d = build_domain([[0, 1]], 10)
    assert integrate(GridFunction.constant(d, 1.0)) == pytest.approx(1.0, rel=1e-15)
    assert integrate(GridFunction.constant(d, 0.0)) == 0.0


def test_integrate_hand_sum():
    d = build_domain([[0, 1]], 3)
    f = GridFunction(d, [0.0, 1.0, 2.0])
    assert integrate(f) == pytest.approx(1.0, rel=1e-15)


def test_integrate_ignores_inactive_cells():
    d = build_domain([[0, 1]], 4, np.array([True, False, True, True]))
    f = GridFunction(d, [1.0, 100.0, 1.0, 1.0])
    assert f.values[1] == 0.0
    assert integrate(f) == pytest.approx(0.75)


def test_grid_function_is_read_only_and_finite():
    d = build_domain([[0, 1]], 4)
    f = GridFunction(d, [1, 2, 3, 4])
    with pytest.raises(ValueError):
        f.values[0] = 5
    with pytest.raises(VarlexError):
        GridFunction(d, [1, np.nan, 0, 0])
    with pytest.raises(VarlexError):
        GridFunction(d, [1, 2, 3])


def test_mixing_domains_rejected():
    a = GridFunction.constant(build_domain([[0, 1]], 4), 1)
    b = GridFunction.constant(build_domain([[0, 1]], 8), 1)
    with pytest.raises(DomainMismatchError):
        a + b


def test_refined_inherits_mask():
    d = build_domain([[0, 1]], 4, np.array([True, False, True, True]))
    r = d.refined(2)
    assert r.resolution == (8,)
    assert list(r.mask) == [True, True, False, False, True, True, True, True]


def test_radius_is_distance_from_origin():
    d = build_domain([[-1, 1], [-1, 1]], 4)
    assert d.radius[0, 0] == pytest.approx(np.hypot(0.75, 0.75))


@pytest.mark.parametrize(
    "mask,count",
    [("all", 64), ("disk", None), ("disk:0.5", None), ("disk:0.5,0.5,0.25", None)],
)
def test_domain_spec_masks(mask, count):
    d = domain_from_spec({"n": 2, "box": [[0, 1], [0, 1]], "resolution": [8, 8], "mask": mask})
    if count is not None:
        assert d.active_count == count
    else:
        assert 0 < d.active_count < 64


def test_csv_round_trip(tmp_path):
    d = build_domain([[-1, 1], [-1, 1]], 6, lambda c: np.linalg.norm(c, axis=-1) < 0.9)
    rng = np.random.default_rng(3)
    f = GridFunction(d, rng.normal(size=d.shape))
    path = tmp_path / "f.csv"
    write_function_csv(f, path)
    g = read_function_csv(path, d)
    assert np.array_equal(g.values, f.values)
    inferred = read_function_csv(path)
    assert inferred.domain.active_count == d.active_count
    assert np.array_equal(inferred.active_values(), f.active_values())


def test_csv_mask_file(tmp_path):
    d = build_domain([[0, 1]], 4)
    write_function_csv(GridFunction(d, [1, 0, 1, 1]), tmp_path / "m.csv")
    spec = {"n": 1, "box": [[0, 1]], "resolution": [4], "mask": "csv:m.csv"}
    assert list(domain_from_spec(spec, tmp_path).mask) == [True, False, True, True]


def test_csv_rejects_off_grid_rows(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("x1,value\n0.3,1.0\n")
    with pytest.raises(VarlexError):
        read_function_csv(path, build_domain([[0, 1]], 4))
