import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from sdlab.errors import GeometryInputError
from sdlab.services.distortion import (
    PathCase,
    Relation,
    TieCase,
    check_certificate,
    circle_example_distortion,
    circle_example_map,
    circle_grid,
    circle_grid_distances,
    circle_grid_distortion,
    circle_grid_relation,
    distortion,
    distortion_witness,
    function_relation,
    grid_values,
    one_dim_certifier,
    path_bound,
    projection_map_sample,
    replay_bound,
    tie_bound,
)
from sdlab.services.geom_core import geodesic_matrix, sample_sphere, sample_sphere_coords


def test_identity_relation_has_zero_distortion():
    points = np.random.default_rng(3).standard_normal((30, 4))
    assert distortion(Relation(points, points)) == pytest.approx(0.0, abs=1e-12)


def test_projection_collapses_poles():
    relation = function_relation([[0.0, 1.0], [0.0, -1.0]], [[0.0], [0.0]], 1.0)
    assert distortion(relation) == pytest.approx(math.pi, abs=1e-12)


def test_example_map_distortion_on_fine_grid():
    relation = circle_grid_relation(grid_values(circle_example_map, 2001, 1.0), 1.0)
    value = distortion(relation)
    assert 2 * math.pi / 3 - 1e-2 < value <= 2 * math.pi / 3 + 1e-9


@pytest.mark.slow
def test_example_map_distortion_on_acceptance_grid():
    relation = circle_grid_relation(grid_values(circle_example_map, 10_000, 1.0), 1.0)
    value = distortion(relation, workers=4)
    assert 2 * math.pi / 3 - 1e-3 < value <= 2 * math.pi / 3 + 1e-9


def test_projection_map_on_circle():
    value = distortion(projection_map_sample(1, 1.0, 1000))
    assert math.pi - 1e-2 <= value <= math.pi + 1e-12


@given(n=st.integers(1, 4), r=st.floats(0.1, 10.0), seed=st.integers(0, 1000))
@settings(max_examples=20, deadline=None)
def test_projection_never_exceeds_half_circumference(n, r, seed):
    assert distortion(projection_map_sample(n, r, 60, seed)) <= math.pi * r + 1e-12


def test_projection_sample_needs_two_points():
    with pytest.raises(GeometryInputError):
        projection_map_sample(2, 1.0, 1)


def test_circle_example_map():
    assert circle_example_map(0.0, 2.0) == 0.0
    assert circle_example_map(math.pi, 3.0) == pytest.approx(math.pi)
    assert circle_example_distortion(1.5) == pytest.approx(math.pi)
    with pytest.raises(GeometryInputError):
        circle_example_map(2 * math.pi, 1.0)
    with pytest.raises(GeometryInputError):
        circle_example_map(-0.1, 1.0)


def test_circle_grid():
    grid = circle_grid(7, 2.0)
    assert grid.shape == (7, 2)
    assert np.allclose(np.linalg.norm(grid, axis=1), 2.0)
    assert grid[0] == pytest.approx([2.0, 0.0])


def test_circle_grid_distances_closed_form():
    grid = circle_grid(9, 2.0)
    from_points = geodesic_matrix(grid, grid, 2.0)
    assert circle_grid_distances(9, 2.0) == pytest.approx(from_points, abs=1e-12)
    assert circle_grid_distances(9, 2.0)[0, 4] == pytest.approx(2.0 * 2 * math.pi * 4 / 9)
    with pytest.raises(GeometryInputError):
        circle_grid_distances(0, 1.0)


@pytest.mark.parametrize(("m", "r", "seed"), [(2, 1.0, 0), (3, 0.5, 1), (101, 1.0, 2), (401, 2.5, 3)])
def test_circle_grid_distortion_matches_relation(m, r, seed):
    values = np.random.default_rng(seed).standard_normal(m) * r
    expected = distortion(circle_grid_relation(values, r))
    assert circle_grid_distortion(values, r) == pytest.approx(expected, abs=1e-12)


def test_circle_grid_distortion_of_example_map():
    values = grid_values(circle_example_map, 1001, 1.0)
    value = circle_grid_distortion(values, 1.0)
    assert 2 * math.pi / 3 - 1e-2 < value <= 2 * math.pi / 3 + 1e-9
    assert value == pytest.approx(distortion(circle_grid_relation(values, 1.0)), abs=1e-12)


def test_circle_grid_distortion_rejects_bad_values():
    with pytest.raises(GeometryInputError):
        circle_grid_distortion([], 1.0)
    with pytest.raises(GeometryInputError):
        circle_grid_distortion([0.0, math.inf, 1.0], 1.0)


def test_certifier_constant_values_tie():
    bound = one_dim_certifier([5.0, 5.0, 5.0], 1.0)
    assert isinstance(bound.certificate, TieCase)
    assert bound.value == pytest.approx(2 * math.pi / 3)
    assert bound.to_dict()["certificate"]["case"] == "tie"


def test_certifier_monotone_triple_path():
    bound = one_dim_certifier([0.0, 1.0, 2.0], 1.0)
    assert bound.certificate == PathCase(k=2, configuration=2)
    assert bound.value == pytest.approx(2 * math.pi / 9, abs=1e-10)
    assert check_certificate(bound.certificate, [0.0, 1.0, 2.0])


def test_certifier_on_example_map():
    m = 2001
    values = grid_values(circle_example_map, m, 1.0)
    bound = one_dim_certifier(values, 1.0)
    assert bound.value >= path_bound(m, 1.0)
    assert bound.value <= distortion(circle_grid_relation(values, 1.0)) + 1e-12


@pytest.mark.parametrize("values", [[], [1.0], [1.0, 2.0], [0.0, 1.0, 2.0, 3.0]])
def test_certifier_rejects_even_or_short_grids(values):
    with pytest.raises(GeometryInputError):
        one_dim_certifier(values, 1.0)


def test_certifier_rejects_bad_radius():
    with pytest.raises(GeometryInputError):
        one_dim_certifier([0.0, 1.0, 2.0], 0.0)


def test_tie_bound_beats_path_bound():
    for m in range(3, 101, 2):
        assert tie_bound(m, 1.0) > path_bound(m, 1.0)


@given(
    data=st.data(),
    half=st.integers(1, 40),
    r=st.floats(0.5, 3.0),
    integral=st.booleans(),
)
@settings(max_examples=150, deadline=None)
def test_certifier_is_sound(data, half, r, integral):
    m = 2 * half + 1
    if integral:
        element = st.integers(-3, 3).map(float)
    else:
        element = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
    values = data.draw(st.lists(element, min_size=m, max_size=m))
    bound = one_dim_certifier(values, r)
    assert check_certificate(bound.certificate, values)
    assert replay_bound(bound.certificate, m, r) == bound.value
    assert bound.value <= distortion(circle_grid_relation(values, r)) + 1e-12
    assert bound.value <= circle_grid_distortion(values, r) + 1e-12


def test_distortion_is_isometry_invariant():
    rng = np.random.default_rng(11)
    coords = sample_sphere_coords(2, 1.0, 80)
    images = rng.standard_normal((80, 2))
    base = distortion(function_relation(coords, images, 1.0))
    spin = special_ortho_group.rvs(3, random_state=5)
    turn = special_ortho_group.rvs(2, random_state=6)
    moved = function_relation(coords @ spin.T, images @ turn.T + 4.0, 1.0)
    assert distortion(moved) == pytest.approx(base, abs=1e-9)


def test_distortion_is_monotone_under_subsets():
    relation = projection_map_sample(2, 1.0, 200)
    part = relation.subset(range(0, 200, 3))
    assert distortion(part) <= distortion(relation) + 1e-15


def test_witness_is_independent_of_workers():
    relation = circle_grid_relation(grid_values(circle_example_map, 2501, 1.0), 1.0)
    assert distortion_witness(relation, workers=1) == distortion_witness(relation, workers=4)


def test_function_relation_from_sphere_points():
    points = sample_sphere(2, 2.0, 10)
    relation = function_relation(points, np.zeros((10, 1)))
    assert relation.r == 2.0
    assert len(relation) == 10


def test_relation_shape_mismatch():
    with pytest.raises(GeometryInputError):
        Relation(np.zeros((3, 2)), np.zeros((2, 2)))


def test_relation_rejects_points_off_the_sphere():
    with pytest.raises(GeometryInputError):
        function_relation([[1.0, 0.0], [0.0, 2.0]], [0.0, 1.0], 1.0)
