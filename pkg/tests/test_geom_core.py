import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdlab.errors import GeometryInputError
from sdlab.services.geom_core import (
    BarycentricCoords,
    Simplex,
    SpherePoint,
    affinely_independent,
    affinely_independent_stack,
    antipode,
    barycenter,
    edge_length,
    faces,
    geodesic_matrix,
    grid_mesh,
    longest_edges,
    regular_simplex,
    sample_sphere,
    sample_sphere_coords,
    sphere_distance,
)


def test_affinely_independent_triangle():
    assert affinely_independent([(0, 0), (1, 0), (0, 1)])


def test_affinely_independent_collinear():
    assert not affinely_independent([(0, 0), (1, 0), (2, 0)])


def test_affinely_independent_flat_triangle():
    assert not affinely_independent([(0, 0), (1, 0), (0.5, 1e-12)], tol=1e-9)


def test_affinely_independent_too_many_points():
    assert not affinely_independent([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_affinely_independent_dimension_mismatch():
    with pytest.raises(GeometryInputError):
        affinely_independent([(0, 0), (1, 0, 0)])


def test_barycenter_segment():
    assert barycenter(Simplex([[0.0], [1.0]])) == pytest.approx([0.5])


def test_barycenter_standard_triangle():
    simplex = Simplex(np.eye(3))
    assert barycenter(simplex) == pytest.approx([1 / 3, 1 / 3, 1 / 3])


def test_faces_of_triangle():
    triangle = Simplex([(0, 0), (1, 0), (0, 1)])
    edges = faces(triangle, 1)
    assert [edge.to_list() for edge in edges] == [
        [[0, 0], [1, 0]],
        [[0, 0], [0, 1]],
        [[1, 0], [0, 1]],
    ]
    assert len(faces(triangle, 0)) == 3


def test_faces_of_tetrahedron_are_independent():
    tetrahedron = Simplex([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    triangles = faces(tetrahedron, 2)
    assert len(triangles) == 4
    assert all(affinely_independent(face.vertices) for face in triangles)


def test_faces_out_of_range():
    with pytest.raises(GeometryInputError):
        faces(Simplex([(0, 0), (1, 0)]), 2)


def test_regular_segment():
    segment = regular_simplex(1, 1.0, 2)
    assert sorted(segment.vertices[:, 0]) == pytest.approx([-0.5, 0.5])
    assert segment.vertices[:, 1] == pytest.approx([0.0, 0.0])


@pytest.mark.parametrize("m", range(1, 9))
def test_regular_simplex_edges_and_barycenter(m):
    L = 1.7
    simplex = regular_simplex(m, L, m + 2)
    diffs = simplex.vertices[:, None, :] - simplex.vertices[None, :, :]
    distances = np.linalg.norm(diffs, axis=2)[np.triu_indices(m + 1, 1)]
    assert np.max(np.abs(distances - L)) <= 1e-12 * L
    assert np.max(np.abs(barycenter(simplex))) <= 1e-12
    assert np.all(simplex.vertices[:, m:] == 0.0)


def test_regular_simplex_circumradius():
    simplex = regular_simplex(5, 2.0, 5)
    norms = np.linalg.norm(simplex.vertices, axis=1)
    assert norms == pytest.approx(np.full(6, 2.0 * math.sqrt(5 / 12)), abs=1e-12)


def test_regular_simplex_in_given_subspace():
    basis = np.eye(4)[2:]
    simplex = regular_simplex(2, 1.0, 4, basis)
    assert np.all(simplex.vertices[:, :2] == 0.0)
    assert edge_length(simplex) == pytest.approx(1.0)


def test_regular_simplex_ambient_too_small():
    with pytest.raises(GeometryInputError):
        regular_simplex(3, 1.0, 2)


def test_sphere_distance_examples():
    r = 2.5
    x = SpherePoint([r, 0.0, 0.0], r)
    assert sphere_distance(x, antipode(x)) == math.pi * r
    assert sphere_distance(x, x) == 0.0
    assert sphere_distance(x, SpherePoint([0.0, r, 0.0], r)) == pytest.approx(math.pi * r / 2)


def test_sphere_distance_radius_mismatch():
    with pytest.raises(GeometryInputError):
        sphere_distance(SpherePoint([1.0, 0.0], 1.0), SpherePoint([2.0, 0.0], 2.0))


def test_sphere_point_off_sphere():
    with pytest.raises(GeometryInputError):
        SpherePoint([1.0, 1.0], 1.0)


def test_barycentric_coords_validation():
    with pytest.raises(GeometryInputError):
        BarycentricCoords([0.7, 0.7])
    weights = BarycentricCoords([0.0, 0.25, 0.75])
    assert weights.support() == (1, 2)


def test_sample_circle_angles():
    points = sample_sphere(1, 1.0, 4)
    angles = sorted(math.atan2(p.coords[1], p.coords[0]) % (2 * math.pi) for p in points)
    assert angles == pytest.approx([0.0, math.pi / 2, math.pi, 3 * math.pi / 2], abs=1e-12)


def test_sample_circle_triangle():
    coords = sample_sphere_coords(1, 1.0, 3)
    distances = geodesic_matrix(coords, coords, 1.0)[np.triu_indices(3, 1)]
    assert distances == pytest.approx(np.full(3, 2 * math.pi / 3))


def test_fibonacci_lattice_on_sphere():
    coords = sample_sphere_coords(2, 1.0, 500)
    assert np.max(np.abs(np.linalg.norm(coords, axis=1) - 1.0)) <= 1e-12
    assert coords[0] == pytest.approx([0.0, 0.0, 1.0])
    assert coords[-1] == pytest.approx([0.0, 0.0, -1.0], abs=1e-12)


def test_high_dimensional_sampling_is_seeded():
    first = sample_sphere_coords(4, 2.0, 50, seed=3)
    second = sample_sphere_coords(4, 2.0, 50, seed=3)
    assert np.array_equal(first, second)
    assert np.linalg.norm(first, axis=1) == pytest.approx(np.full(50, 2.0))


@pytest.mark.parametrize("m", [3, 5, 101, 1001])
def test_almost_antipodal_grid_distance(m):
    r = 1.3
    coords = sample_sphere_coords(1, r, m)
    step = (m + 1) // 2
    distances = geodesic_matrix(coords, np.roll(coords, -step, axis=0), r).diagonal()
    assert np.max(np.abs(distances - math.pi * r * (m - 1) / m)) <= 1e-12


def test_grid_mesh_on_circle():
    coords = sample_sphere_coords(1, 2.0, 8)
    assert grid_mesh(coords, 2.0) == pytest.approx(2.0 * 2 * math.pi / 8)


def test_grid_mesh_reuses_distances_without_changing_them():
    coords = sample_sphere_coords(2, 1.0, 40)
    distances = geodesic_matrix(coords, coords, 1.0)
    before = distances.copy()
    assert grid_mesh(coords, 1.0, distances) == grid_mesh(coords, 1.0)
    assert np.array_equal(distances, before)
    assert grid_mesh(coords[:1], 1.0) == pytest.approx(math.pi)


def test_stacked_independence_agrees_with_single_test():
    rng = np.random.default_rng(2)
    stack = rng.standard_normal((30, 3, 3))
    stack[::3, 2] = 0.5 * (stack[::3, 0] + stack[::3, 1])
    expected = [affinely_independent(points) for points in stack]
    assert affinely_independent_stack(stack).tolist() == expected
    assert affinely_independent_stack(np.zeros((2, 1, 2))).all()
    assert not affinely_independent_stack(np.zeros((2, 4, 2))).any()


def test_longest_edges():
    stack = np.array([[(0.0, 0.0), (3.0, 4.0), (1.0, 0.0)], [(1.0, 1.0), (1.0, 1.0), (1.0, 2.0)]])
    assert longest_edges(stack).tolist() == [5.0, 1.0]
    assert longest_edges(np.ones((2, 1, 3))).tolist() == [0.0, 0.0]


@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    n=st.integers(min_value=1, max_value=4),
    r=st.floats(min_value=0.1, max_value=10.0),
)
@settings(max_examples=30, deadline=None)
def test_geodesic_metric_axioms(seed, n, r):
    coords = np.random.default_rng(seed).standard_normal((3, n + 1))
    coords = r * coords / np.linalg.norm(coords, axis=1, keepdims=True)
    d = geodesic_matrix(coords, coords, r)
    tol = 1e-9 * r
    assert np.allclose(d, d.T, atol=tol)
    assert np.all(d.diagonal() <= tol)
    assert np.all(d <= math.pi * r + tol)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                assert d[i, k] <= d[i, j] + d[j, k] + tol
