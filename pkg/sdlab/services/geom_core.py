from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from sdlab.errors import GeometryInputError

logger = logging.getLogger(__name__)

DEFAULT_AFFINE_TOL = 1e-9
_NORM_TOL = 1e-9
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def as_points(points: Iterable[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Stacks points into a finite (count, dim) float array."""
    try:
        array = np.array(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise GeometryInputError(f"Points have inconsistent dimensions: {exc}") from exc
    if array.ndim == 1 and array.size == 0:
        raise GeometryInputError("At least one point is required")
    if array.ndim != 2:
        raise GeometryInputError(f"Expected a list of points, got array of shape {array.shape}")
    if array.shape[0] == 0:
        raise GeometryInputError("At least one point is required")
    if not np.all(np.isfinite(array)):
        raise GeometryInputError("Point coordinates must be finite")
    return array


def as_point(point: Sequence[float] | np.ndarray) -> np.ndarray:
    array = np.array(point, dtype=float)
    if array.ndim != 1 or not np.all(np.isfinite(array)):
        raise GeometryInputError(f"Invalid point {point!r}")
    return array


def require_same_dimension(*arrays: np.ndarray) -> int:
    dims = {array.shape[-1] for array in arrays}
    if len(dims) != 1:
        raise GeometryInputError(f"Ambient dimension mismatch: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False)
class Simplex:
    """Ordered vertex list; `dim` is the number of vertices minus one."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", _frozen(as_points(self.vertices)))

    @property
    def dim(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def edge_length(self) -> float:
        return edge_length(self)

    def to_list(self) -> List[List[float]]:
        return self.vertices.tolist()


@dataclass(frozen=True, eq=False)
class SpherePoint:
    coords: np.ndarray
    r: float

    def __post_init__(self) -> None:
        coords = _frozen(as_point(self.coords))
        if self.r <= 0:
            raise GeometryInputError(f"Sphere radius must be positive, got {self.r}")
        norm = float(np.linalg.norm(coords))
        if abs(norm - self.r) > _NORM_TOL * max(1.0, self.r):
            raise GeometryInputError(f"Point of norm {norm} is not on the sphere of radius {self.r}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "r", float(self.r))

    @property
    def n(self) -> int:
        return self.coords.shape[0] - 1

    def to_dict(self) -> dict:
        return {"coords": self.coords.tolist(), "r": self.r}


@dataclass(frozen=True, eq=False)
class BarycentricCoords:
    weights: np.ndarray
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self) -> None:
        weights = as_point(self.weights)
        if np.any(weights < -self.tol):
            raise GeometryInputError(f"Negative barycentric weight {weights.min():.3e}")
        if abs(weights.sum() - 1.0) > self.tol * max(1, weights.size):
            raise GeometryInputError(f"Barycentric weights sum to {weights.sum()!r}")
        object.__setattr__(self, "weights", _frozen(weights))

    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.weights > 0))

    def combine(self, points: np.ndarray) -> np.ndarray:
        return self.weights @ points


def affine_rank(points: np.ndarray, tol: float = DEFAULT_AFFINE_TOL) -> int:
    """
    Dimension of the affine hull of `points`.

    Pivoted symmetric elimination on the Gram matrix of the difference
    vectors; a pivot counts when it exceeds ``tol`` times the squared diameter.
    """
    points = as_points(points)
    if points.shape[0] == 1:
        return 0
    differences = points[1:] - points[0]
    gram = differences @ differences.T
    diameter_sq = float(np.max(pdist(points, "sqeuclidean")))
    if diameter_sq == 0.0:
        return 0
    threshold = tol * diameter_sq
    remaining = list(range(gram.shape[0]))
    rank = 0
    while remaining:
        pivot_index = max(remaining, key=lambda i: gram[i, i])
        pivot = gram[pivot_index, pivot_index]
        if pivot <= threshold:
            break
        column = gram[:, pivot_index].copy()
        gram = gram - np.outer(column, column) / pivot
        remaining.remove(pivot_index)
        rank += 1
    return rank


def affinely_independent(points: Iterable[Sequence[float]] | np.ndarray, tol: float = DEFAULT_AFFINE_TOL) -> bool:
    points = as_points(points)
    count = points.shape[0]
    if count == 1:
        return True
    if count - 1 > points.shape[1]:
        return False
    return affine_rank(points, tol) == count - 1


def affinely_independent_stack(stack: np.ndarray, tol: float = DEFAULT_AFFINE_TOL) -> np.ndarray:
    """
    Row-wise affine independence for a ``(batch, count, dim)`` stack.

    A row passes when the smallest squared singular value of its edge
    vectors exceeds ``tol`` times its squared diameter.
    """
    stack = np.asarray(stack, dtype=float)
    batch, count, dim = stack.shape
    if count == 1:
        return np.ones(batch, dtype=bool)
    if count - 1 > dim:
        return np.zeros(batch, dtype=bool)
    spans = stack[:, 1:] - stack[:, :1]
    singular = np.linalg.svd(spans, compute_uv=False)
    return singular[:, -1] ** 2 > tol * longest_edges(stack) ** 2


def longest_edges(stack: np.ndarray) -> np.ndarray:
    """Longest edge of every row of a ``(batch, count, dim)`` stack."""
    stack = np.asarray(stack, dtype=float)
    differences = stack[:, :, None, :] - stack[:, None, :, :]
    return np.max(np.linalg.norm(differences, axis=3), axis=(1, 2))


def barycenter(simplex: Simplex) -> np.ndarray:
    return simplex.vertices.mean(axis=0)


def face_index_sets(dim: int, k: int) -> List[tuple[int, ...]]:
    if not 0 <= k <= dim:
        raise GeometryInputError(f"Face dimension {k} outside [0, {dim}]")
    return list(combinations(range(dim + 1), k + 1))


def faces(simplex: Simplex, k: int) -> List[Simplex]:
    return [
        Simplex(simplex.vertices[list(indices)])
        for indices in face_index_sets(simplex.dim, k)
    ]


def edge_length(simplex: Simplex) -> float:
    if simplex.dim == 0:
        return 0.0
    return float(np.max(pdist(simplex.vertices)))


def regular_simplex(
    m: int,
    L: float,
    ambient_dim: int,
    subspace_basis: Optional[Sequence[Sequence[float]]] = None,
) -> Simplex:
    """
    Regular m-simplex with edge ``L`` and barycenter at the origin.

    The centered standard basis of R^(m+1) is scaled to edge ``L`` and mapped
    isometrically onto the span of ``subspace_basis`` (default: first ``m``
    coordinate axes).
    """
    if m < 0:
        raise GeometryInputError(f"Simplex dimension must be non-negative, got {m}")
    if L <= 0:
        raise GeometryInputError(f"Edge length must be positive, got {L}")
    if ambient_dim < m:
        raise GeometryInputError(f"Ambient dimension {ambient_dim} is too small for a {m}-simplex")
    if m == 0:
        return Simplex(np.zeros((1, ambient_dim)))

    if subspace_basis is None:
        basis = np.eye(ambient_dim)[:m]
    else:
        basis = np.array(subspace_basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] < m or basis.shape[1] != ambient_dim:
            raise GeometryInputError(
                f"Subspace basis of shape {basis.shape} cannot hold a {m}-simplex in R^{ambient_dim}"
            )
        basis = basis[:m]
        if not np.allclose(basis @ basis.T, np.eye(m), atol=1e-12):
            raise GeometryInputError("Subspace basis is not orthonormal")

    centered = np.eye(m + 1) - 1.0 / (m + 1)
    centered *= L / np.sqrt(2.0)
    # Rows of `centered` span the hyperplane orthogonal to (1, ..., 1).
    _, _, frame = np.linalg.svd(centered)
    local = centered @ frame[:m].T
    local -= local.mean(axis=0)
    return Simplex(local @ basis)


def _unit_rows(coords: np.ndarray) -> np.ndarray:
    return coords / np.linalg.norm(coords, axis=1, keepdims=True)


def geodesic_matrix(a: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    """
    Pairwise geodesic distances between rows of ``a`` and ``b`` on S_r.

    Uses the half-chord form ``2 atan2(|u - v|, |u + v|)``, which is exact at
    coincident and antipodal pairs.
    """
    ua = _unit_rows(np.atleast_2d(a))
    ub = _unit_rows(np.atleast_2d(b))
    angle = 2.0 * np.arctan2(cdist(ua, ub), cdist(ua, -ub))
    return r * angle


def sphere_distance(x: SpherePoint, y: SpherePoint) -> float:
    if x.r != y.r:
        raise GeometryInputError(f"Radius mismatch: {x.r} != {y.r}")
    if x.coords.shape != y.coords.shape:
        raise GeometryInputError("Sphere points live in different dimensions")
    return float(geodesic_matrix(x.coords, y.coords, x.r)[0, 0])


def antipode(x: SpherePoint) -> SpherePoint:
    return SpherePoint(-x.coords, x.r)


def sample_sphere_coords(n: int, r: float, N: int, seed: int = 0) -> np.ndarray:
    if n < 1:
        raise GeometryInputError(f"Sphere dimension must be at least 1, got {n}")
    if r <= 0:
        raise GeometryInputError(f"Sphere radius must be positive, got {r}")
    if N < 1:
        raise GeometryInputError(f"Sample size must be at least 1, got {N}")

    if n == 1:
        angles = 2.0 * np.pi * np.arange(N) / N
        coords = np.column_stack([np.cos(angles), np.sin(angles)])
    elif n == 2:
        coords = _fibonacci_lattice(N)
    else:
        rng = np.random.default_rng(seed)
        coords = rng.standard_normal((N, n + 1))
    coords = _unit_rows(coords) * r
    logger.debug("Sphere sampled n=%d N=%d r=%s seed=%d", n, N, r, seed)
    return coords


def _fibonacci_lattice(N: int) -> np.ndarray:
    # Polar axis is the last coordinate; both poles are lattice points.
    if N == 1:
        return np.array([[0.0, 0.0, 1.0]])
    index = np.arange(N, dtype=float)
    z = 1.0 - 2.0 * index / (N - 1)
    ring = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    theta = _GOLDEN_ANGLE * index
    return np.column_stack([np.cos(theta) * ring, np.sin(theta) * ring, z])


def sample_sphere(n: int, r: float, N: int, seed: int = 0) -> List[SpherePoint]:
    return [SpherePoint(row, r) for row in sample_sphere_coords(n, r, N, seed)]


def grid_mesh(coords: np.ndarray, r: float, distances: Optional[np.ndarray] = None) -> float:
    """
    Largest geodesic distance from a sample to its nearest other sample.

    ``distances`` is an already computed geodesic matrix of ``coords``; it is
    not modified.
    """
    coords = as_points(coords)
    if coords.shape[0] < 2:
        return float(np.pi * r)
    if distances is None:
        distances = geodesic_matrix(coords, coords, r)
    distances = distances + np.diag(np.full(coords.shape[0], np.inf))
    return float(np.max(np.min(distances, axis=1)))
