from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Literal, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from sdlab.errors import DegenerateSimplexError, GeometryInputError
from sdlab.services.geom_core import DEFAULT_AFFINE_TOL, Simplex, affine_rank, as_points

logger = logging.getLogger(__name__)

Flavor = Literal["equidistant", "min_enclosing"]

DEFAULT_RCOND = 1e-12
_INSIDE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CircumSphere:
    center: np.ndarray
    radius: float
    flavor: Flavor
    # Indices of the points on the boundary that certify minimality.
    support: Tuple[int, ...] = ()

    def contains(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        return float(np.linalg.norm(np.asarray(point) - self.center)) <= self.radius + tol

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "center": self.center.tolist(),
            "radius": self.radius,
            "support": list(self.support),
        }


def _hull_centers(points: np.ndarray) -> np.ndarray:
    """Equidistant centers of a stack of point sets, shape ``(batch, count, dim)``."""
    base = points[:, 0]
    if points.shape[1] == 1:
        return base.copy()
    spans = points[:, 1:] - base[:, None, :]
    gram = spans @ np.swapaxes(spans, 1, 2)
    rhs = 0.5 * np.einsum("bij,bij->bi", spans, spans)
    try:
        coefficients = np.linalg.solve(gram, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        coefficients = (np.linalg.pinv(gram) @ rhs[..., None])[..., 0]
    return base + np.einsum("bi,bin->bn", coefficients, spans)


def _circumsphere_in_hull(points: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """
    Center equidistant from ``points`` inside their affine hull.

    Returns ``(center, squared_radius, rcond)`` where ``rcond`` is the
    reciprocal condition number of the edge vectors spanning the hull.
    """
    base = points[0]
    if points.shape[0] == 1:
        return base.copy(), 0.0, 1.0
    spans = points[1:] - base
    singular = np.linalg.svd(spans, compute_uv=False)
    if spans.shape[0] > spans.shape[1] or singular[0] == 0.0:
        rcond = 0.0
    else:
        rcond = float(singular[-1] / singular[0])
    center = _hull_centers(points[None])[0]
    offset = center - base
    return center, float(offset @ offset), rcond


def _as_stack(vertices: np.ndarray) -> np.ndarray:
    stack = np.asarray(vertices, dtype=float)
    if stack.ndim != 3 or stack.shape[1] == 0:
        raise GeometryInputError(f"Expected a (batch, count, dim) stack, got shape {stack.shape}")
    if not np.all(np.isfinite(stack)):
        raise GeometryInputError("Point coordinates must be finite")
    return stack


def enclosing_radii(vertices: np.ndarray) -> np.ndarray:
    """
    Minimum enclosing ball radii for a stack of small point sets.

    The smallest ball is the circumball of its support face, and any center
    gives an enclosing radius no smaller than the optimum, so the radius is
    the minimum over faces of the farthest distance from the face center.
    """
    stack = _as_stack(vertices)
    batch, count, dim = stack.shape
    best = np.full(batch, np.inf)
    for size in range(1, min(count, dim + 1) + 1):
        for face in combinations(range(count), size):
            centers = _hull_centers(stack[:, face])
            reach = np.max(np.linalg.norm(stack - centers[:, None, :], axis=2), axis=1)
            best = np.fmin(best, reach)
    return best


def equidistant_radii(
    vertices: np.ndarray,
    rcond_min: float = DEFAULT_RCOND,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equidistant circumradii for a stack of simplices.

    Returns ``(radii, degenerate)``; degenerate rows carry ``nan``.
    """
    stack = _as_stack(vertices)
    batch, count, dim = stack.shape
    if count == 1:
        return np.zeros(batch), np.zeros(batch, dtype=bool)
    if count - 1 > dim:
        return np.full(batch, np.nan), np.ones(batch, dtype=bool)
    spans = stack[:, 1:] - stack[:, :1]
    singular = np.linalg.svd(spans, compute_uv=False)
    rcond = np.divide(
        singular[:, -1],
        singular[:, 0],
        out=np.zeros(batch),
        where=singular[:, 0] > 0.0,
    )
    degenerate = rcond < rcond_min
    centers = _hull_centers(stack)
    radii = np.max(np.linalg.norm(stack - centers[:, None, :], axis=2), axis=1)
    radii[degenerate] = np.nan
    return radii, degenerate


def equidistant_circumcenter(simplex: Simplex, rcond_min: float = DEFAULT_RCOND) -> CircumSphere:
    """Solves d(x, v_i)^2 = d(x, v_0)^2 within the affine hull of the simplex."""
    center, radius_sq, rcond = _circumsphere_in_hull(simplex.vertices)
    if rcond < rcond_min:
        logger.debug("Equidistant system ill-conditioned dim=%d rcond=%.3e", simplex.dim, rcond)
        raise DegenerateSimplexError(
            f"Simplex of dimension {simplex.dim} is numerically degenerate",
            rcond,
        )
    radius = float(np.max(np.linalg.norm(simplex.vertices - center, axis=1)))
    return CircumSphere(
        center=center,
        radius=radius,
        flavor="equidistant",
        support=tuple(range(simplex.dim + 1)),
    )


def min_enclosing_ball(
    points: Iterable[Sequence[float]] | np.ndarray,
    seed: int = 0,
) -> CircumSphere:
    """
    Smallest enclosing ball by Welzl's move-to-front recursion.

    The recursion depth is bounded by the support size (at most ``dim + 1``
    boundary points); the scan order is a seeded shuffle.
    """
    points = as_points(points)
    count, dim = points.shape
    order = np.random.default_rng(seed).permutation(count)
    shuffled = points[order]

    def ball_from(boundary: List[int]) -> Tuple[np.ndarray, float]:
        if not boundary:
            return np.zeros(dim), -1.0
        center = _hull_centers(shuffled[boundary][None])[0]
        radius = float(np.max(np.linalg.norm(shuffled[boundary] - center, axis=1)))
        return center, radius

    def inside(index: int, center: np.ndarray, radius: float) -> bool:
        if radius < 0:
            return False
        distance = float(np.linalg.norm(shuffled[index] - center))
        return distance <= radius * (1.0 + _INSIDE_RTOL) + _INSIDE_RTOL

    def welzl(prefix: int, boundary: List[int]) -> Tuple[np.ndarray, float, List[int]]:
        center, radius = ball_from(boundary)
        support = list(boundary)
        if len(boundary) == dim + 1:
            return center, radius, support
        for index in range(prefix):
            if not inside(index, center, radius):
                center, radius, support = welzl(index, boundary + [index])
        return center, radius, support

    center, radius, support = welzl(count, [])
    radius = max(radius, 0.0)
    original = tuple(sorted(int(order[i]) for i in support))
    logger.debug(
        "Minimum enclosing ball computed points=%d dim=%d radius=%.6g support=%s",
        count,
        dim,
        radius,
        original,
    )
    return CircumSphere(center=center, radius=radius, flavor="min_enclosing", support=original)


def jung_bound(D: float, k: int) -> float:
    """Radius D * sqrt(k / (2(k+1))) of a ball covering any set of diameter D in R^k."""
    if k < 0:
        raise GeometryInputError(f"Dimension must be non-negative, got {k}")
    return float(D * np.sqrt(k / (2.0 * (k + 1))))


def diameter(points: Iterable[Sequence[float]] | np.ndarray) -> float:
    points = as_points(points)
    if points.shape[0] < 2:
        return 0.0
    return float(np.max(pdist(points)))


def affine_dimension(
    points: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_AFFINE_TOL,
) -> int:
    return affine_rank(as_points(points), tol)
