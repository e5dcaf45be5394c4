from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.distance import cdist

from sdlab.errors import ContainmentError, GeometryInputError
from sdlab.services.geom_core import (
    DEFAULT_AFFINE_TOL,
    BarycentricCoords,
    Simplex,
    affinely_independent,
    as_point,
    as_points,
    require_same_dimension,
)
from sdlab.services.lp import DEFAULT_LP_TOL, LPProblem, solve

logger = logging.getLogger(__name__)

# Residual allowed between the two convex combinations of a witness,
# relative to the scale of the input coordinates.
_WITNESS_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class IntersectionWitness:
    point: np.ndarray
    alpha: BarycentricCoords
    beta: BarycentricCoords

    @property
    def support_a(self) -> Tuple[int, ...]:
        return self.alpha.support()

    @property
    def support_b(self) -> Tuple[int, ...]:
        return self.beta.support()

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "alpha": self.alpha.weights.tolist(),
            "beta": self.beta.weights.tolist(),
            "support_a": list(self.support_a),
            "support_b": list(self.support_b),
        }


def convex_combination_problem(a: np.ndarray, b: np.ndarray) -> LPProblem:
    """
    Feasibility encoding of ``sum alpha_i a_i = sum beta_j b_j``.

    Variables are ``(alpha, beta) >= 0``; rows are the two unit-sum
    constraints followed by one coordinate row per ambient dimension.
    """
    count_a, dim = a.shape
    count_b = b.shape[0]
    a_eq = np.zeros((dim + 2, count_a + count_b))
    a_eq[0, :count_a] = 1.0
    a_eq[1, count_a:] = 1.0
    a_eq[2:, :count_a] = a.T
    a_eq[2:, count_a:] = -b.T
    b_eq = np.zeros(dim + 2)
    b_eq[:2] = 1.0
    return LPProblem(a_eq, b_eq)


def _snap_weights(weights: np.ndarray, tol: float) -> np.ndarray:
    snapped = np.where(weights < tol, 0.0, weights)
    total = snapped.sum()
    if total <= 0.0:
        return weights / weights.sum()
    return snapped / total


def _scale(*clouds: np.ndarray) -> float:
    return max(1.0, max(float(np.max(np.abs(cloud))) for cloud in clouds))


def _make_witness(
    a: np.ndarray,
    b: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
) -> Optional[IntersectionWitness]:
    side_a = alpha @ a
    side_b = beta @ b
    residual = float(np.linalg.norm(side_a - side_b))
    if residual > _WITNESS_RTOL * _scale(a, b):
        logger.warning("Witness rejected after snapping residual=%.3e", residual)
        return None
    return IntersectionWitness(
        point=0.5 * (side_a + side_b),
        alpha=BarycentricCoords(alpha),
        beta=BarycentricCoords(beta),
    )


def hull_intersection(
    A: Iterable[Sequence[float]] | np.ndarray,
    B: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_LP_TOL,
) -> Optional[IntersectionWitness]:
    """
    Common point of conv(A) and conv(B), or ``None``.

    The witness weights come from a basic feasible solution, so each support
    has at most ``dim + 1`` indices.
    """
    a = as_points(A)
    b = as_points(B)
    require_same_dimension(a, b)
    result = solve(convex_combination_problem(a, b), tol=tol)
    if not result.feasible:
        return None
    count_a = a.shape[0]
    alpha = _snap_weights(result.x[:count_a], tol)
    beta = _snap_weights(result.x[count_a:], tol)
    return _make_witness(a, b, alpha, beta)


def simplex_intersection(a: Simplex, b: Simplex, tol: float = DEFAULT_LP_TOL) -> Optional[IntersectionWitness]:
    return hull_intersection(a.vertices, b.vertices, tol)


def caratheodory_support(
    x: Sequence[float] | np.ndarray,
    A: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_LP_TOL,
    affine_tol: float = DEFAULT_AFFINE_TOL,
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    Indices of an affinely independent subset of ``A`` whose hull contains
    ``x``, with the matching convex weights.
    """
    point = as_point(x)
    cloud = as_points(A)
    require_same_dimension(cloud, point[None, :])
    count, dim = cloud.shape
    a_eq = np.vstack([np.ones((1, count)), cloud.T])
    b_eq = np.concatenate([[1.0], point])
    result = solve(LPProblem(a_eq, b_eq), tol=tol)
    if not result.feasible:
        raise ContainmentError("Point is not in the convex hull", result.infeasibility)

    weights = _snap_weights(result.x, tol)
    indices = [int(i) for i in np.flatnonzero(weights > 0)]
    weights = weights[indices]
    # A basic solution is affinely independent in exact arithmetic; drop
    # points along affine dependences until the tolerance test agrees.
    while not affinely_independent(cloud[indices], affine_tol):
        indices, weights = _drop_affine_dependence(cloud, indices, weights)
    logger.debug(
        "Caratheodory support found size=%d from=%d dim=%d",
        len(indices),
        count,
        dim,
    )
    return tuple(indices), weights


def _drop_affine_dependence(
    cloud: np.ndarray,
    indices: List[int],
    weights: np.ndarray,
) -> Tuple[List[int], np.ndarray]:
    lifted = np.vstack([np.ones((1, len(indices))), cloud[indices].T])
    _, _, vh = np.linalg.svd(lifted)
    dependence = vh[-1]
    if not np.any(dependence > 0):
        dependence = -dependence
    positive = dependence > 0
    ratios = np.full(len(indices), np.inf)
    ratios[positive] = weights[positive] / dependence[positive]
    drop = int(np.argmin(ratios))
    updated = weights - ratios[drop] * dependence
    updated[drop] = 0.0
    updated = np.clip(updated, 0.0, None)
    keep = [i for i in range(len(indices)) if i != drop]
    new_weights = updated[keep]
    return [indices[i] for i in keep], new_weights / new_weights.sum()


def caratheodory_reduce(
    x: Sequence[float] | np.ndarray,
    A: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_LP_TOL,
) -> Simplex:
    indices, _ = caratheodory_support(x, A, tol)
    return Simplex(as_points(A)[list(indices)])


def _hull_direction(
    va: np.ndarray,
    vb: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Unit direction common to both affine hulls, as barycentric velocities.

    Returns ``(u, d_alpha, d_beta)`` with ``sum d_alpha = sum d_beta = 0`` and
    ``d_alpha @ va = d_beta @ vb = u``.
    """
    spans_a = (va[1:] - va[0]).T
    spans_b = (vb[1:] - vb[0]).T
    kernel = null_space(np.hstack([spans_a, -spans_b]))
    k = spans_a.shape[1]
    for column in kernel.T:
        s, t = column[:k], column[k:]
        u = spans_a @ s
        norm = float(np.linalg.norm(u))
        if norm > 1e-12:
            d_alpha = np.concatenate([[-s.sum()], s]) / norm
            d_beta = np.concatenate([[-t.sum()], t]) / norm
            return u / norm, d_alpha, d_beta
    raise GeometryInputError("Affine hulls share no direction; simplices are degenerate")


def _first_exit(weights: np.ndarray, velocity: np.ndarray) -> Tuple[float, int]:
    decreasing = np.flatnonzero(velocity < -1e-15)
    times = weights[decreasing] / -velocity[decreasing]
    best = int(np.argmin(times))
    return float(max(times[best], 0.0)), int(decreasing[best])


def complementary_face_indices(
    va: np.ndarray,
    vb: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
    tol: float = DEFAULT_LP_TOL,
) -> Tuple[List[int], List[int], np.ndarray, np.ndarray]:
    """
    Index form of `reduce_to_complementary_dims`: vertex indices of the
    reduced faces and the witness weights on them.
    """
    ambient = va.shape[1]
    idx_a = list(range(va.shape[0]))
    idx_b = list(range(vb.shape[0]))
    alpha = np.array(alpha, dtype=float)
    beta = np.array(beta, dtype=float)
    while (len(idx_a) - 1) + (len(idx_b) - 1) > ambient:
        u, d_alpha, d_beta = _hull_direction(va[idx_a], vb[idx_b])
        t_a, hit_a = _first_exit(alpha, d_alpha)
        t_b, hit_b = _first_exit(beta, d_beta)
        if abs(t_a - t_b) <= tol:
            logger.debug(
                "Ambiguous boundary hit t_a=%.3e t_b=%.3e, keeping the first simplex's face",
                t_a,
                t_b,
            )
        step = min(t_a, t_b)
        alpha = np.clip(alpha + step * d_alpha, 0.0, None)
        beta = np.clip(beta + step * d_beta, 0.0, None)
        if t_a <= t_b + tol:
            del idx_a[hit_a]
            alpha = np.delete(alpha, hit_a)
        else:
            del idx_b[hit_b]
            beta = np.delete(beta, hit_b)
        alpha /= alpha.sum()
        beta /= beta.sum()
        logger.debug(
            "Face reduction step t=%.3e dims=(%d, %d) direction=%s",
            step,
            len(idx_a) - 1,
            len(idx_b) - 1,
            np.round(u, 6).tolist(),
        )
    return idx_a, idx_b, alpha, beta


def reduce_to_complementary_dims(
    a: Simplex,
    b: Simplex,
    w: IntersectionWitness,
    tol: float = DEFAULT_LP_TOL,
) -> Tuple[Simplex, Simplex, IntersectionWitness]:
    """
    Faces of ``a`` and ``b`` that still meet and whose dimensions sum to at
    most the ambient dimension.

    While ``k + m > n`` the line through the witness along a direction shared
    by both affine hulls reaches the boundary of one simplex first; that
    simplex is replaced by the facet it crosses.
    """
    require_same_dimension(a.vertices, b.vertices)
    idx_a, idx_b, alpha, beta = complementary_face_indices(
        a.vertices,
        b.vertices,
        w.alpha.weights,
        w.beta.weights,
        tol,
    )
    face_a = a.vertices[idx_a]
    face_b = b.vertices[idx_b]
    witness = _make_witness(face_a, face_b, alpha, beta)
    if witness is None:
        witness = simplex_intersection(Simplex(face_a), Simplex(face_b), tol)
    if witness is None:
        raise ContainmentError("Reduced faces no longer intersect", float("nan"))
    return Simplex(face_a), Simplex(face_b), witness


def min_vertex_distance(a: Simplex, b: Simplex) -> Tuple[int, int, float]:
    require_same_dimension(a.vertices, b.vertices)
    distances = cdist(a.vertices, b.vertices)
    flat = int(np.argmin(distances))
    i, j = divmod(flat, distances.shape[1])
    return i, j, float(distances[i, j])


def min_vertex_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Smallest cross-vertex distance of every row pair of two ``(batch, count, dim)`` stacks."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise GeometryInputError(f"Stacks of shape {a.shape} and {b.shape} do not pair up")
    differences = a[:, :, None, :] - b[:, None, :, :]
    return np.min(np.linalg.norm(differences, axis=3), axis=(1, 2))


def witness_from_weights(
    A: Iterable[Sequence[float]] | np.ndarray,
    B: Iterable[Sequence[float]] | np.ndarray,
    alpha: Sequence[float] | np.ndarray,
    beta: Sequence[float] | np.ndarray,
    tol: float = DEFAULT_LP_TOL,
) -> Optional[IntersectionWitness]:
    """Witness for given convex weights, or ``None`` if the combinations disagree."""
    a = as_points(A)
    b = as_points(B)
    return _make_witness(
        a,
        b,
        _snap_weights(np.asarray(alpha, dtype=float), tol),
        _snap_weights(np.asarray(beta, dtype=float), tol),
    )


def minimal_translation(
    A: Iterable[Sequence[float]] | np.ndarray,
    B: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_LP_TOL,
) -> Tuple[np.ndarray, IntersectionWitness]:
    """
    Translation ``s`` of least L1 norm such that conv(A) meets conv(B) + s,
    with the witness for the translated pair.
    """
    a = as_points(A)
    b = as_points(B)
    dim = require_same_dimension(a, b)
    base = convex_combination_problem(a, b)
    slack = np.vstack([np.zeros((2, 2 * dim)), np.hstack([-np.eye(dim), np.eye(dim)])])
    a_eq = np.hstack([base.a_eq, slack])
    count = a.shape[0] + b.shape[0]
    cost = np.concatenate([np.zeros(count), np.ones(2 * dim)])
    result = solve(LPProblem(a_eq, base.b_eq, cost), tol=tol)
    if result.status != "optimal":
        raise ContainmentError("Translation problem has no optimal solution", result.infeasibility)
    x = result.x
    shift = x[count:count + dim] - x[count + dim:]
    alpha = _snap_weights(x[:a.shape[0]], tol)
    beta = _snap_weights(x[a.shape[0]:count], tol)
    moved = b + shift
    witness = _make_witness(a, moved, alpha, beta)
    if witness is None:
        raise ContainmentError("Translated pair failed the witness check", float(np.abs(shift).sum()))
    return shift, witness
