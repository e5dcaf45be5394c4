from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from scipy.optimize import minimize

from sdlab.errors import GeometryInputError, SdlabError, VerificationError
from sdlab.services.bounds import optimal_split, q_factor, sharp_pair, theorem1_bound, theorem2_bound
from sdlab.services.circumsphere import diameter
from sdlab.services.distortion import (
    Relation,
    circle_example_map,
    distortion_witness,
    one_dim_certifier,
)
from sdlab.services.geom_core import (
    Simplex,
    SpherePoint,
    affinely_independent,
    affinely_independent_stack,
    edge_length,
    geodesic_matrix,
    grid_mesh,
    longest_edges,
    sample_sphere_coords,
)
from sdlab.services.intersect import (
    IntersectionWitness,
    caratheodory_support,
    complementary_face_indices,
    hull_intersection,
    minimal_translation,
    min_vertex_distance,
    simplex_intersection,
    witness_from_weights,
)
from sdlab.services.lp import DEFAULT_LP_TOL

logger = logging.getLogger(__name__)

SAFETY_SLACK = 1e-7

T = TypeVar("T")
SeedLike = Union[int, np.random.Generator]


@dataclass
class SearchReport:
    kind: str
    seed: int
    trials: int
    found: bool
    best_value: Optional[float]
    best_trial: Optional[int]
    parameters: Dict[str, Any]
    configuration: Dict[str, Any] = field(default_factory=dict)
    trace: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "trials": self.trials,
            "found": self.found,
            "best_value": self.best_value,
            "best_trial": self.best_trial,
            "parameters": self.parameters,
            "configuration": self.configuration,
            "trace": self.trace,
        }


@dataclass(frozen=True, eq=False)
class HullAtScale:
    """Image points of every sample within geodesic distance ``eps`` of ``center``."""

    center: SpherePoint
    eps: float
    indices: Tuple[int, ...]
    cloud: np.ndarray


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _run_trials(task: Callable[[int], T], count: int, workers: int) -> List[T]:
    if workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, range(count)))
    return [task(index) for index in range(count)]


def merge_reports(
    values: Sequence[Optional[float]],
    mode: Literal["max", "min"],
) -> Optional[int]:
    """Index of the best value; ties go to the lowest trial index."""
    best: Optional[int] = None
    for index, value in enumerate(values):
        if value is None:
            continue
        if best is None:
            best = index
            continue
        current = values[best]
        if (mode == "max" and value > current) or (mode == "min" and value < current):
            best = index
    return best


def _vertices_through_origin(rng: np.random.Generator, weights: np.ndarray, n: int) -> np.ndarray:
    vertices = rng.standard_normal((weights.size, n))
    pivot = int(np.argmax(weights))
    others = np.arange(weights.size) != pivot
    vertices[pivot] = -(weights[others] @ vertices[others]) / weights[pivot]
    return vertices


def random_intersecting_pair(
    n: int,
    L: float,
    dims: Tuple[int, int],
    seed: SeedLike = 0,
    recheck: bool = True,
    max_attempts: int = 100,
) -> Tuple[Simplex, Simplex]:
    """
    Random k- and m-simplices in R^n sharing a point, with every edge at most ``L``.

    A common point is fixed first with random barycentric weights in each
    simplex; the heaviest vertex is then solved for so both combinations land
    on it, and the pair is rescaled jointly so the longest edge is ``L``.
    """
    k, m = dims
    if not (0 <= k <= n and 0 <= m <= n):
        raise GeometryInputError(f"Simplex dimensions {dims} do not fit in R^{n}")
    if L <= 0:
        raise GeometryInputError(f"Edge length must be positive, got {L}")
    rng = _rng(seed)
    for _ in range(max_attempts):
        va = _vertices_through_origin(rng, rng.dirichlet(np.ones(k + 1)), n)
        vb = _vertices_through_origin(rng, rng.dirichlet(np.ones(m + 1)), n)
        longest = max(edge_length(Simplex(va)), edge_length(Simplex(vb)))
        if longest > 0:
            va *= L / longest
            vb *= L / longest
        offset = rng.standard_normal(n) * L
        va += offset
        vb += offset
        if not (affinely_independent(va) and affinely_independent(vb)):
            continue
        first, second = Simplex(va), Simplex(vb)
        if recheck and simplex_intersection(first, second) is None:
            logger.debug("Constructed pair failed the intersection recheck, resampling")
            continue
        return first, second
    raise SdlabError(f"Could not draw an intersecting pair after {max_attempts} attempts")


def _stack_through_origin(rng: np.random.Generator, count: int, size: int, n: int) -> np.ndarray:
    weights = rng.dirichlet(np.ones(size), size=count)
    vertices = rng.standard_normal((count, size, n))
    rows = np.arange(count)
    pivot = np.argmax(weights, axis=1)
    pivot_weight = weights[rows, pivot][:, None]
    combined = np.einsum("bp,bpn->bn", weights, vertices)
    vertices[rows, pivot] = -(combined - pivot_weight * vertices[rows, pivot]) / pivot_weight
    return vertices


def random_intersecting_batch(
    n: int,
    L: float,
    dims: Tuple[int, int],
    count: int,
    seed: SeedLike = 0,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ``count`` pairs drawn like :func:`random_intersecting_pair`, as stacks.

    Returns ``(va, vb, independent)``; rows where either simplex fails the
    affine independence test are flagged instead of resampled.
    """
    k, m = dims
    if not (0 <= k <= n and 0 <= m <= n):
        raise GeometryInputError(f"Simplex dimensions {dims} do not fit in R^{n}")
    if L <= 0:
        raise GeometryInputError(f"Edge length must be positive, got {L}")
    rng = _rng(seed)
    va = _stack_through_origin(rng, count, k + 1, n)
    vb = _stack_through_origin(rng, count, m + 1, n)
    longest = np.maximum(longest_edges(va), longest_edges(vb))
    scale = np.divide(L, longest, out=np.ones(count), where=longest > 0)
    offset = rng.standard_normal((count, 1, n)) * L
    va = va * scale[:, None, None] + offset
    vb = vb * scale[:, None, None] + offset
    independent = affinely_independent_stack(va) & affinely_independent_stack(vb)
    return va, vb, independent


def _normalized_gap(va: np.ndarray, vb: np.ndarray, L: float) -> Optional[float]:
    longest = max(edge_length(Simplex(va)), edge_length(Simplex(vb)))
    if longest <= 0:
        return None
    _, _, distance = min_vertex_distance(Simplex(va), Simplex(vb))
    return distance * L / longest


def _repair(cand_a: np.ndarray, cand_b: np.ndarray, L: float) -> Optional[Tuple[float, np.ndarray, np.ndarray]]:
    """Translates ``cand_b`` back onto ``cand_a`` and rescales to longest edge ``L``."""
    # One LP: least translation of the second simplex restoring a common point.
    try:
        shift, _ = minimal_translation(cand_a, cand_b)
    except SdlabError:
        return None
    cand_b = cand_b + shift
    longest = max(edge_length(Simplex(cand_a)), edge_length(Simplex(cand_b)))
    if longest <= 0:
        return None
    cand_a = cand_a * (L / longest)
    cand_b = cand_b * (L / longest)
    if not (affinely_independent(cand_a) and affinely_independent(cand_b)):
        return None
    value = _normalized_gap(cand_a, cand_b, L)
    if value is None:
        return None
    return value, cand_a, cand_b


def _climb(
    va: np.ndarray,
    vb: np.ndarray,
    L: float,
    climb_steps: int,
    rng: np.random.Generator,
    step: float,
) -> Tuple[float, np.ndarray, np.ndarray, int]:
    n = va.shape[1]
    value = _normalized_gap(va, vb, L) or 0.0
    sigma = step * L
    failures = 0
    accepted = 0
    total = va.shape[0] + vb.shape[0]
    for _ in range(climb_steps):
        cand_a, cand_b = va.copy(), vb.copy()
        pick = int(rng.integers(total))
        delta = rng.standard_normal(n) * sigma
        if pick < va.shape[0]:
            cand_a[pick] += delta
        else:
            cand_b[pick - va.shape[0]] += delta

        repaired = _repair(cand_a, cand_b, L)
        if repaired is not None and repaired[0] >= value:
            value, va, vb = repaired
            accepted += 1
            failures = 0
            continue
        failures += 1
        if failures >= 25:
            sigma *= 0.5
            failures = 0
            # Restart the step size once it is too small to move anything.
            if sigma < 1e-6 * L:
                sigma = step * L
    return value, va, vb, accepted


def polish_pair(
    va: np.ndarray,
    vb: np.ndarray,
    L: float,
    max_iter: int = 200,
) -> Optional[Tuple[float, np.ndarray, np.ndarray]]:
    """
    Local maximisation of the nearest cross vertex distance of a meeting pair.

    Variables are both vertex sets, barycentric weights ``alpha`` and
    ``beta`` placing the common point at the origin, and the squared gap
    ``s``. SLSQP maximises ``s`` subject to every cross distance squared
    staying above ``s`` and every edge staying at most ``L``. The result is
    repaired and rescaled like a climb step, so its value is exact for a
    pair that meets.
    """
    witness = simplex_intersection(Simplex(va), Simplex(vb))
    if witness is None:
        return None
    p, n = va.shape
    q = vb.shape[0]
    split_b = p * n
    split_alpha = (p + q) * n
    split_beta = split_alpha + p
    size = split_beta + q + 1
    pairs_a = [(i, j) for i in range(p) for j in range(i + 1, p)]
    pairs_b = [(i, j) for i in range(q) for j in range(i + 1, q)]

    def unpack(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
        return (
            z[:split_b].reshape(p, n),
            z[split_b:split_alpha].reshape(q, n),
            z[split_alpha:split_beta],
            z[split_beta:-1],
            float(z[-1]),
        )

    def cross(z: np.ndarray) -> np.ndarray:
        a, b, _, _, s = unpack(z)
        return np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2).ravel() - s

    def cross_jac(z: np.ndarray) -> np.ndarray:
        a, b, _, _, _ = unpack(z)
        jac = np.zeros((p * q, size))
        for i in range(p):
            for j in range(q):
                row = i * q + j
                gradient = 2.0 * (a[i] - b[j])
                jac[row, i * n:(i + 1) * n] = gradient
                jac[row, split_b + j * n:split_b + (j + 1) * n] = -gradient
                jac[row, -1] = -1.0
        return jac

    def edges(z: np.ndarray) -> np.ndarray:
        a, b, _, _, _ = unpack(z)
        lengths = [a[i] - a[j] for i, j in pairs_a] + [b[i] - b[j] for i, j in pairs_b]
        return L * L - np.sum(np.square(lengths), axis=1)

    def edges_jac(z: np.ndarray) -> np.ndarray:
        a, b, _, _, _ = unpack(z)
        jac = np.zeros((len(pairs_a) + len(pairs_b), size))
        for row, (i, j) in enumerate(pairs_a):
            gradient = 2.0 * (a[i] - a[j])
            jac[row, i * n:(i + 1) * n] = -gradient
            jac[row, j * n:(j + 1) * n] = gradient
        for row, (i, j) in enumerate(pairs_b, start=len(pairs_a)):
            gradient = 2.0 * (b[i] - b[j])
            jac[row, split_b + i * n:split_b + (i + 1) * n] = -gradient
            jac[row, split_b + j * n:split_b + (j + 1) * n] = gradient
        return jac

    def meeting(z: np.ndarray) -> np.ndarray:
        a, b, alpha, beta, _ = unpack(z)
        return np.concatenate([alpha @ a, beta @ b, [alpha.sum() - 1.0, beta.sum() - 1.0]])

    def meeting_jac(z: np.ndarray) -> np.ndarray:
        a, b, alpha, beta, _ = unpack(z)
        jac = np.zeros((2 * n + 2, size))
        eye = np.eye(n)
        for i in range(p):
            jac[:n, i * n:(i + 1) * n] = alpha[i] * eye
            jac[:n, split_alpha + i] = a[i]
        for j in range(q):
            jac[n:2 * n, split_b + j * n:split_b + (j + 1) * n] = beta[j] * eye
            jac[n:2 * n, split_beta + j] = b[j]
        jac[2 * n, split_alpha:split_beta] = 1.0
        jac[2 * n + 1, split_beta:-1] = 1.0
        return jac

    def objective(z: np.ndarray) -> Tuple[float, np.ndarray]:
        gradient = np.zeros(size)
        gradient[-1] = -1.0
        return -float(z[-1]), gradient

    origin = witness.point
    gap = float(np.min(np.sum((va[:, None, :] - vb[None, :, :]) ** 2, axis=2)))
    start = np.concatenate(
        [(va - origin).ravel(), (vb - origin).ravel(), witness.alpha.weights, witness.beta.weights, [gap]]
    )
    constraints = [
        {"type": "ineq", "fun": cross, "jac": cross_jac},
        {"type": "eq", "fun": meeting, "jac": meeting_jac},
    ]
    if pairs_a or pairs_b:
        constraints.append({"type": "ineq", "fun": edges, "jac": edges_jac})
    bounds = [(None, None)] * split_alpha + [(0.0, 1.0)] * (p + q) + [(0.0, None)]
    result = minimize(
        objective,
        start,
        jac=True,
        method="SLSQP",
        bounds=bounds,
        constraints=constraints,
        options={"maxiter": max_iter, "ftol": 1e-14},
    )
    if not np.all(np.isfinite(result.x)):
        return None
    a, b, _, _, _ = unpack(result.x)
    logger.debug("Polish finished success=%s iterations=%s gap=%.12g", result.success, result.nit, -result.fun)
    return _repair(a.copy(), b.copy(), L)


def adversarial_vertex_gap_search(
    n: int,
    L: float,
    trials: int,
    climb_steps: int,
    seed: int = 0,
    init: Literal["random", "sharp"] = "random",
    step: float = 0.25,
    workers: int = 1,
    polish: bool = True,
) -> SearchReport:
    """
    Hill-climbs intersecting simplex pairs of dimensions floor(n/2), ceil(n/2)
    to make the nearest cross vertex pair as far apart as possible at
    longest edge ``L``. Any value above the vertex bound is an error.

    With ``polish`` every trial's climbed pair and its starting pair are
    refined by :func:`polish_pair`; the trial keeps whichever is best. The
    polish runs sequentially after the climbs, so results do not depend on
    ``workers``.
    """
    if trials < 1 or climb_steps < 1:
        raise GeometryInputError("trials and climb_steps must be at least 1")
    if L <= 0:
        raise GeometryInputError(f"Edge length must be positive, got {L}")
    bound = theorem2_bound(n, L).value
    dims = optimal_split(n)

    def trial(index: int) -> Tuple[Tuple[float, np.ndarray, np.ndarray, int], Tuple[np.ndarray, np.ndarray]]:
        rng = np.random.default_rng(seed + index)
        if init == "sharp":
            first, second = sharp_pair(n, L)
        else:
            first, second = random_intersecting_pair(n, L, dims, rng)
        start = (first.vertices.copy(), second.vertices.copy())
        return _climb(start[0], start[1], L, climb_steps, rng, step), start

    results = []
    polished = 0
    for (value, va, vb, accepted), start in _run_trials(trial, trials, workers):
        if polish:
            for candidate in ((va, vb), start):
                refined = polish_pair(candidate[0], candidate[1], L)
                if refined is not None and refined[0] > value:
                    value, va, vb = refined
                    polished += 1
        results.append((value, va, vb, accepted))
    values = [result[0] for result in results]
    best = merge_reports(values, "max")
    value, va, vb, accepted = results[best]

    if simplex_intersection(Simplex(va), Simplex(vb)) is None:
        raise VerificationError(
            "Best configuration no longer intersects",
            {"n": n, "L": L, "a": va.tolist(), "b": vb.tolist()},
        )
    if value > bound + SAFETY_SLACK:
        raise VerificationError(
            f"Vertex gap {value!r} exceeds the bound {bound!r}",
            {"n": n, "L": L, "seed": seed, "trial": best, "a": va.tolist(), "b": vb.tolist()},
        )
    logger.info(
        "Adversarial search done n=%d trials=%d best=%.12g bound=%.12g ratio=%.6f",
        n,
        trials,
        value,
        bound,
        value / bound if bound else float("nan"),
    )
    trace = np.maximum.accumulate(np.array(values)).tolist()
    return SearchReport(
        kind="adversarial",
        seed=seed,
        trials=trials,
        found=True,
        best_value=value,
        best_trial=best,
        parameters={
            "n": n,
            "L": L,
            "climb_steps": climb_steps,
            "init": init,
            "step": step,
            "polish": polish,
        },
        configuration={
            "a": va.tolist(),
            "b": vb.tolist(),
            "bound": bound,
            "ratio": value / bound if bound else None,
            "accepted_moves": accepted,
            "polish_improvements": polished,
        },
        trace=trace,
    )


def _random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _initial_images(
    coords: np.ndarray,
    n: int,
    m_target: int,
    r: float,
    restart: int,
    rng: np.random.Generator,
    init: Literal["auto", "example", "projection", "random"],
) -> np.ndarray:
    if init == "auto":
        init = "example" if n == 1 and m_target == 1 else "projection"
    if init == "example":
        if n != 1:
            raise GeometryInputError("The circle example map only applies to n = 1")
        offset = 0.0 if restart == 0 else float(rng.uniform(0.0, 2.0 * math.pi))
        angles = np.mod(np.arctan2(coords[:, 1], coords[:, 0]) - offset, 2.0 * math.pi)
        angles = np.where(angles >= 2.0 * math.pi, 0.0, angles)
        values = np.array([circle_example_map(float(theta), r) for theta in angles])
        images = np.zeros((coords.shape[0], m_target))
        images[:, 0] = values
        return images
    if init == "projection":
        rotated = coords if restart == 0 else coords @ _random_rotation(rng, n + 1)
        return rotated[:, :m_target].copy()
    return rng.standard_normal((coords.shape[0], m_target)) * r


def _subgradient_descent(
    images: np.ndarray,
    source_d: np.ndarray,
    iterations: int,
    step0: float,
    active_tol: float = 1e-6,
) -> Tuple[float, np.ndarray, List[float]]:
    best_value = math.inf
    best_images = images.copy()
    trace: List[float] = []
    for t in range(1, iterations + 1):
        diff = images[:, None, :] - images[None, :, :]
        target_d = np.linalg.norm(diff, axis=2)
        deviation = target_d - source_d
        absolute = np.abs(deviation)
        current = float(absolute.max())
        trace.append(current)
        if current < best_value:
            best_value, best_images = current, images.copy()
        active = absolute >= current - active_tol
        weights = np.sign(deviation) * active
        safe = np.where(target_d > 0, target_d, 1.0)
        gradient = np.einsum("ij,ijk->ik", weights / safe, diff)
        norm = float(np.linalg.norm(gradient))
        if norm == 0.0:
            break
        images = images - (step0 / math.sqrt(t)) * gradient / norm
    return best_value, best_images, trace


def minimax_distortion_search(
    n: int,
    m_target: int,
    r: float,
    N: int,
    restarts: int,
    seed: int = 0,
    iterations: int = 300,
    init: Literal["auto", "example", "projection", "random"] = "auto",
    step: float = 0.1,
    workers: int = 1,
) -> SearchReport:
    """
    Minimises the sampled distortion of maps from a fixed sphere sample into
    R^m_target by subgradient steps on the pairs attaining the maximum.

    The report trace is the per-iteration distortion of the winning restart;
    ``restart_best`` in the configuration holds every restart's best value.
    """
    if not 1 <= m_target <= n:
        raise GeometryInputError(f"Target dimension must lie in [1, {n}], got {m_target}")
    if N < 3:
        raise GeometryInputError(f"Sample size must be at least 3, got {N}")
    if n == 1 and N % 2 == 0:
        raise GeometryInputError(f"Circle samples must have odd size, got {N}")
    if restarts < 1:
        raise GeometryInputError("restarts must be at least 1")
    coords = sample_sphere_coords(n, r, N, seed)
    source_d = geodesic_matrix(coords, coords, r)

    def restart(index: int) -> Tuple[float, np.ndarray, List[float]]:
        rng = np.random.default_rng(seed + index)
        images = _initial_images(coords, n, m_target, r, index, rng, init)
        return _subgradient_descent(images, source_d, iterations, step * r)

    results = _run_trials(restart, restarts, workers)
    values = [result[0] for result in results]
    best = merge_reports(values, "min")
    value, images, trace = results[best]

    configuration: Dict[str, Any] = {
        "images": images.tolist(),
        "restart_best": values,
        "theorem1_bound": theorem1_bound(n, r).value,
    }
    if n == 1:
        certified = one_dim_certifier(images[:, 0].tolist(), r)
        if value < certified.value - 1e-12:
            raise VerificationError(
                f"Sampled distortion {value!r} is below its certified floor {certified.value!r}",
                {"values": images[:, 0].tolist(), "r": r},
            )
        configuration["certified"] = certified.to_dict()
    else:
        configuration["mesh"] = grid_mesh(coords, r, source_d)
        configuration["slack_below_bound"] = max(0.0, theorem1_bound(n, r).value - value)
    logger.info(
        "Minimax search done n=%d m=%d N=%d restarts=%d best=%.12g",
        n,
        m_target,
        N,
        restarts,
        value,
    )
    return SearchReport(
        kind="minimax",
        seed=seed,
        trials=restarts,
        found=True,
        best_value=value,
        best_trial=best,
        parameters={
            "n": n,
            "m": m_target,
            "r": r,
            "N": N,
            "iterations": iterations,
            "init": init,
            "step": step,
        },
        configuration=configuration,
        trace=trace,
    )


def hull_at_scale(
    relation: Relation,
    index: int,
    eps: float,
    distances: Optional[np.ndarray] = None,
) -> HullAtScale:
    if relation.r is None:
        raise GeometryInputError("Relation sources must be sphere points")
    row = distances if distances is not None else geodesic_matrix(
        relation.sources[index], relation.sources, relation.r
    )[0]
    indices = tuple(int(i) for i in np.flatnonzero(row <= eps))
    return HullAtScale(
        center=SpherePoint(relation.sources[index], relation.r),
        eps=eps,
        indices=indices,
        cloud=relation.targets[list(indices)],
    )


def granas_scan(
    relation: Relation,
    eps: Optional[float] = None,
    tol: float = DEFAULT_LP_TOL,
    seed: int = 0,
) -> SearchReport:
    """
    Finite-scale search for a direction x whose image hulls near x and near
    -x meet, followed by extraction of a meeting simplex pair and a check of
    the distortion chain with slack for the scale and the grid mesh.

    The scan is deterministic; ``seed`` is the seed the relation was sampled
    with and is recorded in the report.
    """
    if relation.r is None:
        raise GeometryInputError("Relation sources must be sphere points")
    r = relation.r
    count = len(relation)
    if count < 2:
        raise GeometryInputError("Granas scan needs at least two samples")
    source_d = geodesic_matrix(relation.sources, relation.sources, r)
    mesh = grid_mesh(relation.sources, r, source_d)
    eps = 2.0 * mesh if eps is None else eps
    if eps < mesh:
        raise GeometryInputError(f"Scale {eps} is below the grid mesh {mesh}")
    dist_sampled, _, _ = distortion_witness(relation)
    target_dim = relation.targets.shape[1]
    q = q_factor(target_dim)
    parameters = {"eps": eps, "mesh": mesh, "samples": count, "r": r}

    for index in range(count):
        partner = int(np.argmax(source_d[index]))
        antipodal_gap = math.pi * r - float(source_d[index, partner])
        if antipodal_gap > mesh + 1e-12:
            continue
        near = hull_at_scale(relation, index, eps, source_d[index])
        far = hull_at_scale(relation, partner, eps, source_d[partner])
        witness = hull_intersection(near.cloud, far.cloud, tol)
        if witness is None:
            continue
        logger.info(
            "Feasible direction found index=%d partner=%d scanned=%d",
            index,
            partner,
            index + 1,
        )
        configuration = _extract_pair(
            near,
            far,
            witness,
            tol,
            dist_sampled=dist_sampled,
            eps=eps,
            mesh=mesh,
            q=q,
            r=r,
        )
        configuration.update({"index": index, "partner": partner, "antipodal_gap": antipodal_gap})
        return SearchReport(
            kind="granas",
            seed=seed,
            trials=index + 1,
            found=True,
            best_value=configuration["d"],
            best_trial=index,
            parameters=parameters,
            configuration=configuration,
        )

    logger.info("No feasible antipodal direction at eps=%.6g", eps)
    return SearchReport(
        kind="granas",
        seed=seed,
        trials=count,
        found=False,
        best_value=None,
        best_trial=None,
        parameters=parameters,
        configuration={"dist_sampled": dist_sampled},
    )


def _extract_pair(
    near: HullAtScale,
    far: HullAtScale,
    meeting: IntersectionWitness,
    tol: float,
    *,
    dist_sampled: float,
    eps: float,
    mesh: float,
    q: float,
    r: float,
) -> Dict[str, Any]:
    support_a, weights_a = caratheodory_support(meeting.alpha.combine(near.cloud), near.cloud, tol)
    support_b, weights_b = caratheodory_support(meeting.beta.combine(far.cloud), far.cloud, tol)
    va = near.cloud[list(support_a)]
    vb = far.cloud[list(support_b)]
    faces_a, faces_b, alpha, beta = complementary_face_indices(va, vb, weights_a, weights_b, tol)
    face_a = Simplex(va[faces_a])
    face_b = Simplex(vb[faces_b])
    witness = witness_from_weights(face_a.vertices, face_b.vertices, alpha, beta, tol)
    if witness is None:
        witness = simplex_intersection(face_a, face_b, tol)
    if witness is None:
        raise VerificationError(
            "Extracted simplex pair does not intersect",
            {"a": face_a.to_list(), "b": face_b.to_list()},
        )
    _, _, d = min_vertex_distance(face_a, face_b)
    pair_edge = max(edge_length(face_a), edge_length(face_b))
    cloud_diameter = max(diameter(near.cloud), diameter(far.cloud))
    slack = 2.0 * eps + mesh
    lower = math.pi * r - dist_sampled - slack
    upper = (dist_sampled + slack) * q
    return {
        "x": near.center.to_dict(),
        "a": face_a.to_list(),
        "b": face_b.to_list(),
        "cloud_indices_a": [near.indices[support_a[i]] for i in faces_a],
        "cloud_indices_b": [far.indices[support_b[j]] for j in faces_b],
        "witness": witness.to_dict(),
        "d": d,
        "L_pair": pair_edge,
        "L_cloud": cloud_diameter,
        "dist_sampled": dist_sampled,
        "q": q,
        "chain_lower": lower,
        "chain_upper": upper,
        "chain_ok": bool(lower <= d + 1e-9 and d <= upper + 1e-9),
        "vertex_bound_ok": bool(d <= q * pair_edge + 1e-9),
        "dims": [face_a.dim, face_b.dim],
    }
