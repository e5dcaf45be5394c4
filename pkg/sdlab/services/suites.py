from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from sdlab.config import ToleranceConfig
from sdlab.errors import ContainmentError, SdlabError, VerificationError
from sdlab.services.bounds import (
    chain_interval,
    corollary_bound,
    lemma_circumradius_bound,
    pair_dimension_bound,
    q_factor,
    sharp_pair,
    theorem1_bound,
    theorem2_bound,
    vertex_distance_formula,
)
from sdlab.services.circumsphere import (
    affine_dimension,
    diameter,
    enclosing_radii,
    equidistant_radii,
    jung_bound,
    min_enclosing_ball,
)
from sdlab.services.distortion import (
    circle_example_map,
    circle_grid_distortion,
    circle_grid_relation,
    distortion,
    grid_values,
    one_dim_certifier,
    projection_map_sample,
    replay_bound,
)
from sdlab.services.geom_core import affinely_independent, longest_edges
from sdlab.services.intersect import (
    caratheodory_reduce,
    hull_intersection,
    min_vertex_distance,
    min_vertex_distances,
    minimal_translation,
    reduce_to_complementary_dims,
    simplex_intersection,
)
from sdlab.services.search import (
    SAFETY_SLACK,
    adversarial_vertex_gap_search,
    granas_scan,
    minimax_distortion_search,
    random_intersecting_batch,
    random_intersecting_pair,
)

logger = logging.getLogger(__name__)

ScaleName = Literal["quick", "full"]


@dataclass(frozen=True)
class SuiteScale:
    vertex_pairs_per_n: int
    jung_sets: int
    certifier_vectors: int
    certifier_max_m: int
    example_grid: int
    oracle_instances: int
    caratheodory_instances: int
    face_reductions: int
    adversarial_trials: int
    adversarial_steps: int
    minimax_restarts: int
    granas_samples: int
    # Smallest accepted best-to-bound ratio of the adversarial search; None only reports it.
    adversarial_min_ratio: Optional[float] = None


SCALES: Dict[str, SuiteScale] = {
    "quick": SuiteScale(
        vertex_pairs_per_n=300,
        jung_sets=300,
        certifier_vectors=100,
        certifier_max_m=101,
        example_grid=1001,
        oracle_instances=40,
        caratheodory_instances=100,
        face_reductions=60,
        adversarial_trials=4,
        adversarial_steps=60,
        minimax_restarts=3,
        granas_samples=500,
    ),
    "full": SuiteScale(
        vertex_pairs_per_n=100_000,
        jung_sets=10_000,
        certifier_vectors=10_000,
        certifier_max_m=1001,
        example_grid=10_001,
        oracle_instances=200,
        caratheodory_instances=1000,
        face_reductions=1000,
        adversarial_trials=100,
        adversarial_steps=400,
        minimax_restarts=20,
        granas_samples=2000,
        adversarial_min_ratio=0.999,
    ),
}

SuiteResult = Dict[str, Any]
Suite = Callable[[np.random.Generator, SuiteScale, ToleranceConfig], SuiteResult]


def _fail(suite: str, message: str, **instance: Any) -> VerificationError:
    payload = {"suite": suite}
    payload.update(instance)
    return VerificationError(f"[{suite}] {message}", payload)


def check_bound_table(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    """Closed forms against independently evaluated parity formulas."""
    cases = 0
    r = 1.0
    if abs(theorem1_bound(1, r).value - 2.0 * math.pi * r / 3.0) > 1e-12:
        raise _fail("bound_table", "n=1 distortion bound is not 2 pi r / 3", n=1, r=r)
    for n in range(1, 11):
        if n % 2 == 0:
            exact = Fraction(n, n + 2)
        else:
            exact = Fraction(n * n + 2 * n - 1, (n + 1) * (n + 3))
        expected = math.sqrt(float(exact))
        got = theorem2_bound(n, 1.0).value
        cases += 1
        if abs(got - expected) > 1e-12:
            raise _fail("bound_table", "vertex bound disagrees with the parity formula", n=n, got=got, expected=expected)

    for n in range(1, 51):
        best = max(pair_dimension_bound(k, n - k, 1.0) for k in range(n + 1))
        cases += 1
        if abs(theorem2_bound(n, 1.0).value - best) > 1e-12:
            raise _fail("bound_table", "vertex bound is not the best split", n=n, best=best)
        bound = theorem1_bound(n, r).value
        lower, upper = chain_interval(n, r, bound)
        if abs(lower - upper) > 1e-12:
            raise _fail("bound_table", "distortion bound does not close the chain", n=n, lower=lower, upper=upper)

    previous = math.inf
    for n in range(1, 10_001):
        value = corollary_bound(n, 1, r)
        if not (math.pi * r / 2.0 < value < previous):
            raise _fail("bound_table", "distortion bound is not strictly decreasing above pi r / 2", n=n, value=value)
        previous = value
    cases += 10_000
    if previous - math.pi * r / 2.0 > 1e-3 * math.pi * r:
        raise _fail("bound_table", "distortion bound does not approach pi r / 2", value=previous)
    return {"cases": cases, "limit_gap": previous - math.pi * r / 2.0}


def check_sharp_pairs(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    worst = 0.0
    for n in range(1, 13):
        first, second = sharp_pair(n, 1.0)
        witness = simplex_intersection(first, second, tolerances.lp)
        if witness is None:
            raise _fail("sharp_pair", "sharp pair does not intersect", n=n, a=first.to_list(), b=second.to_list())
        uniform_a = np.full(first.dim + 1, 1.0 / (first.dim + 1))
        uniform_b = np.full(second.dim + 1, 1.0 / (second.dim + 1))
        if (
            np.linalg.norm(witness.point) > tolerances.check
            or np.max(np.abs(witness.alpha.weights - uniform_a)) > tolerances.check
            or np.max(np.abs(witness.beta.weights - uniform_b)) > tolerances.check
        ):
            raise _fail("sharp_pair", "witness is not the common barycenter", n=n, witness=witness.to_dict())
        _, _, d = min_vertex_distance(first, second)
        bound = theorem2_bound(n, 1.0).value
        closed_form = vertex_distance_formula(first.dim, second.dim, 1.0)
        error = max(abs(d - bound), abs(closed_form - bound))
        worst = max(worst, error)
        if error > tolerances.check:
            raise _fail("sharp_pair", "cross distance differs from the vertex bound", n=n, d=d, bound=bound)
    return {"cases": 12, "max_error": worst}


def check_vertex_bounds(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    """
    Random intersecting pairs against the circumradius, pair and dimension bounds.

    Pairs are drawn in one stack per dimension pair and checked row-wise.
    """
    L = 1.0
    cases = 0
    degenerate = 0
    max_ratio = 0.0
    for n in range(1, 7):
        bound = theorem2_bound(n, L).value
        ks = rng.integers(0, n + 1, size=scale.vertex_pairs_per_n)
        ms = rng.integers(0, n - ks + 1)
        for k, m in sorted({(int(k), int(m)) for k, m in zip(ks, ms)}):
            count = int(np.count_nonzero((ks == k) & (ms == m)))
            va, vb, independent = random_intersecting_batch(n, L, (k, m), count, rng)
            degenerate += count - int(np.count_nonzero(independent))
            va, vb = va[independent], vb[independent]
            if va.shape[0] == 0:
                continue
            cases += va.shape[0]
            d = min_vertex_distances(va, vb)

            enclosing = lemma_circumradius_bound(enclosing_radii(va), enclosing_radii(vb))
            radii_a, flat_a = equidistant_radii(va, tolerances.degeneracy_rcond)
            radii_b, flat_b = equidistant_radii(vb, tolerances.degeneracy_rcond)
            equidistant = lemma_circumradius_bound(radii_a, radii_b)
            degenerate += int(np.count_nonzero(flat_a | flat_b))

            # nan equidistant radii compare False and skip the row.
            checks = [
                ("edge longer than L", np.maximum(longest_edges(va), longest_edges(vb)) > L + 1e-12, None),
                ("pair dimension bound violated", d > pair_dimension_bound(k, m, L) + tolerances.check, None),
                ("vertex bound violated", d > bound + SAFETY_SLACK, np.full(d.shape, bound)),
                ("circumradius bound violated (min-enclosing)", d > enclosing + tolerances.check, enclosing),
                ("circumradius bound violated (equidistant)", d > equidistant + tolerances.check, equidistant),
            ]
            for message, violated, limits in checks:
                rows = np.flatnonzero(violated)
                if rows.size == 0:
                    continue
                row = int(rows[0])
                extra = {} if limits is None else {"bound": float(limits[row])}
                raise _fail(
                    "vertex_bounds",
                    message,
                    n=n,
                    dims=[k, m],
                    L=L,
                    a=va[row].tolist(),
                    b=vb[row].tolist(),
                    d=float(d[row]),
                    **extra,
                )
            if bound > 0:
                max_ratio = max(max_ratio, float(np.max(d)) / bound)
    logger.info("Vertex bound fuzz done cases=%d degenerate=%d", cases, degenerate)
    return {"cases": cases, "degenerate_skipped": degenerate, "max_ratio": max_ratio}


def check_jung(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    worst = -math.inf
    for _ in range(scale.jung_sets):
        n = int(rng.integers(1, 7))
        count = int(rng.integers(1, 13))
        points = rng.standard_normal((count, n))
        radius = min_enclosing_ball(points, seed=int(rng.integers(2**31))).radius
        bound = jung_bound(diameter(points), affine_dimension(points, tolerances.affine))
        worst = max(worst, radius - bound)
        if radius > bound + tolerances.check:
            raise _fail("jung", "enclosing radius above the diameter bound", points=points.tolist(), radius=radius, bound=bound)
    return {"cases": scale.jung_sets, "max_excess": worst}


def check_circle_certifier(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    r = 1.0
    m = scale.example_grid
    values = grid_values(circle_example_map, m, r)
    certified = one_dim_certifier(values, r)
    sampled = distortion(circle_grid_relation(values, r))
    floor = 2.0 * math.pi * r * (m - 2) / (3.0 * m)
    if certified.value < floor - 1e-12 or sampled > 2.0 * math.pi * r / 3.0 + tolerances.check:
        raise _fail("circle_certifier", "example map outside its expected window", m=m, certified=certified.value, sampled=sampled)
    if certified.value > sampled + 1e-12:
        raise _fail("circle_certifier", "certifier above sampled distortion", m=m, values=values, r=r)

    ties = 0
    for _ in range(scale.certifier_vectors):
        size = 2 * int(rng.integers(1, (scale.certifier_max_m - 1) // 2 + 1)) + 1
        if rng.random() < 0.25:
            vector = rng.integers(0, 3, size=size).astype(float)
        else:
            vector = rng.standard_normal(size) * r
        bound = one_dim_certifier(vector.tolist(), r)
        if bound.certificate.case == "tie":
            ties += 1
        if replay_bound(bound.certificate, size, r) != bound.value:
            raise _fail("circle_certifier", "certificate does not replay", values=vector.tolist(), r=r)
        observed = circle_grid_distortion(vector, r)
        if bound.value > observed + 1e-12:
            raise _fail(
                "circle_certifier",
                "certifier above sampled distortion",
                values=vector.tolist(),
                r=r,
                bound=bound.value,
                sampled=observed,
            )
    return {
        "cases": scale.certifier_vectors + 1,
        "example_certified": certified.value,
        "example_sampled": sampled,
        "tie_certificates": ties,
    }


def _oracle_meets(a: np.ndarray, b: np.ndarray) -> bool:
    """Subset enumeration: some basic solution has at most dim + 2 positive weights."""
    dim = a.shape[1]
    for size_a in range(1, min(a.shape[0], dim + 1) + 1):
        for size_b in range(1, min(b.shape[0], dim + 2 - size_a) + 1):
            for rows_a in combinations(range(a.shape[0]), size_a):
                for rows_b in combinations(range(b.shape[0]), size_b):
                    system = np.zeros((dim + 2, size_a + size_b))
                    system[0, :size_a] = 1.0
                    system[1, size_a:] = 1.0
                    system[2:, :size_a] = a[list(rows_a)].T
                    system[2:, size_a:] = -b[list(rows_b)].T
                    if np.linalg.matrix_rank(system) < size_a + size_b:
                        continue
                    rhs = np.zeros(dim + 2)
                    rhs[:2] = 1.0
                    weights, *_ = np.linalg.lstsq(system, rhs, rcond=None)
                    if np.linalg.norm(system @ weights - rhs) < 1e-9 and weights.min() >= -1e-12:
                        return True
    return False


def check_hull_oracle(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    compared = 0
    skipped = 0
    meeting = 0
    while compared < scale.oracle_instances:
        dim = int(rng.integers(2, 4))
        a = rng.standard_normal((int(rng.integers(1, 7)), dim))
        b = rng.standard_normal((int(rng.integers(1, 7)), dim)) + rng.standard_normal(dim) * 1.5
        gap = float(np.abs(minimal_translation(a, b, tolerances.lp)[0]).sum())
        if 0.0 < gap < 1e-6:
            skipped += 1
            continue
        got = hull_intersection(a, b, tolerances.lp) is not None
        expected = _oracle_meets(a, b)
        compared += 1
        meeting += int(expected)
        if got != expected:
            raise _fail("hull_oracle", "LP disagrees with subset enumeration", a=a.tolist(), b=b.tolist(), lp=got, oracle=expected)
    return {"cases": compared, "meeting": meeting, "margin_skipped": skipped}


def check_caratheodory(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    for _ in range(scale.caratheodory_instances):
        dim = int(rng.integers(1, 5))
        cloud = rng.standard_normal((int(rng.integers(1, 11)), dim))
        point = rng.dirichlet(np.ones(cloud.shape[0])) @ cloud
        try:
            reduced = caratheodory_reduce(point, cloud, tolerances.lp)
        except ContainmentError as exc:
            raise _fail("caratheodory", f"hull point rejected: {exc}", x=point.tolist(), cloud=cloud.tolist()) from exc
        if (
            reduced.dim > dim
            or not affinely_independent(reduced.vertices, tolerances.affine)
            or hull_intersection(reduced.vertices, [point], tolerances.lp) is None
        ):
            raise _fail("caratheodory", "reduced simplex is invalid", x=point.tolist(), cloud=cloud.tolist())
    return {"cases": scale.caratheodory_instances}


def check_face_reduction(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    for _ in range(scale.face_reductions):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, n + 1))
        m = int(rng.integers(n - k + 1, n + 1))
        first, second = random_intersecting_pair(n, 1.0, (k, m), rng)
        witness = simplex_intersection(first, second, tolerances.lp)
        face_a, face_b, _ = reduce_to_complementary_dims(first, second, witness, tolerances.lp)
        if face_a.dim + face_b.dim > n or simplex_intersection(face_a, face_b, tolerances.lp) is None:
            raise _fail("face_reduction", "reduced faces are invalid", n=n, a=first.to_list(), b=second.to_list())
    return {"cases": scale.face_reductions}


def check_adversarial(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    """Hill-climb from random pairs toward the vertex bound for n = 2 and 3."""
    ratios = {}
    base_seed = int(rng.integers(2**31))
    for n in (2, 3):
        seed = base_seed + 1000 * n
        report = adversarial_vertex_gap_search(
            n,
            1.0,
            scale.adversarial_trials,
            scale.adversarial_steps,
            seed=seed,
        )
        ratio = report.configuration["ratio"]
        ratios[str(n)] = ratio
        if scale.adversarial_min_ratio is not None and ratio < scale.adversarial_min_ratio:
            raise _fail(
                "adversarial",
                "search did not reach the vertex bound",
                n=n,
                seed=seed,
                trials=scale.adversarial_trials,
                climb_steps=scale.adversarial_steps,
                ratio=ratio,
                required=scale.adversarial_min_ratio,
                a=report.configuration["a"],
                b=report.configuration["b"],
            )
    return {
        "cases": 2 * scale.adversarial_trials,
        "ratios": ratios,
        "sharpness_ok": min(ratios.values()) >= 0.999,
    }


def check_minimax(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    r = 1.0
    N = 201
    report = minimax_distortion_search(1, 1, r, N, scale.minimax_restarts, seed=int(rng.integers(2**31)))
    low = 2.0 * math.pi * r * (N - 2) / (3.0 * N) - 1e-9
    high = 2.0 * math.pi * r / 3.0 + 0.05 * math.pi * r
    if not low <= report.best_value <= high:
        raise _fail("minimax", "best sampled distortion outside its window", N=N, value=report.best_value, low=low, high=high)
    return {
        "cases": scale.minimax_restarts,
        "best": report.best_value,
        "certified": report.configuration["certified"]["value"],
    }


def check_granas(rng: np.random.Generator, scale: SuiteScale, tolerances: ToleranceConfig) -> SuiteResult:
    relation = projection_map_sample(2, 1.0, scale.granas_samples)
    report = granas_scan(relation, tol=tolerances.lp)
    if not report.found:
        raise _fail("granas", "no feasible antipodal direction for the projection map", N=scale.granas_samples)
    configuration = report.configuration
    if not configuration["chain_ok"] or sum(configuration["dims"]) > 2:
        raise _fail("granas", "extracted pair fails the finite-scale chain", report=report.to_dict())
    return {
        "cases": report.trials,
        "d": configuration["d"],
        "chain": [configuration["chain_lower"], configuration["chain_upper"]],
        "q": q_factor(2),
    }


SUITES: List[Tuple[str, Suite]] = [
    ("bound_table", check_bound_table),
    ("sharp_pair", check_sharp_pairs),
    ("vertex_bounds", check_vertex_bounds),
    ("jung", check_jung),
    ("circle_certifier", check_circle_certifier),
    ("hull_oracle", check_hull_oracle),
    ("caratheodory", check_caratheodory),
    ("face_reduction", check_face_reduction),
    ("adversarial", check_adversarial),
    ("minimax", check_minimax),
    ("granas", check_granas),
]


def run_suites(
    seed: int,
    scale: ScaleName = "full",
    tolerances: Optional[ToleranceConfig] = None,
    only: Optional[Sequence[str]] = None,
) -> List[SuiteResult]:
    """Runs the suites in a fixed order; every suite draws from its own seeded stream."""
    if scale not in SCALES:
        raise SdlabError(f"Unknown suite scale {scale!r}")
    tolerances = tolerances or ToleranceConfig()
    selected = [(index, name, suite) for index, (name, suite) in enumerate(SUITES) if not only or name in only]
    results = []
    for index, name, suite in selected:
        rng = np.random.default_rng([seed, index])
        logger.info("Suite started name=%s seed=%d scale=%s", name, seed, scale)
        result = {"name": name}
        result.update(suite(rng, SCALES[scale], tolerances))
        result["violations"] = 0
        results.append(result)
    return results
