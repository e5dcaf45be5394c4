from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import circulant
from scipy.spatial.distance import cdist

from sdlab.errors import GeometryInputError
from sdlab.services.geom_core import (
    SpherePoint,
    as_points,
    geodesic_matrix,
    sample_sphere_coords,
)

logger = logging.getLogger(__name__)

Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]

_BLOCK_ROWS = 1024


def euclidean_metric(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return cdist(a, b)


def sphere_metric(r: float) -> Metric:
    def metric(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return geodesic_matrix(a, b, r)

    return metric


@dataclass(frozen=True, eq=False)
class Relation:
    """
    Finite relation between two metric spaces, stored as aligned sample rows.

    Row ``i`` of ``sources`` is related to row ``i`` of ``targets``.
    """

    sources: np.ndarray
    targets: np.ndarray
    source_metric: Metric = euclidean_metric
    target_metric: Metric = euclidean_metric
    # Sphere radius when the sources are points of S^n_r.
    r: Optional[float] = None

    def __post_init__(self) -> None:
        sources = as_points(self.sources)
        targets = as_points(self.targets)
        if sources.shape[0] != targets.shape[0]:
            raise GeometryInputError(
                f"Relation has {sources.shape[0]} sources but {targets.shape[0]} targets"
            )
        if self.r is not None:
            norms = np.linalg.norm(sources, axis=1)
            if np.any(np.abs(norms - self.r) > 1e-9 * max(1.0, self.r)):
                raise GeometryInputError(f"Relation sources are not on the sphere of radius {self.r}")
        sources.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.sources.shape[0]

    def subset(self, indices: Sequence[int]) -> "Relation":
        rows = list(indices)
        return Relation(
            self.sources[rows],
            self.targets[rows],
            self.source_metric,
            self.target_metric,
            self.r,
        )

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "pairs": [
                {"x": x.tolist(), "y": y.tolist()}
                for x, y in zip(self.sources, self.targets)
            ],
        }


def function_relation(
    points: Union[Sequence[SpherePoint], np.ndarray],
    images: Sequence[Sequence[float]] | np.ndarray,
    r: Optional[float] = None,
) -> Relation:
    """Graph sample of a map S^n_r -> R^d with the geodesic metric on the sphere."""
    if len(points) and isinstance(points[0], SpherePoint):
        radius = points[0].r
        coords = np.array([point.coords for point in points])
    else:
        coords = as_points(points)
        radius = r if r is not None else float(np.linalg.norm(coords[0]))
    targets = np.asarray(images, dtype=float)
    if targets.ndim == 1:
        targets = targets[:, None]
    return Relation(coords, targets, sphere_metric(radius), euclidean_metric, radius)


def _block_deviation(relation: Relation, start: int, stop: int) -> Tuple[float, int, int]:
    source_d = relation.source_metric(relation.sources[start:stop], relation.sources)
    target_d = relation.target_metric(relation.targets[start:stop], relation.targets)
    deviation = np.abs(target_d - source_d)
    flat = int(np.argmax(deviation))
    row, col = divmod(flat, deviation.shape[1])
    return float(deviation[row, col]), start + row, col


def distortion_witness(relation: Relation, workers: int = 1) -> Tuple[float, int, int]:
    """
    Sampled distortion with the first pair ``(i, j)`` attaining it.

    Rows are scanned in fixed blocks; the reduction keeps the earliest block
    on ties, so the result does not depend on ``workers``.
    """
    count = len(relation)
    blocks = [(start, min(start + _BLOCK_ROWS, count)) for start in range(0, count, _BLOCK_ROWS)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda block: _block_deviation(relation, *block), blocks))
    else:
        results = [_block_deviation(relation, *block) for block in blocks]
    best = results[0]
    for result in results[1:]:
        if result[0] > best[0]:
            best = result
    return best


def distortion(relation: Relation, workers: int = 1) -> float:
    value, i, j = distortion_witness(relation, workers)
    logger.debug("Sampled distortion value=%.12g pairs=%d witness=(%d, %d)", value, len(relation), i, j)
    return value


def projection_map_sample(n: int, r: float, N: int, seed: int = 0) -> Relation:
    """Sphere sample mapped to R^n by dropping the last coordinate."""
    if N < 2:
        raise GeometryInputError(f"Projection sample needs at least 2 points, got {N}")
    coords = sample_sphere_coords(n, r, N, seed)
    return function_relation(coords, coords[:, :-1], r)


def circle_example_map(theta: float, r: float) -> float:
    """The map theta -> r theta / 3 on [0, 2 pi), whose distortion is exactly 2 pi r / 3."""
    if not 0.0 <= theta < 2.0 * math.pi:
        raise GeometryInputError(f"Angle {theta} outside [0, 2 pi)")
    return r * theta / 3.0


def circle_example_distortion(r: float) -> float:
    return 2.0 * math.pi * r / 3.0


def circle_grid(m: int, r: float) -> np.ndarray:
    """Grid points x_k = r (cos 2 pi k / m, sin 2 pi k / m)."""
    return sample_sphere_coords(1, r, m)


def grid_values(
    circle_map: Callable[[float, float], float],
    m: int,
    r: float,
) -> List[float]:
    return [circle_map(2.0 * math.pi * k / m, r) for k in range(m)]


def circle_grid_relation(values: Sequence[float], r: float) -> Relation:
    return function_relation(circle_grid(len(values), r), np.asarray(values, dtype=float), r)


def circle_grid_distances(m: int, r: float) -> np.ndarray:
    """Geodesic distances of the m-point circle grid, 2 pi r min(|i-j|, m-|i-j|) / m."""
    if m < 1 or r <= 0:
        raise GeometryInputError(f"Circle grid needs m >= 1 and r > 0, got m={m}, r={r}")
    steps = np.arange(m)
    return circulant(2.0 * math.pi * r * np.minimum(steps, m - steps) / m)


def circle_grid_distortion(values: Sequence[float] | np.ndarray, r: float) -> float:
    """
    Sampled distortion of a map on the circle grid.

    Same value as ``distortion(circle_grid_relation(values, r))`` with the
    grid distances taken in closed form.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise GeometryInputError("Circle values must be a non-empty list of finite numbers")
    source_d = circle_grid_distances(values.size, r)
    return float(np.max(np.abs(np.abs(values[:, None] - values[None, :]) - source_d)))


@dataclass(frozen=True)
class TieCase:
    # Almost antipodal grid indices with equal values.
    edge: Tuple[int, int]
    case: Literal["tie"] = "tie"


@dataclass(frozen=True)
class PathCase:
    k: int
    # 1: f(x_k) <= f(x_{k+s}) <= f(x_{k+1}); 2: the reverse order.
    configuration: Literal[1, 2]
    case: Literal["path"] = "path"


Certificate = Union[TieCase, PathCase]


@dataclass(frozen=True)
class CertifiedBound:
    value: float
    certificate: Certificate
    m: int
    r: float

    def to_dict(self) -> dict:
        certificate = self.certificate
        if isinstance(certificate, TieCase):
            payload = {"case": "tie", "edge": list(certificate.edge)}
        else:
            payload = {"case": "path", "k": certificate.k, "configuration": certificate.configuration}
        return {"value": self.value, "m": self.m, "r": self.r, "certificate": payload}


def tie_bound(m: int, r: float) -> float:
    return math.pi * r * (m - 1) / m


def path_bound(m: int, r: float) -> float:
    return 2.0 * math.pi * r * (m - 2) / (3.0 * m)


def replay_bound(certificate: Certificate, m: int, r: float) -> float:
    if isinstance(certificate, TieCase):
        return tie_bound(m, r)
    return path_bound(m, r)


def check_certificate(certificate: Certificate, values: Sequence[float]) -> bool:
    """Confirms the certificate's ordering facts against the values."""
    m = len(values)
    step = (m + 1) // 2
    if isinstance(certificate, TieCase):
        i, j = certificate.edge
        return (j - i) % m in (step, m - step) and values[i] == values[j]
    k = certificate.k
    low, middle, high = values[k], values[(k + step) % m], values[(k + 1) % m]
    if certificate.configuration == 1:
        return low <= middle <= high
    return high <= middle <= low


def one_dim_certifier(values: Sequence[float], r: float) -> CertifiedBound:
    """
    Lower bound on the distortion of any circle map taking these values on
    the grid of ``m`` equally spaced points.

    Almost antipodal points ``k`` and ``k + (m+1)/2`` form a single m-cycle.
    A tie on an edge gives ``pi r (m-1)/m``; otherwise orienting every edge
    toward the larger value leaves, on an odd cycle, two consecutive edges
    ``k -> k+s -> k+1`` in the same direction, which gives
    ``2 pi r (m-2)/(3m)``. Ties win because their bound is larger.
    """
    m = len(values)
    if m < 3 or m % 2 == 0:
        raise GeometryInputError(f"Grid size must be odd and at least 3, got {m}")
    if r <= 0:
        raise GeometryInputError(f"Sphere radius must be positive, got {r}")
    values = [float(value) for value in values]
    step = (m + 1) // 2

    for k in range(m):
        partner = (k + step) % m
        if values[k] == values[partner]:
            certificate: Certificate = TieCase(edge=(k, partner))
            logger.debug("Tie certificate m=%d edge=(%d, %d)", m, k, partner)
            return CertifiedBound(tie_bound(m, r), certificate, m, r)

    for k in range(m):
        low, middle, high = values[k], values[(k + step) % m], values[(k + 1) % m]
        if low <= middle <= high:
            certificate = PathCase(k=k, configuration=1)
        elif high <= middle <= low:
            certificate = PathCase(k=k, configuration=2)
        else:
            continue
        logger.debug("Path certificate m=%d k=%d configuration=%d", m, k, certificate.configuration)
        return CertifiedBound(path_bound(m, r), certificate, m, r)

    # An odd cycle cannot alternate orientation at every vertex.
    raise AssertionError(f"No directed path found on an odd cycle of length {m}")
