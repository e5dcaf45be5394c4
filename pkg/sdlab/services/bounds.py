from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Literal, Tuple

import numpy as np

from sdlab.errors import GeometryInputError, VerificationError
from sdlab.services.geom_core import Simplex, regular_simplex

logger = logging.getLogger(__name__)

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class BoundSpec:
    n: int
    parity: Parity
    # Dimensionless factor: vertex bound over edge length.
    q: float
    kind: Literal["vertex_distance", "distortion"]
    # Edge length L for vertex bounds, sphere radius r for distortion bounds.
    scale: float
    value: float

    def to_dict(self) -> dict:
        return asdict(self)


def _require_dimension(n: int) -> None:
    if n < 1:
        raise GeometryInputError(f"Dimension must be at least 1, got {n}")


def parity(n: int) -> Parity:
    return "even" if n % 2 == 0 else "odd"


def q_factor(n: int) -> float:
    _require_dimension(n)
    if n % 2 == 0:
        return math.sqrt(1.0 - 2.0 / (n + 2))
    return math.sqrt(1.0 - 2.0 * (n + 2) / ((n + 1) * (n + 3)))


def lemma_circumradius_bound(Rv: float | np.ndarray, Rw: float | np.ndarray) -> float | np.ndarray:
    """
    Some vertex pair of two meeting simplices lies within sqrt(Rv^2 + Rw^2).

    Accepts arrays of radii; ``nan`` entries pass through.
    """
    radii_v = np.asarray(Rv, dtype=float)
    radii_w = np.asarray(Rw, dtype=float)
    if np.any(radii_v < 0) or np.any(radii_w < 0):
        raise GeometryInputError(f"Radii must be non-negative, got {Rv}, {Rw}")
    bound = np.hypot(radii_v, radii_w)
    return float(bound) if bound.ndim == 0 else bound


def pair_dimension_bound(k: int, m: int, L: float) -> float:
    if k < 0 or m < 0:
        raise GeometryInputError(f"Simplex dimensions must be non-negative, got {k}, {m}")
    return L * math.sqrt(1.0 - 0.5 * (1.0 / (k + 1) + 1.0 / (m + 1)))


def vertex_distance_formula(k: int, m: int, L: float) -> float:
    """Cross vertex distance of regular k- and m-simplices meeting orthogonally at barycenters."""
    if k < 0 or m < 0:
        raise GeometryInputError(f"Simplex dimensions must be non-negative, got {k}, {m}")
    return L * math.sqrt((2 * k * m + k + m) / (2.0 * (k + 1) * (m + 1)))


def theorem2_bound(n: int, L: float) -> BoundSpec:
    q = q_factor(n)
    return BoundSpec(n=n, parity=parity(n), q=q, kind="vertex_distance", scale=L, value=L * q)


def theorem1_bound(n: int, r: float) -> BoundSpec:
    if r <= 0:
        raise GeometryInputError(f"Sphere radius must be positive, got {r}")
    q = q_factor(n)
    return BoundSpec(n=n, parity=parity(n), q=q, kind="distortion", scale=r, value=math.pi * r / (1.0 + q))


def continuous_bound(r: float) -> float:
    """Least distortion of a continuous map S^n_r -> R^n; attained by projection."""
    if r <= 0:
        raise GeometryInputError(f"Sphere radius must be positive, got {r}")
    return math.pi * r


def corollary_bound(n: int, m: int, r: float) -> float:
    """
    Lower bound for maps S^n_r -> R^m with m <= n.

    R^m sits inside R^n, so the n-dimensional bound applies; it exceeds
    pi r / 2 for every n.
    """
    _require_dimension(n)
    if not 1 <= m <= n:
        raise GeometryInputError(f"Target dimension must lie in [1, {n}], got {m}")
    return theorem1_bound(n, r).value


def chain_interval(n: int, r: float, dist: float) -> Tuple[float, float]:
    """
    Window ``(pi r - dist, dist * q)`` that must contain the vertex distance
    of the extracted simplex pair; it is nonempty iff ``dist`` is at least
    the distortion bound.
    """
    q = q_factor(n)
    return math.pi * r - dist, dist * q


def optimal_split(n: int) -> Tuple[int, int]:
    _require_dimension(n)
    split = (n // 2, n - n // 2)
    values = [pair_dimension_bound(k, n - k, 1.0) for k in range(n + 1)]
    best = max(values)
    if not math.isclose(values[split[0]], best, rel_tol=0.0, abs_tol=1e-15):
        raise VerificationError(
            f"Split {split} does not maximise the pair bound for n={n}",
            {"n": n, "values": values},
        )
    return split


def sharp_pair(n: int, L: float) -> Tuple[Simplex, Simplex]:
    """
    Regular floor(n/2)- and ceil(n/2)-simplices with edge ``L`` in orthogonal
    complementary coordinate subspaces, both centered at the origin.
    """
    if L <= 0:
        raise GeometryInputError(f"Edge length must be positive, got {L}")
    k, m = optimal_split(n)
    axes = np.eye(n)
    first = regular_simplex(k, L, n, axes[:k] if k else None)
    second = regular_simplex(m, L, n, axes[k:k + m])
    logger.debug("Sharp pair built n=%d dims=(%d, %d) L=%s", n, k, m, L)
    return first, second


def bound_table(n_max: int, r: float) -> List[dict]:
    _require_dimension(n_max)
    rows = []
    for n in range(1, n_max + 1):
        vertex = theorem2_bound(n, 1.0)
        distortion = theorem1_bound(n, r)
        rows.append(
            {
                "n": n,
                "parity": vertex.parity,
                "q": vertex.q,
                "theorem2_bound": vertex.value,
                "theorem1_bound": distortion.value,
            }
        )
    return rows
