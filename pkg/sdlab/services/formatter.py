from __future__ import annotations

import io
import json
from dataclasses import is_dataclass
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional

import numpy as np
import pandas as pd

from sdlab import __version__
from sdlab.errors import GeometryInputError
from sdlab.services.distortion import Relation, function_relation
from sdlab.services.geom_core import Simplex, as_points

BOUND_COLUMNS = ["n", "parity", "q", "theorem2_bound", "theorem1_bound"]


def format_bound_table(rows: Iterable[Mapping[str, Any]]) -> str:
    frame = pd.DataFrame(list(rows), columns=BOUND_COLUMNS)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.12g", lineterminator="\n")
    return buffer.getvalue()


def to_jsonable(value: Any) -> Any:
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, Simplex):
        return value.to_list()
    if is_dataclass(value) and not isinstance(value, type):
        raise TypeError(f"Dataclass {type(value).__name__} has no JSON form")
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value


def format_report(payload: Mapping[str, Any]) -> str:
    """JSON document with the version first and keys in insertion order."""
    document = {"version": __version__}
    document.update(to_jsonable(payload))
    return json.dumps(document, indent=2, allow_nan=True) + "\n"


def write_output(text: str, out: Optional[Path]) -> None:
    if out is None:
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def load_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeometryInputError(f"Cannot read JSON from {path}: {exc}") from exc


def load_values(path: Path) -> List[float]:
    data = load_json(path)
    if not isinstance(data, list) or not all(isinstance(item, (int, float)) for item in data):
        raise GeometryInputError(f"{path} must hold a JSON array of numbers")
    return [float(item) for item in data]


def load_points(data: Any, name: str) -> np.ndarray:
    if not isinstance(data, list):
        raise GeometryInputError(f"'{name}' must be an array of points")
    return as_points(data)


def load_relation(path: Path) -> Relation:
    """Reads ``{"r": R, "pairs": [{"x": [...], "y": [...]}, ...]}``."""
    data = load_json(path)
    if not isinstance(data, Mapping) or "pairs" not in data:
        raise GeometryInputError(f"{path} must hold an object with a 'pairs' array")
    pairs = data["pairs"]
    if not isinstance(pairs, list) or not pairs:
        raise GeometryInputError("A relation must be a nonempty 'pairs' array")
    for index, pair in enumerate(pairs):
        if not isinstance(pair, Mapping) or "x" not in pair or "y" not in pair:
            raise GeometryInputError(f"Pair {index} of {path} must be an object with 'x' and 'y'")
    sources = as_points([pair["x"] for pair in pairs])
    targets = as_points([pair["y"] if isinstance(pair["y"], list) else [pair["y"]] for pair in pairs])
    r = data.get("r")
    if r is None:
        return Relation(sources, targets)
    if not isinstance(r, (int, float)) or isinstance(r, bool) or r <= 0:
        raise GeometryInputError(f"Sphere radius must be a positive number, got {r!r}")
    return function_relation(sources, targets, float(r))
