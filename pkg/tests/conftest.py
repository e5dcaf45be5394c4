from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    def write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "SDLAB_SEED",
        "SDLAB_LOG_LEVEL",
        "SDLAB_LOG_FILE",
        "SDLAB_LOG_INCLUDE_LIBS",
        "SDLAB_TOL_AFFINE",
        "SDLAB_TOL_LP",
        "SDLAB_TOL_RCOND",
        "SDLAB_TOL_CHECK",
    ):
        monkeypatch.delenv(name, raising=False)
