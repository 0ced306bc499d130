"""Canonical JSON reading/writing shared by all file formats."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any


def canonical_dumps(data: Any) -> str:
    """Serialize with sorted keys, 2-space indent and a trailing newline.

    Identical data always yields identical bytes (UTF-8, LF endings).
    """
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(canonical_dumps(data), encoding="utf-8", newline="\n")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))
