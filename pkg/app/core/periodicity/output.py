"""
輸出樹與執行清單

Files are collected in memory and written in one pass, so a failed run leaves
nothing behind but its manifest. Content is deterministic; the only
timestamps live in ``manifest.json``.
"""

import csv
import hashlib
import io
import logging
import math
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
import orjson

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def format_cell(value: Any) -> str:
    """CSV cell text; floats use repr so values round-trip exactly"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else ""
    if isinstance(value, date):
        return value.isoformat()
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue().encode("utf-8")


def json_bytes(payload: Any) -> bytes:
    return orjson.dumps(payload, option=JSON_OPTIONS) + b"\n"


class OutputTree:
    """In-memory set of output files keyed by relative path"""

    def __init__(self):
        self.files: Dict[str, bytes] = {}

    def add_bytes(self, relative_path: str, content: bytes) -> None:
        if relative_path == MANIFEST_NAME:
            raise ValueError("manifest.json is written by the tree itself")
        self.files[relative_path] = content

    def add_csv(self, relative_path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        self.add_bytes(relative_path, csv_bytes(header, rows))

    def add_json(self, relative_path: str, payload: Any) -> None:
        self.add_bytes(relative_path, json_bytes(payload))

    def __contains__(self, relative_path: str) -> bool:
        return relative_path in self.files

    def __len__(self) -> int:
        return len(self.files)

    def manifest(self, status: str, error: Optional[str] = None, **extra: Any) -> Dict[str, Any]:
        entries = [
            {
                "path": path,
                "sha256": hashlib.sha256(content).hexdigest(),
                "bytes": len(content),
            }
            for path, content in sorted(self.files.items())
        ]
        manifest = {
            "status": status,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "files": entries,
            **extra,
        }
        if error is not None:
            manifest["error"] = error
        return manifest

    def write(self, root: Path, status: str = "ok", **extra: Any) -> Path:
        root = Path(root)
        for relative_path, content in sorted(self.files.items()):
            target = root / relative_path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(content)
            logger.debug("wrote %s (%d bytes)", relative_path, len(content))
        manifest_path = root / MANIFEST_NAME
        manifest_path.parent.mkdir(parents=True, exist_ok=True)
        manifest_path.write_bytes(json_bytes(self.manifest(status, **extra)))
        logger.info("wrote %d files under %s", len(self.files), root)
        return manifest_path


def write_failure_manifest(root: Path, error: BaseException) -> Path:
    """Record a failed run: manifest only, no file entries"""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest_path = root / MANIFEST_NAME
    manifest_path.write_bytes(json_bytes(OutputTree().manifest(
        "failed",
        error=str(error),
        module=getattr(error, "module", None),
    )))
    return manifest_path
