"""Deterministic CSV/JSON emission.

Identical rows and an identical config snapshot must produce identical
bytes, so all float formatting goes through repr (shortest round-trip)
and every file starts with a fixed-shape comment header carrying the
tool version and the config snapshot hash.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def header_comment(config_hash: str) -> str:
    return f"# hashecon {__version__} config={config_hash}"


def render_csv(fieldnames: Sequence[str], rows: Iterable[Mapping],
               config_hash: str | None = None) -> str:
    buf = io.StringIO()
    if config_hash is not None:
        buf.write(header_comment(config_hash) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_cell(row.get(f)) for f in fieldnames])
    return buf.getvalue()


def write_csv(path, fieldnames: Sequence[str], rows: Iterable[Mapping],
              config_hash: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(fieldnames, rows, config_hash), encoding="utf-8")
    return path


def write_json(path, rows: Sequence[Mapping], config_hash: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"rows": [dict(r) for r in rows]}
    if config_hash is not None:
        payload["tool"] = {"name": "hashecon", "version": __version__,
                           "config": config_hash}
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")
    return path
