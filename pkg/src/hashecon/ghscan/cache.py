"""Content-addressed cache of search responses.

Every response is stored under the SHA-256 of its normalized query
string: a ``<key>.json`` manifest plus, for fetched record sets, a
``<key>.ndjson.gz`` file with one JSON record per line. The same format
serves as the recorded-fixture store for offline replay; gzip members
are written with a zeroed mtime so identical content is byte-identical.
"""

from __future__ import annotations

import datetime as dt
import gzip
import hashlib
import io
import json
from pathlib import Path

from ..errors import FixtureMissError, InputError
from .records import RepoRecord


def normalize_repo_query(term: str, created_from: dt.date | None,
                         created_to: dt.date | None) -> str:
    lo = created_from.isoformat() if created_from else "*"
    hi = created_to.isoformat() if created_to else "*"
    return f"repos|term={term.strip().lower()}|created={lo}..{hi}"


def normalize_code_query(term: str, language: str | None) -> str:
    lang = (language or "*").strip().lower()
    return f"code|term={term.strip().lower()}|language={lang}"


def query_key(normalized: str) -> str:
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:16]


class QueryCache:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _manifest_path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def _records_path(self, key: str) -> Path:
        return self.root / f"{key}.ndjson.gz"

    def has(self, normalized: str) -> bool:
        return self._manifest_path(query_key(normalized)).exists()

    def read_manifest(self, normalized: str) -> dict:
        path = self._manifest_path(query_key(normalized))
        if not path.exists():
            raise FixtureMissError(f"no recorded response for {normalized!r}")
        try:
            manifest = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise InputError(f"{path}: corrupt manifest: {exc}") from None
        if manifest.get("query") != normalized:
            raise InputError(f"{path}: manifest query mismatch")
        return manifest

    def write_manifest(self, normalized: str, **fields) -> None:
        key = query_key(normalized)
        manifest = {"query": normalized, **fields}
        self._manifest_path(key).write_text(
            json.dumps(manifest, sort_keys=True) + "\n", encoding="utf-8")

    def read_records(self, normalized: str) -> list[RepoRecord]:
        key = query_key(normalized)
        path = self._records_path(key)
        if not path.exists():
            raise FixtureMissError(f"no recorded records for {normalized!r}")
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            return [RepoRecord.from_json_line(line) for line in fh if line.strip()]

    def write_records(self, normalized: str, records) -> None:
        key = query_key(normalized)
        buf = io.BytesIO()
        with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
            for rec in records:
                gz.write((rec.to_json_line() + "\n").encode("utf-8"))
        self._records_path(key).write_bytes(buf.getvalue())

    def read_id_sample(self, normalized: str) -> list[int]:
        manifest = self.read_manifest(normalized)
        return [int(x) for x in manifest["id_sample"]]
