"""Resolved run configuration with a reproducibility hash.

A run resolves its settings from (highest precedence first) command
flags, a plain-text KEY=VALUE config file, and defaults. The snapshot
hash covers the resolved settings plus the content digests of any data
files the run consumes (market file, anchor file, ...), so identical
inputs yield identical output bytes and a changed data file changes the
recorded hash.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import InputError


def parse_config_file(path) -> dict[str, str]:
    """KEY=VALUE lines; blank lines and '#' comments ignored."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"{path}: line {lineno}: expected KEY=VALUE")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


class RunConfig:
    def __init__(self, command: str, settings: dict | None = None):
        self.command = command
        self.settings: dict[str, str] = {}
        self.file_digests: dict[str, str] = {}
        for key, value in (settings or {}).items():
            self.set(key, value)

    def set(self, key: str, value) -> None:
        if value is not None:
            self.settings[str(key)] = str(value)

    def record_file(self, label: str, path) -> None:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]
        self.file_digests[label] = digest

    def record_bytes(self, label: str, data: bytes) -> None:
        self.file_digests[label] = hashlib.sha256(data).hexdigest()[:12]

    def record_dir(self, label: str, path, pattern: str = "*") -> None:
        """Digest of a directory's file names and contents (sorted)."""
        h = hashlib.sha256()
        for child in sorted(Path(path).glob(pattern)):
            if child.is_file():
                h.update(child.name.encode("utf-8"))
                h.update(child.read_bytes())
        self.file_digests[label] = h.hexdigest()[:12]

    def snapshot_hash(self) -> str:
        lines = [f"command={self.command}"]
        lines += [f"{k}={v}" for k, v in sorted(self.settings.items())]
        lines += [f"file:{k}={v}" for k, v in sorted(self.file_digests.items())]
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()[:12]
