"""Run manifests: who produced an output, from what, and when."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    flags: dict
    seed: int | None = None
    version: str = field(default_factory=tool_version)
    inputs: dict[str, str] = field(default_factory=dict)
    started: str = field(default_factory=_now)
    ended: str | None = None

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def finish(self) -> "RunManifest":
        self.ended = _now()
        return self

    def to_record(self) -> dict:
        return {"manifest": {
            "command": self.command, "flags": self.flags, "seed": self.seed,
            "version": self.version, "inputs": self.inputs,
            "started": self.started, "ended": self.ended,
        }}

    def header_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    def write_sidecar(self, path) -> Path:
        """graph6 has no comment syntax, so its manifest lives next to it."""
        side = Path(str(path) + ".manifest.json")
        side.write_text(self.header_line() + "\n")
        return side
