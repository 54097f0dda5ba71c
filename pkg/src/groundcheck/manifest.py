"""Run manifests: enough metadata to reproduce any artifact-producing
command (the command line, config digest, seeds, backend identity,
wall-clock bounds, and digests of every output file)."""
from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def manifest_path(output: str | Path) -> Path:
    return Path(f"{output}.manifest.json")


def write_manifest(primary_output: str | Path, command: list[str],
                   started: str, seeds: dict | None = None,
                   config_path: str | Path | None = None,
                   backend: str = "", outputs: list[str | Path] | None = None) -> Path:
    """Write the manifest for one command next to its primary output."""
    all_outputs = [Path(primary_output)] + [Path(p) for p in (outputs or [])]
    manifest = {
        "command": command,
        "config_digest": file_digest(config_path) if config_path else None,
        "seeds": seeds or {},
        "backend": backend,
        "started": started,
        "finished": utc_now(),
        "outputs": {str(p): file_digest(p) for p in all_outputs},
    }
    path = manifest_path(primary_output)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
