"""Run manifests: ``key=value`` lines plus a SHA-256 per emitted file."""
from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Dict, Iterable, Tuple


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def render_manifest(entries: Iterable[Tuple[str, object]], files: Dict[str, bytes]) -> bytes:
    lines = []
    for key, value in entries:
        text = str(value).replace("\n", "\\n")
        lines.append(f"{key}={text}")
    for name in sorted(files):
        lines.append(f"file.{name}.sha256={sha256(files[name])}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_outputs(out_dir: Path, files: Dict[str, bytes]) -> None:
    """Write every file, each via a temporary name so no partial file survives."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, data in files.items():
        tmp = out_dir / f".{name}.tmp"
        tmp.write_bytes(data)
        os.replace(tmp, out_dir / name)
