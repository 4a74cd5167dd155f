"""Recursive source-file discovery under a project root."""

from __future__ import annotations

import os
from fnmatch import fnmatch
from pathlib import Path

from ..config import ProjectConfig
from ..errors import DiscoveryError


def discover_modules(root: str | Path, config: ProjectConfig | None = None) -> list[Path]:
    """All files under ``root`` with the configured extension, sorted.

    Returned paths are relative to ``root`` in lexicographic (POSIX string)
    order.  Exclude globs from the config match against the relative path.
    Unreadable directories raise rather than being skipped silently.
    """
    config = config or ProjectConfig()
    root = Path(root)
    if not root.is_dir():
        raise DiscoveryError(f"project root does not exist: {root}")

    def on_error(err: OSError) -> None:
        raise DiscoveryError(f"unreadable entry: {err.filename}") from err

    found: list[Path] = []
    for dirpath, dirnames, filenames in os.walk(root, onerror=on_error):
        dirnames.sort()
        for filename in sorted(filenames):
            if not filename.endswith(config.extension):
                continue
            rel = Path(dirpath, filename).relative_to(root)
            rel_posix = rel.as_posix()
            if any(fnmatch(rel_posix, glob) for glob in config.exclude):
                continue
            found.append(rel)
    found.sort(key=lambda p: p.as_posix())
    return found
