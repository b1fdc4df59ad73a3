"""Canonical JSON and atomic file writes.

Every artifact this package writes goes through :func:`canonical_json`
(sorted keys, fixed separators, shortest-roundtrip floats) so that rerunning
a command with the same inputs produces byte-identical files.
"""

from __future__ import annotations

import json
import os


def canonical_json(obj):
    """Deterministic JSON text for ``obj`` (no trailing newline)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def write_atomic(path, text):
    """Write ``text`` then rename into place, so readers never see partials."""
    path = os.fspath(path)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def quantize(value, decimals):
    """Round for hashing; normalizes -0.0 to 0.0 so signs cannot split colors."""
    return round(float(value), decimals) + 0.0
