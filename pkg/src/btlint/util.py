"""Small shared helpers."""

from __future__ import annotations

import json
import re


def canonical_json(data) -> str:
    """Key-sorted, two-space-indented JSON with a trailing newline.

    Every JSON surface of the tool (CLI output, HTTP bodies, files) uses
    this rendering so identical data is byte-identical everywhere.
    """
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


_NATURAL_RE = re.compile(r"(\d+)")


def natural_key(text: str):
    """Sort key treating digit runs numerically, so b2 sorts before b10."""
    return tuple(
        int(part) if part.isdigit() else part
        for part in _NATURAL_RE.split(text)
    )
