"""Deterministic JSON run reports for the CLI.

Reports are pretty-printed with sorted keys so reruns with identical
inputs produce identical text except for the wall-time field.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def build_report(command: str, inputs: Mapping[str, str | Path],
                 parameters: Mapping[str, Any], **sections: Any) -> dict:
    """Assemble a run report; inputs are digested by content."""
    report: dict[str, Any] = {
        "command": command,
        "inputs": {
            name: {"path": str(path), "sha256": file_digest(path)}
            for name, path in sorted(inputs.items())
        },
        "parameters": dict(parameters),
    }
    report.update(sections)
    return report


def render_report(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
