"""JSON-friendly encodings for states, keys and outcomes."""
from __future__ import annotations

import json
from typing import Any

from .statevec import StateVector

SCHEMA_VERSION = 1


def state_to_json(state: StateVector) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def dumps(document: dict[str, Any]) -> str:
    """Canonical text form: insertion-ordered keys, fixed indentation, trailing newline."""
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
