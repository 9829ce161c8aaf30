from __future__ import annotations

import os
import sys

LOG_PREFIX = "[StroboSAM]"


def _quiet() -> bool:
    return os.getenv("STROBOSAM_QUIET", "false").lower() == "true"


def log(message: str) -> None:
    """
    Print a prefixed progress line to stderr.

    stdout carries only CSV/JSON payloads. STROBOSAM_QUIET=true silences
    these lines.
    """
    if _quiet():
        return
    print(f"{LOG_PREFIX} {message}", file=sys.stderr, flush=True)
