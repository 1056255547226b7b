#!/usr/bin/env python3
"""
Canonical JSON report emission.

Reports are byte-identical across runs with the same seed: keys sorted, two
space indent, trailing newline. Wall time would break that, so it goes to a
`<report>.timing.json` sidecar next to the report (or only to the log when the
report is printed to stdout).
"""

import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

from tools.run_config import RunConfig

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"


def canonical_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def meta(cfg: RunConfig) -> Dict[str, Any]:
    return {
        "p": cfg.p,
        "n": cfg.n,
        "seed": cfg.seed,
        "tool_version": TOOL_VERSION,
        "command": cfg.command,
    }


def timing_path(out: Path) -> Path:
    return out.with_name(out.name + ".timing.json")


def emit(cfg: RunConfig, body: Dict[str, Any], out: Optional[Path] = None) -> str:
    """Write the report to `out` (or stdout) and return the text written."""
    payload = dict(body)
    payload["meta"] = meta(cfg)
    text = canonical_json(payload)
    wall_time = round(time.monotonic() - cfg.started, 3)
    out = out if out is not None else cfg.out
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        timing_path(out).write_text(canonical_json({"wall_time_s": wall_time}))
        logger.info(f"Report written to {out}")
    logger.info(f"{cfg.command} finished in {wall_time}s")
    return text


def emit_error(error: Dict[str, Any]) -> None:
    sys.stdout.write(canonical_json(error))
    sys.stdout.flush()
