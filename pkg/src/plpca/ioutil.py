"""Atomic file writing so partial outputs never appear on disk."""

from __future__ import annotations

import json
import os
import tempfile


def atomic_write_text(path: str, text: str):
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str, payload):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
