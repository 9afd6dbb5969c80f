"""Atomic output writing."""

import os
import tempfile
from pathlib import Path


def _tmp_beside(path):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    return fd, tmp


def atomic_write_text(path, text):
    fd, tmp = _tmp_beside(path)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_savefig(fig, path):
    path = Path(path)
    fmt = path.suffix.lstrip(".") or "png"
    fd, tmp = _tmp_beside(path)
    os.close(fd)
    try:
        # no creation timestamps, so reruns give identical files
        fig.savefig(tmp, format=fmt, metadata={"Software": None} if fmt == "png" else None)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
