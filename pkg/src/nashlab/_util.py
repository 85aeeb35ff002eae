"""Small shared helpers: seeded substreams, normalized norms, text-file IO."""

from __future__ import annotations

import hashlib
import zlib
from pathlib import Path

import numpy as np


def substream(seed: int, *path: int | str) -> np.random.Generator:
    """Counter-based generator keyed by ``seed`` and a path of names/indices.

    The same (seed, path) always yields the same stream, independent of the
    order in which other streams were drawn.
    """
    words = [int(seed) & 0xFFFFFFFF]
    for p in path:
        if isinstance(p, str):
            words.append(zlib.crc32(p.encode()))
        else:
            words.append(int(p) & 0xFFFFFFFF)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def nnorm(v: np.ndarray, axis: int | None = None) -> np.ndarray | float:
    """Normalized 2-norm: sqrt of the mean of squares."""
    v = np.asarray(v, dtype=float)
    if axis is None:
        return float(np.sqrt(np.mean(v * v))) if v.size else 0.0
    return np.sqrt(np.mean(v * v, axis=axis))


def ndot(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    return float(a @ np.asarray(b, dtype=float)) / a.size


def ceil_log2(x: int) -> int:
    """Smallest b with 2**b >= x (0 for x <= 1)."""
    return int(x - 1).bit_length() if x > 1 else 0


def bits_msb(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def parse_header(line: str, magic: str) -> dict[str, str]:
    """Parse ``<magic> v1 key=value ...`` into a dict."""
    parts = line.split()
    if len(parts) < 2 or parts[0] != magic or parts[1] != "v1":
        raise ValueError(f"expected '{magic} v1' header, got {line!r}")
    out: dict[str, str] = {}
    for tok in parts[2:]:
        if "=" not in tok:
            raise ValueError(f"malformed header field {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def read_lines(path: str | Path) -> list[str]:
    with open(path) as fh:
        return [ln.rstrip("\n") for ln in fh if ln.strip()]
