"""Random binary linear codes with brute-force distance certificates.

``C'`` maps ``n/2``-bit half-vertices to ``m/2``-bit words; the full code
concatenates the two half encodings, so ``Enc(v) = C'(v^a) || C'(v^b)`` and
``Enc(0) = 0``.  Messages are MSB-first integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._util import parse_header, read_lines, substream


def _message_bits(k: int) -> np.ndarray:
    """All ``2**k`` messages as MSB-first bit rows."""
    ints = np.arange(1 << k, dtype=np.int64)
    return ((ints[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def int_to_bits(v: int, k: int) -> np.ndarray:
    return np.array([(int(v) >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    out = 0
    for b in np.asarray(bits).ravel():
        out = (out << 1) | int(b)
    return out


def minimum_distance(G: np.ndarray) -> int:
    """Minimum weight over all nonzero codewords (0 if G is rank-deficient)."""
    words = (_message_bits(G.shape[0])[1:].astype(np.int64) @ G) % 2
    return int(words.sum(axis=1).min()) if len(words) else 0


class RandomLinearCode(BaseEstimator):
    """Seeded random ``[m2, n2]`` code, resampled until its distance is large enough.

    Parameters
    ----------
    n2, m2 : int
        Message and block length in bits.
    min_distance : int
        Absolute distance floor (combined with ``min_rel_distance``).
    min_rel_distance : float
        Relative distance floor.
    seed : int
        Seed of the ``"code"`` substream.
    """

    def __init__(
        self,
        n2: int = 3,
        m2: int = 18,
        min_distance: int = 0,
        min_rel_distance: float = 0.1,
        seed: int = 0,
        max_tries: int = 100_000,
    ):
        self.n2 = n2
        self.m2 = m2
        self.min_distance = min_distance
        self.min_rel_distance = min_rel_distance
        self.seed = seed
        self.max_tries = max_tries

    @property
    def required_distance(self) -> int:
        return max(int(self.min_distance), math.ceil(self.min_rel_distance * self.m2 - 1e-12), 1)

    def fit(self, X=None, y=None):
        if self.n2 < 1 or self.m2 < self.n2:
            raise ValueError("need 1 <= n2 <= m2")
        rng = substream(self.seed, "code", self.n2, self.m2)
        need = self.required_distance
        for t in range(1, self.max_tries + 1):
            G = rng.integers(0, 2, size=(self.n2, self.m2), dtype=np.uint8)
            d = minimum_distance(G)
            if d >= need:
                return self._set(G, d, t)
        raise RuntimeError(f"no [{self.m2},{self.n2}] code with distance >= {need} found")

    def _set(self, G: np.ndarray, d: int, tries: int = 0):
        self.generator_ = G
        self.distance_ = d
        self.tries_ = tries
        self.codewords_ = ((_message_bits(self.n2).astype(np.int64) @ G) % 2).astype(np.uint8)
        return self

    @property
    def relative_distance(self) -> float:
        check_is_fitted(self, "generator_")
        return self.distance_ / self.m2

    def encode_half(self, v_half) -> np.ndarray:
        check_is_fitted(self, "generator_")
        if isinstance(v_half, (int, np.integer)):
            if not 0 <= int(v_half) < (1 << self.n2):
                raise ValueError("message out of range")
            return self.codewords_[int(v_half)].copy()
        bits = np.asarray(v_half, dtype=np.int64)
        if bits.shape != (self.n2,):
            raise ValueError(f"expected {self.n2} message bits, got shape {bits.shape}")
        return ((bits @ self.generator_) % 2).astype(np.uint8)

    def transform(self, X) -> np.ndarray:
        """Encode rows of message bits."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if X.shape[1] != self.n2:
            raise ValueError("message width mismatch")
        return ((X @ self.generator_) % 2).astype(np.uint8)

    def predict(self, Y) -> np.ndarray:
        """Nearest message (ties to the smallest) for each real row of Y."""
        check_is_fitted(self, "generator_")
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if Y.shape[1] != self.m2:
            raise ValueError("word length mismatch")
        C = self.codewords_.astype(float)
        d2 = (Y * Y).sum(1)[:, None] - 2 * Y @ C.T + C.sum(1)[None, :]
        return np.argmin(d2, axis=1)

    def certify(self) -> bool:
        return minimum_distance(self.generator_) == self.distance_


@dataclass(frozen=True)
class DecodeResult:
    status: str  # vertex | bottom | ambiguous
    vertex: int | None
    distance: float


class ConcatenatedCode:
    """Full vertex code ``Enc(v) = C'(v^a) || C'(v^b)``.

    ``split`` is the number of label bits in the first half (default n/2).
    """

    def __init__(self, half: RandomLinearCode, n: int, split: int | None = None):
        split = n // 2 if split is None else split
        if n % 2 and split == n // 2:
            raise ValueError("odd n needs an explicit uneven split")
        if split != half.n2 or n - split > half.n2:
            raise ValueError("half code width does not match the label split")
        check_is_fitted(half, "generator_")
        self.half = half
        self.n = n
        self.split = split
        self.m2 = half.m2
        self.m = 2 * half.m2
        V = 1 << n
        hi = np.arange(V) >> (n - split)
        lo = np.arange(V) & ((1 << (n - split)) - 1)
        self.codewords = np.concatenate([half.codewords_[hi], half.codewords_[lo]], axis=1)
        self._cw_f = self.codewords.astype(float)

    @property
    def distance(self) -> int:
        return self.half.distance_

    def halves(self, v: int) -> tuple[int, int]:
        k = self.n - self.split
        return int(v) >> k, int(v) & ((1 << k) - 1)

    def join(self, va: int, vb: int) -> int:
        return (int(va) << (self.n - self.split)) | int(vb)

    def encode_full(self, v) -> np.ndarray:
        if isinstance(v, (int, np.integer)):
            if not 0 <= int(v) < (1 << self.n):
                raise ValueError("vertex out of range")
            return self.codewords[int(v)].copy()
        bits = np.asarray(v)
        if bits.shape != (self.n,):
            raise ValueError("odd or mismatched label length")
        return self.codewords[bits_to_int(bits)].copy()

    def full_min_distance(self) -> int:
        cw = self.codewords.astype(np.int64)
        w = cw[1:].sum(axis=1)
        return int(w.min())

    def distances(self, y: np.ndarray) -> np.ndarray:
        """Normalized distances from ``y`` (length m or m/2) to every codeword."""
        y = np.asarray(y, dtype=float)
        if y.shape == (self.m,):
            C = self._cw_f
        elif y.shape == (self.m2,):
            C = self.half.codewords_.astype(float)
        else:
            raise ValueError(f"vector length {y.shape} matches neither m nor m/2")
        d2 = (y @ y) - 2 * (C @ y) + C.sum(axis=1)
        return np.sqrt(np.maximum(d2, 0.0) / y.size)

    def nearest_codeword(self, y, inner_radius: float, outer_radius: float) -> DecodeResult:
        if not inner_radius < outer_radius:
            raise ValueError("inner radius must be below outer radius")
        dist = self.distances(y)
        k = int(np.argmin(dist))
        dk = float(dist[k])
        if dk < inner_radius:
            return DecodeResult("vertex", k, dk)
        if dk > outer_radius:
            return DecodeResult("bottom", None, dk)
        return DecodeResult("ambiguous", k, dk)


def valid_m(n: int, ell: int) -> int:
    """Smallest even perfect square ``m >= 4n`` whose root is divisible by ``ell``."""
    r = max(1, math.isqrt(4 * n))
    if r * r < 4 * n:
        r += 1
    while True:
        if r % ell == 0 and (r * r) % 2 == 0 and r * r >= 4 * n:
            return r * r
        r += 1


def format_code(code: RandomLinearCode) -> str:
    width = (code.m2 + 3) // 4
    lines = [f"code v1 n2={code.n2} m2={code.m2} dist={code.distance_} seed={code.seed}"]
    for row in code.generator_:
        lines.append(format(bits_to_int(row), f"0{width}x"))
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> RandomLinearCode:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(rows[0], "code")
    n2, m2, dist = int(hdr["n2"]), int(hdr["m2"]), int(hdr["dist"])
    if len(rows) - 1 != n2:
        raise ValueError("generator row count mismatch")
    G = np.stack([int_to_bits(int(r, 16), m2) for r in rows[1:]])
    code = RandomLinearCode(n2=n2, m2=m2, min_distance=dist, seed=int(hdr["seed"]))
    code._set(G, minimum_distance(G))
    if code.distance_ != dist:
        raise ValueError(f"certificate mismatch: file says {dist}, brute force gives {code.distance_}")
    return code


def write_code(code: RandomLinearCode, path: str | Path) -> None:
    Path(path).write_text(format_code(code))


def read_code(path: str | Path) -> RandomLinearCode:
    return parse_code("\n".join(read_lines(path)))
