"""Column/row subset families and the doubly-local evaluation of f.

Coordinates of an m-block sit in a ``sqrt(m) x sqrt(m)`` grid.  Indices below
``m/2`` fill the cells with even ``row + col`` (row-major), the rest fill the
odd cells, so every row and every column holds exactly half of each half of
the block.  ``sigma`` subsets are unions of ``sqrt(m)/l`` columns and ``tau``
subsets unions of ``sqrt(m)/l`` rows; both are picked by a polynomial hash
whose ``k`` coefficients come from one of ``l**k`` randomness outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._util import nnorm, parse_header, read_lines, substream
from .brouwer import BrouwerField, assemble_path, coordinate_displacement, locate_point
from .code import ConcatenatedCode
from .graphs import EolInstance
from .profile import ConstantsProfile

# ------------------------------------------------------------ families


def smallest_prime_at_least(x: int) -> int:
    p = max(2, int(x))
    while any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        p += 1
    return p


def grid_cells(m: int) -> tuple[np.ndarray, np.ndarray]:
    """(row, col) of every coordinate index under the checkerboard layout."""
    s = math.isqrt(m)
    if s * s != m or s % 2:
        raise ValueError("m must be the square of an even number")
    r, c = np.divmod(np.arange(m), s)
    even = (r + c) % 2 == 0
    order = np.concatenate([np.flatnonzero(even), np.flatnonzero(~even)])
    return r[order], c[order]


def _balanced_buckets(values: np.ndarray, ell: int) -> np.ndarray:
    """Bucket ``value mod ell`` per item, re-bucketed round-robin to equal sizes."""
    s = values.size
    cap = s // ell
    pref = values % ell
    out = np.full(s, -1, dtype=np.int64)
    fill = np.zeros(ell, dtype=np.int64)
    over = []
    for c in np.lexsort((np.arange(s), values)):
        b = pref[c]
        if fill[b] < cap:
            out[c], fill[b] = b, fill[b] + 1
        else:
            over.append(c)
    for c in over:
        b = (pref[c] + 1) % ell
        while fill[b] >= cap:
            b = (b + 1) % ell
        out[c], fill[b] = b, fill[b] + 1
    return out


def hash_buckets(s: int, ell: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``(ell**k, s)`` bucket table: outcome ``w`` hashes line ``c`` to a bucket.

    The base-``ell`` digits of ``w`` pick the coefficients of a degree ``k-1``
    polynomial over the smallest prime field with at least ``s`` elements;
    lines are evaluated at distinct random field points.
    """
    p = smallest_prime_at_least(s)
    points = rng.permutation(p)[:s].astype(np.int64)
    coef = np.stack([rng.permutation(p)[:ell] for _ in range(k)]).astype(np.int64)
    table = np.empty((ell**k, s), dtype=np.int64)
    for w in range(ell**k):
        digits = [(w // ell**t) % ell for t in range(k)]
        val = np.zeros(s, dtype=np.int64)
        for t in reversed(range(k)):  # Horner
            val = (val * points + coef[t, digits[t]]) % p
        table[w] = _balanced_buckets(val, ell)
    return table


@dataclass(frozen=True, eq=False)
class SubsetFamily:
    """``sigma[j]`` / ``tau[j]`` are sorted index arrays, ``j = w * ell + b``."""

    m: int
    ell: int
    k: int
    seed: int
    sigma: np.ndarray  # (ell**(k+1), m // ell)
    tau: np.ndarray

    @property
    def size(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def side(self) -> int:
        return math.isqrt(self.m)

    def mask(self, which: str = "sigma") -> np.ndarray:
        sets = self.sigma if which == "sigma" else self.tau
        M = np.zeros((self.size, self.m), dtype=bool)
        M[np.arange(self.size)[:, None], sets] = True
        return M

    def members(self, which: str, j: int) -> np.ndarray:
        return (self.sigma if which == "sigma" else self.tau)[j]


def build_subset_families(m: int, ell: int, k: int, seed: int) -> SubsetFamily:
    s = math.isqrt(m)
    if s * s != m:
        raise ValueError("m must be a perfect square")
    if ell < 1 or k < 1:
        raise ValueError("ell and k must be positive")
    if s % ell:
        raise ValueError(f"ell={ell} does not divide sqrt(m)={s}")
    rows, cols = grid_cells(m)
    out = {}
    for name, line in (("sigma", cols), ("tau", rows)):
        table = hash_buckets(s, ell, k, substream(seed, "family", name, m, ell, k))
        sets = []
        for w in range(ell**k):
            for b in range(ell):
                lines = np.flatnonzero(table[w] == b)
                sets.append(np.flatnonzero(np.isin(line, lines)))
        out[name] = np.array(sets, dtype=np.int64)
    return SubsetFamily(m, ell, k, seed, out["sigma"], out["tau"])


def family_invariants(fam: SubsetFamily) -> dict:
    """Exhaustive cardinality and bichromatic-intersection audit."""
    S, T = fam.mask("sigma"), fam.mask("tau")
    inter = S.astype(np.int64) @ T.T.astype(np.int64)
    half = np.arange(fam.m) < fam.m // 2
    return {
        "sigma_sizes": sorted(set(S.sum(1).tolist())),
        "tau_sizes": sorted(set(T.sum(1).tolist())),
        "intersections": sorted(set(inter.ravel().tolist())),
        "tau_first_half": sorted(set((T & half).sum(1).tolist())),
        "sigma_second_half": sorted(set((S & ~half).sum(1).tolist())),
        "ok": bool(
            (S.sum(1) == fam.m // fam.ell).all()
            and (T.sum(1) == fam.m // fam.ell).all()
            and (inter == fam.m // fam.ell**2).all()
        ),
    }


def concentration_check(
    fam: SubsetFamily,
    trials: int,
    rng: np.random.Generator,
    x: np.ndarray | None = None,
    delta: float = 0.1,
    which: str = "sigma",
    absolute: bool = False,
    fresh: bool = False,
) -> dict:
    """How often a random member's mean strays from the full mean.

    The threshold is ``delta * mu`` (or ``delta`` when ``absolute``).  ``x``
    defaults to a random 0/1 vector with exactly half ones; ``fresh`` redraws
    it every trial.  The reference bound is ``exp(-min(k / 2, delta^2 mu |T| / 3))``
    with ``mu |T|`` the expected subset sum; ``ok`` allows three binomial
    standard errors on top of it.
    """
    sets = fam.sigma if which == "sigma" else fam.tau
    js = rng.integers(0, fam.size, size=trials)
    if x is None:
        rows = 1 if not fresh else trials
        keys = rng.random((rows, fam.m))
        X = (np.argsort(keys, axis=1) < fam.m // 2).astype(float)
    else:
        X = np.asarray(x, dtype=float)[None, :]
        if X.shape != (1, fam.m) or X.min() < 0 or X.max() > 1:
            raise ValueError("x must be a [0,1]-vector of length m")
    mus = X.mean(axis=1)
    if X.shape[0] == 1:
        means = X[0][sets[js]].mean(axis=1)
        mu_t = np.full(trials, mus[0])
    else:
        means = np.take_along_axis(X, sets[js], axis=1).mean(axis=1)
        mu_t = mus
    dev = np.abs(means - mu_t)
    thr = delta if absolute else delta * mu_t
    freq = float(np.mean(dev > thr + 1e-15))
    mu = float(mus.mean())
    bound = math.exp(-min(fam.k / 2, delta**2 * mu * sets.shape[1] / 3))
    slack = 3 * math.sqrt(max(bound * (1 - bound), 1 / trials) / trials)
    return {
        "trials": int(trials),
        "mu": mu,
        "frequency": freq,
        "std_error": math.sqrt(max(freq * (1 - freq), 1 / trials) / trials),
        "max_deviation": float(dev.max()) if trials else 0.0,
        "bound": bound,
        "ok": freq <= bound + slack,
    }


# ------------------------------------------------------ family file format


def format_family(fam: SubsetFamily) -> str:
    lines = [f"subsets v1 m={fam.m} l={fam.ell} k={fam.k} seed={fam.seed}"]
    for name, sets in (("sigma", fam.sigma), ("tau", fam.tau)):
        for j, row in enumerate(sets):
            lines.append(f"{name} {j} " + " ".join(map(str, row.tolist())))
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SubsetFamily:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(rows[0], "subsets")
    m, ell, k, seed = (int(hdr[x]) for x in ("m", "l", "k", "seed"))
    L = ell ** (k + 1)
    got = {"sigma": [None] * L, "tau": [None] * L}
    for ln in rows[1:]:
        parts = ln.split()
        name, j = parts[0], int(parts[1])
        idx = np.array([int(t) for t in parts[2:]], dtype=np.int64)
        if name not in got or not 0 <= j < L or np.any(np.diff(idx) <= 0):
            raise ValueError(f"bad subset line starting {ln[:40]!r}")
        got[name][j] = idx
    if any(v is None for vs in got.values() for v in vs):
        raise ValueError("missing subset lines")
    fam = SubsetFamily(m, ell, k, seed, np.array(got["sigma"]), np.array(got["tau"]))
    if not family_invariants(fam)["ok"]:
        raise ValueError("family violates the size/intersection invariants")
    return fam


def write_family(fam: SubsetFamily, path: str | Path) -> None:
    Path(path).write_text(format_family(fam))


def read_family(path: str | Path) -> SubsetFamily:
    return parse_family("\n".join(read_lines(path)))


# ------------------------------------------------- doubly-local evaluation

VertexInfo = tuple[int, int, int] | None  # (v, S(v), P(v)); S == v / P == v: none


def block_coords(T: np.ndarray, m: int) -> np.ndarray:
    """Flat indices of ``[4] x T`` in block-major order."""
    T = np.asarray(T, dtype=np.int64)
    return (np.arange(4)[:, None] * m + T[None, :]).ravel()


def _check_info(info, nverts: int) -> None:
    if info is None:
        return
    if len(info) != 3 or not all(0 <= int(t) < nverts for t in info):
        raise ValueError(f"malformed vertex info {info!r}")


def validate_vertex_pair(vi) -> None:
    a, b = vi
    if a is None or b is None or a[0] == b[0]:
        if a is not None and b is not None and tuple(a) != tuple(b):
            raise ValueError("identical vertices with different neighbourhoods")
        return
    forward = a[1] == b[0] or b[2] == a[0]
    if not forward:
        raise ValueError(f"decoded vertices {a[0]} and {b[0]} are not adjacent")
    if (a[1] == b[0]) != (b[2] == a[0]):
        raise ValueError("neighbourhood reports disagree on the shared edge")


class LocalEvaluator:
    """Evaluates single coordinates of f from local information only.

    Caches the local segment geometry per vertex-info pair.
    """

    def __init__(self, code: ConcatenatedCode, profile: ConstantsProfile, start: int = 0):
        self.code = code
        self.profile = profile
        self.start = start
        self.m = code.m
        self._cache: dict = {}

    def local_path(self, vertex_info):
        key = tuple(None if v is None else tuple(int(t) for t in v) for v in vertex_info)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        edges, succ, pred = [], {}, {}
        for info in key:
            if info is None:
                continue
            v, s, p = info
            succ[v], pred[v] = s != v, p != v
            if s != v:
                edges.append((v, s))
            if p != v:
                edges.append((p, v))
        edges = list(dict.fromkeys(edges))
        path = assemble_path(edges, succ.get, pred.get, self.code, self.start)
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = path
        return path

    def evaluate(self, idx, xvals, vertex_info, partial, T) -> np.ndarray:
        """``f`` at several coordinates ``idx`` sharing one local view."""
        m = self.m
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= 4 * m):
            raise ValueError("coordinate index out of range")
        if len(vertex_info) != 2:
            raise ValueError("vertex info must have one entry per block")
        nv = 1 << self.code.n
        for info in vertex_info:
            _check_info(info, nv)
        validate_vertex_pair(vertex_info)
        T = np.asarray(T, dtype=np.int64)
        cols = block_coords(T, m)
        partial = np.asarray(partial, dtype=float)
        if partial.shape != (cols.size,):
            raise ValueError(f"partial vector must have length 4|T| = {cols.size}")
        x = np.full(4 * m, np.nan)
        x[cols] = partial
        loc = locate_point(x, self.local_path(vertex_info), self.profile, cols=cols)
        xvals = np.asarray(xvals, dtype=float)
        g = coordinate_displacement(loc, idx, xvals, m, self.profile)
        return np.clip(xvals + g, -1.0, 2.0)

    def __call__(self, i: int, xi: float, vertex_info, partial, T) -> float:
        return float(self.evaluate(np.array([i]), np.array([xi]), vertex_info, partial, T)[0])


def doubly_local_eval(
    i: int,
    xi: float,
    vertex_info,
    partial,
    T,
    code: ConcatenatedCode,
    profile: ConstantsProfile,
    start: int = 0,
) -> float:
    """``f_i(x)`` estimated from ``x_i``, ``x`` on ``[4] x T`` and the two blocks'
    decoded neighbourhoods (``None`` for an undecodable block)."""
    return LocalEvaluator(code, profile, start)(i, xi, vertex_info, partial, T)


def vertex_info_of(inst: EolInstance, v: int | None) -> VertexInfo:
    if v is None:
        return None
    s, p = inst.successor(v), inst.predecessor(v)
    return (int(v), int(v if s is None else s), int(v if p is None else p))


def decode_blocks(x: np.ndarray, field_: BrouwerField) -> tuple[int | None, int | None]:
    """Decoded vertex per block 1, 2 (ambiguous band resolved to the nearest word)."""
    m, rad = field_.m_, field_.radii_
    out = []
    for r in (0, 1):
        dec = field_.code.nearest_codeword(x[r * m : (r + 1) * m], rad.inner, rad.outer)
        v = dec.vertex if dec.status != "bottom" else None
        out.append(v if v is None or v < field_.instance_.host.num_vertices else None)
    return out[0], out[1]


def point_vertex_info(x: np.ndarray, field_: BrouwerField) -> tuple[VertexInfo, VertexInfo]:
    inst = field_.instance_
    v1, v2 = decode_blocks(x, field_)
    vi = (vertex_info_of(inst, v1), vertex_info_of(inst, v2))
    try:
        validate_vertex_pair(vi)
    except ValueError:
        vi = (vi[0], None)
    return vi


# ---------------------------------------------------------- experiments


def sample_points(field_: BrouwerField, count: int, rng: np.random.Generator) -> np.ndarray:
    """Mixture: 60% within 4h of the path, 20% uniform, 20% around the picture edge."""
    path, prof = field_.path_, field_.profile_
    D, m = field_.dim, field_.m_
    n1, n2 = int(0.6 * count), int(0.2 * count)
    k = rng.integers(0, path.num_segments, size=n1)
    X1 = path.S[k] + (rng.random(n1) * path.L[k])[:, None] * path.E[k]
    nz = rng.standard_normal((n1, D))
    nz /= nnorm(nz, axis=1)[:, None]
    X1 += (rng.random(n1) * 4 * prof.h)[:, None] * nz
    X2 = rng.uniform(-1, 2, size=(n2, D))
    n3 = count - n1 - n2
    X3 = rng.uniform(-0.1, 1.1, size=(n3, D)) * 0.1
    X3[:, 3 * m :] = rng.uniform(0.3, 2.0, size=n3)[:, None] + 0.05 * rng.standard_normal((n3, m))
    return np.clip(np.concatenate([X1, X2, X3]), -1, 2)


def agreement_experiment(
    field_: BrouwerField,
    fam: SubsetFamily,
    samples: int,
    rng: np.random.Generator,
    eps: float = 1e-3,
    tol: float | None = None,
    strict_tol: float | None = None,
    C: float = 2.0,
) -> dict:
    """Local-vs-global agreement and perturbation stability on random triples."""
    prof = field_.profile_
    tol = 10 * math.sqrt(prof.eps_brouwer) if tol is None else tol
    strict_tol = prof.delta / 10 if strict_tol is None else strict_tol
    m = field_.m_
    X = sample_points(field_, samples, rng)
    F = field_.transform(X)
    ev = LocalEvaluator(field_.code, prof, field_.instance_.start)
    errs = np.empty(samples)
    perr = np.empty(samples)
    for t in range(samples):
        x = X[t]
        i = int(rng.integers(0, 4 * m))
        which = "sigma" if rng.random() < 0.5 else "tau"
        T = fam.members(which, int(rng.integers(0, fam.size)))
        cols = block_coords(T, m)
        vi = point_vertex_info(x, field_)
        y = ev(i, x[i], vi, x[cols], T)
        errs[t] = abs(y - F[t, i])
        u = rng.standard_normal(cols.size)
        u *= eps / nnorm(u)
        xi_hat = x[i] + eps * rng.uniform(-1, 1)
        y_hat = ev(i, xi_hat, vi, x[cols] + u, T)
        perr[t] = abs(y_hat - y)
    return {
        "samples": samples,
        "tol": tol,
        "agree_freq": float(np.mean(errs <= tol)),
        "strict_tol": strict_tol,
        "strict_agree_freq": float(np.mean(errs <= strict_tol)),
        "max_error": float(errs.max()),
        "eps": eps,
        "C": C,
        "perturb_freq": float(np.mean(perr <= C * eps)),
        "perturb_ratio_q95": float(np.quantile(perr / eps, 0.95)),
    }
