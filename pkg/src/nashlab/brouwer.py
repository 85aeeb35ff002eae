"""Lipschitz displacement field whose approximate fixed points encode EoL solutions.

A point lives in ``[-1, 2]^(4m)`` with four m-blocks: current vertex, next
vertex, compute-vs-copy flag and a special default direction.  Every EoL edge
``u -> v`` becomes four straight segments between the points

    x1 = (Eu, Eu, 0, 0)   x2 = (Eu, Ev, 0, 0)   x3 = (Eu, Ev, 1, 0)
    x4 = (Ev, Ev, 1, 0)   x5 = (Ev, Ev, 0, 0)

and a first segment runs from ``(0, 0, 0, 2)`` to the origin.  Near the
path the flow follows the segments; elsewhere it points along block 4.
All norms and dot products are normalized (divided by the dimension).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._util import nnorm, parse_header, read_lines
from .code import ConcatenatedCode
from .graphs import EolInstance, EolSolution, check_eol_solution
from .profile import ConstantsProfile, decode_radii

TOL = 1e-12


# ------------------------------------------------------------------ geometry


def brouwer_vertices(u: int, v: int, code: ConcatenatedCode) -> list[np.ndarray]:
    eu, ev = code.encode_full(u).astype(float), code.encode_full(v).astype(float)
    z, one = np.zeros(code.m), np.ones(code.m)
    return [
        np.concatenate(b)
        for b in (
            (eu, eu, z, z),
            (eu, ev, z, z),
            (eu, ev, one, z),
            (ev, ev, one, z),
            (ev, ev, z, z),
        )
    ]


@dataclass(eq=False)
class BrouwerPath:
    """Segments as stacked arrays; segment 0 is the first segment."""

    S: np.ndarray
    T: np.ndarray
    E: np.ndarray
    L: np.ndarray
    nxt: np.ndarray
    prv: np.ndarray
    initial: np.ndarray
    terminal: np.ndarray
    kinds: list  # ("first", None, 0) or ("edge", (u, v), step)
    endpoint_vertex: dict = field(default_factory=dict)  # (k, "start"|"end") -> vertex

    @property
    def num_segments(self) -> int:
        return int(self.S.shape[0])

    @property
    def dim(self) -> int:
        return int(self.S.shape[1])

    @property
    def corners(self) -> np.ndarray:
        k = np.flatnonzero(self.nxt >= 0)
        return np.stack([k, self.nxt[k]], axis=1) if k.size else np.zeros((0, 2), np.int64)

    def endpoints(self) -> list[tuple[np.ndarray, int, str, int]]:
        """(point, vertex, "start"|"end", segment) for every path end."""
        out = []
        for (k, side), v in sorted(self.endpoint_vertex.items()):
            out.append((self.T[k] if side == "end" else self.S[k], v, side, k))
        return out


def first_segment(m: int) -> tuple[np.ndarray, np.ndarray]:
    s = np.zeros(4 * m)
    s[3 * m :] = 2.0
    return s, np.zeros(4 * m)


def assemble_path(edges, has_succ, has_pred, code: ConcatenatedCode, start: int = 0) -> BrouwerPath:
    """Segments for ``edges`` given (possibly partial) neighbourhood knowledge.

    ``has_succ(v)`` / ``has_pred(v)`` return True, False or None (unknown);
    only a definite False makes a segment terminal or initial.
    """
    m = code.m
    S, T, kinds = [], [], []
    s0, t0 = first_segment(m)
    S.append(s0)
    T.append(t0)
    kinds.append(("first", None, 0))
    first_of: dict[tuple[int, int], int] = {}
    last_of: dict[tuple[int, int], int] = {}
    for u, v in edges:
        u, v = int(u), int(v)
        pts = brouwer_vertices(u, v, code)
        steps = 3 if v == start else 4
        first_of[(u, v)] = len(S)
        for j in range(steps):
            S.append(pts[j])
            T.append(pts[j + 1])
            kinds.append(("edge", (u, v), j + 1))
        last_of[(u, v)] = len(S) - 1
    K = len(S)
    nxt = np.full(K, -1, dtype=np.int64)
    prv = np.full(K, -1, dtype=np.int64)
    for k in range(K - 1):
        if kinds[k][0] == "edge" and kinds[k + 1][0] == "edge" and kinds[k][1] == kinds[k + 1][1]:
            nxt[k], prv[k + 1] = k + 1, k
    out_edge = {u: (u, v) for u, v in first_of}
    for (u, v), k in last_of.items():
        if v != start and v in out_edge:
            k2 = first_of[out_edge[v]]
            nxt[k], prv[k2] = k2, k
    if start in out_edge:
        k2 = first_of[out_edge[start]]
        nxt[0], prv[k2] = k2, 0
    initial = np.zeros(K, dtype=bool)
    terminal = np.zeros(K, dtype=bool)
    ends: dict[tuple[int, str], int] = {}
    if has_succ(start) is False:
        terminal[0] = True
        ends[(0, "end")] = start
    for (u, v), k in first_of.items():
        if u != start and has_pred(u) is False:
            initial[k] = True
            ends[(k, "start")] = u
    for (u, v), k in last_of.items():
        if v == start or has_succ(v) is False:
            terminal[k] = True
            ends[(k, "end")] = v
    S_, T_ = np.array(S), np.array(T)
    diff = T_ - S_
    L = np.sqrt(np.mean(diff * diff, axis=1))
    return BrouwerPath(S_, T_, diff / L[:, None], L, nxt, prv, initial, terminal, kinds, ends)


def build_brouwer_path(inst: EolInstance, code: ConcatenatedCode) -> BrouwerPath:
    if (1 << code.n) < inst.host.num_vertices:
        raise ValueError("code labels are too short for the instance")
    ind, outd = inst.degrees()
    edges = [tuple(e) for e in inst.edges().tolist()]
    return assemble_path(
        edges,
        lambda v: bool(outd[v] > 0),
        lambda v: bool(ind[v] > 0),
        code,
        inst.start,
    )


def segment_distance(s1, t1, s2, t2) -> float:
    """Normalized distance between two closed segments."""
    d1, d2, r = t1 - s1, t2 - s2, s1 - s2
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    c, b = d1 @ r, d1 @ d2
    den = a * e - b * b
    s = np.clip((b * f - c * e) / den, 0, 1) if den > 1e-14 * a * e else 0.0
    t = (b * s + f) / e
    if t < 0:
        t, s = 0.0, np.clip(-c / a, 0, 1)
    elif t > 1:
        t, s = 1.0, np.clip((b - c) / a, 0, 1)
    return nnorm(s1 + s * d1 - (s2 + t * d2))


def min_nonadjacent_separation(path: BrouwerPath) -> float:
    """Smallest distance between segments that do not share a corner."""
    best = math.inf
    K = path.num_segments
    for i in range(K):
        for j in range(i + 1, K):
            if path.nxt[i] == j or path.nxt[j] == i:
                continue
            best = min(best, segment_distance(path.S[i], path.T[i], path.S[j], path.T[j]))
    return best


# -------------------------------------------------------------- displacement


def line_coeffs(r: float, h: float) -> tuple[float, float, float]:
    """Weights of (direction, (z-x)/h, default) at distance r from the path."""
    q = r / h
    if q <= 1:
        return 1 - q, q, 0.0
    if q <= 2:
        return -(q - 1), 2 - q, 0.0
    if q <= 3:
        return -(3 - q), 0.0, q - 2
    return 0.0, 0.0, 1.0


def top_coeffs(r: float, h: float) -> tuple[float, float, float]:
    q = r / h
    if q <= 1:
        return 1 - q, q, 0.0
    return 0.0, 1.0 / q, 0.0


def _mix(w: float, c1, c2):
    return tuple((1 - w) * a + w * b for a, b in zip(c1, c2))


DEFAULT = (0.0, 0.0, 1.0)


@dataclass
class GeometryLocation:
    classification: str
    segments: tuple = ()
    a: tuple = ()
    tau: tuple = ()
    z: np.ndarray | None = None
    psi: float | None = None
    distance: float = math.inf
    coeffs: tuple = DEFAULT
    direction: np.ndarray | None = None
    blend: float = 0.0


def picture_weight(x4bar: float) -> float:
    """0 on the picture boundary, 1 at the top of the cube."""
    return min(max((x4bar - 0.5) / 1.5, 0.0), 1.0)


def _outside(x, m, h, e_first, cols=None) -> GeometryLocation:
    if cols is None:
        x4 = float(np.mean(x[3 * m :]))
    else:
        x4 = float(np.mean(x[cols[cols >= 3 * m]]))
    z = np.zeros(4 * m)
    z[3 * m :] = x4
    r = nnorm(x - z) if cols is None else nnorm((x - z)[cols])
    w = picture_weight(x4)
    c = _mix(w, line_coeffs(r, h), top_coeffs(r, h))
    name = "outside-picture" if w == 0 else "outside-top" if w == 1 else "outside-interpolated"
    a = (2.0 - x4) / 2.0
    return GeometryLocation(name, (0,), (a,), (a,), z, None, r, c, e_first, w)


def locate_point(
    x: np.ndarray, path: BrouwerPath, profile: ConstantsProfile, cols: np.ndarray | None = None
) -> GeometryLocation:
    """Case analysis for ``x``.

    With ``cols`` every average (arc length, distance, block-4 mean) is
    taken over those coordinates only; ``x`` may hold anything elsewhere.
    The anchor ``z`` and the direction are always full vectors.
    """
    m = path.dim // 4
    h, sh = profile.h, profile.sqrt_h
    x = np.asarray(x, dtype=float)
    if cols is None:
        x4bar = np.mean(x[3 * m :])
        xs, Ss, Es = x, path.S, path.E
    else:
        cols = np.asarray(cols, dtype=np.int64)
        x4bar = np.mean(x[cols[cols >= 3 * m]])
        xs, Ss, Es = x[cols], path.S[:, cols], path.E[:, cols]
    if x4bar >= 0.5:
        return _outside(x, m, h, path.E[0], cols)
    D = xs.size

    def dist(z):
        return nnorm(x - z) if cols is None else nnorm(xs - z[cols])

    d = xs[None, :] - Ss
    a = (d * Es).sum(1) / D
    lo = np.where(path.initial | (np.arange(path.num_segments) == 0), 0.0, sh)
    hi = np.where(path.terminal, path.L, path.L - sh)
    r2 = (d * d).sum(1) / D - 2 * a * a + a * a * (Es * Es).sum(1) / D
    cand = np.flatnonzero((a >= lo - TOL) & (a <= hi + TOL) & (r2 <= (3 * h + 1e-6) ** 2))
    best: GeometryLocation | None = None
    for k in cand:
        z = path.S[k] + a[k] * path.E[k]
        r = dist(z)
        if r > 3 * h + TOL or (best is not None and r >= best.distance):
            continue
        c = line_coeffs(r, h)
        name, wb = "near-one-segment", 0.0
        if path.terminal[k] and a[k] > path.L[k] - sh:
            wb = min((a[k] - (path.L[k] - sh)) / sh, 1.0)
        elif path.initial[k] and a[k] < sh:
            wb = min((sh - a[k]) / sh, 1.0)
        if wb > 0:
            c, name = _mix(wb, c, DEFAULT), "near-endpoint"
        best = GeometryLocation(
            name, (int(k),), (a[k],), (a[k] / path.L[k],), z, None, r, c, path.E[k], wb
        )
    cs = path.corners
    if len(cs):
        k1, k2 = cs[:, 0], cs[:, 1]
        dsy = a[k1] - (path.L[k1] - sh)
        dyt = sh - a[k2]
        near = np.flatnonzero((dsy >= -TOL) & (dyt >= -TOL))
        for c_ in near:
            i, j = int(k1[c_]), int(k2[c_])
            tot = max(dsy[c_], 0.0) + max(dyt[c_], 0.0)
            psi = max(dyt[c_], 0.0) / tot if tot > 1e-15 else 0.5
            y = path.T[i]
            z = psi * (y - sh * path.E[i]) + (1 - psi) * (y + sh * path.E[j])
            r = dist(z)
            if r > 3 * h + TOL or (best is not None and r >= best.distance):
                continue
            direc = psi * path.E[i] + (1 - psi) * path.E[j]
            best = GeometryLocation(
                "near-corner", (i, j), (a[i], a[j]), (a[i] / path.L[i], a[j] / path.L[j]),
                z, psi, r, line_coeffs(r, h), direc,
            )
    if best is None:
        return GeometryLocation("far")
    return best


def coordinate_displacement(loc: GeometryLocation, i, xi, m: int, profile: ConstantsProfile):
    """Coordinates ``i`` (scalar or array) of the untruncated displacement."""
    i = np.asarray(i, dtype=np.int64)
    xi = np.asarray(xi, dtype=float)
    cd, cp, cf = loc.coeffs
    g = np.zeros(np.broadcast(i, xi).shape)
    if cd:
        g = g + cd * loc.direction[i]
    if cp:
        g = g + cp * (loc.z[i] - xi) / profile.h
    if cf:
        g = g + cf * (i >= 3 * m)
    g = profile.delta * g
    return float(g) if g.ndim == 0 else g


def _apply(loc: GeometryLocation, x: np.ndarray, m: int, profile: ConstantsProfile) -> np.ndarray:
    cd, cp, cf = loc.coeffs
    g = np.zeros_like(x)
    if cd:
        g += cd * loc.direction
    if cp:
        g += cp * (loc.z - x) / profile.h
    if cf:
        g[3 * m :] += cf
    return profile.delta * g


def _raw_point(x, path, profile):
    loc = locate_point(x, path, profile)
    return _apply(loc, np.asarray(x, dtype=float), path.dim // 4, profile)


def _raw_batch(X: np.ndarray, path: BrouwerPath, profile: ConstantsProfile, chunk: int = 50_000):
    B, D = X.shape
    m = D // 4
    h, sh = profile.h, profile.sqrt_h
    G = np.zeros_like(X)
    G[:, 3 * m :] = profile.delta
    x4 = X[:, 3 * m :].mean(axis=1)
    out_idx = np.flatnonzero(x4 >= 0.5)
    e_first = path.E[0]
    for i in out_idx:
        loc = _outside(X[i], m, h, e_first)
        G[i] = _apply(loc, X[i], m, profile)
    in_idx = np.flatnonzero(x4 < 0.5)
    SE = (path.S * path.E).sum(1)
    SS = (path.S * path.S).sum(1)
    reach = (3 * h + sh + 1e-6) ** 2
    for c0 in range(0, in_idx.size, chunk):
        idx = in_idx[c0 : c0 + chunk]
        Xc = X[idx]
        xx = (Xc * Xc).sum(1)[:, None]
        a = (Xc @ path.E.T - SE[None, :]) / D
        dd = (xx - 2 * Xc @ path.S.T + SS[None, :]) / D
        ac = np.clip(a, 0, path.L[None, :])
        seg2 = dd - 2 * ac * a + ac * ac
        near = np.flatnonzero((seg2 <= reach).any(axis=1))
        for t in near:
            G[idx[t]] = _raw_point(Xc[t], path, profile)
    return G


# ------------------------------------------------------------------ field


class BrouwerField(BaseEstimator, TransformerMixin):
    """``f(x) = clip(x + g_hat(x), -1, 2)`` bound to an instance, a code and a profile.

    ``fit(instance)`` builds the segment path; ``transform(X)`` evaluates f.
    """

    def __init__(self, code: ConcatenatedCode | None = None, profile: ConstantsProfile | None = None):
        self.code = code
        self.profile = profile

    def fit(self, instance: EolInstance, y=None):
        if self.code is None:
            raise ValueError("BrouwerField needs a code")
        self.profile_ = self.profile or ConstantsProfile.default()
        self.instance_ = instance
        self.path_ = build_brouwer_path(instance, self.code)
        self.m_ = self.code.m
        self.radii_ = decode_radii(self.profile_, self.code.distance, self.code.m)
        return self

    @property
    def dim(self) -> int:
        return 4 * self.code.m

    def _check(self, X) -> np.ndarray:
        check_is_fitted(self, "path_")
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates")
        return X

    def raw_displacement(self, X) -> np.ndarray:
        """Untruncated displacement g_hat."""
        X = self._check(X)
        if X.ndim == 1:
            return _raw_point(X, self.path_, self.profile_)
        return _raw_batch(X, self.path_, self.profile_)

    def displacement(self, X) -> np.ndarray:
        X = self._check(X)
        return np.clip(X + self.raw_displacement(X), -1.0, 2.0) - X

    def transform(self, X) -> np.ndarray:
        X = self._check(X)
        return np.clip(X + self.raw_displacement(X), -1.0, 2.0)

    def residual(self, x) -> float:
        return nnorm(self.displacement(x))

    def locate(self, x) -> GeometryLocation:
        return locate_point(self._check(x), self.path_, self.profile_)

    def endpoint_distance(self, X) -> np.ndarray:
        """Normalized distance from each point to the nearest path endpoint."""
        X = np.atleast_2d(self._check(X))
        P = np.array([p for p, *_ in self.path_.endpoints()])
        if P.size == 0:
            return np.full(len(X), np.inf)
        d2 = (X * X).sum(1)[:, None] - 2 * X @ P.T + (P * P).sum(1)[None, :]
        return np.sqrt(np.maximum(d2, 0) / self.dim).min(axis=1)


def f_eval(x, field_: BrouwerField) -> np.ndarray:
    return field_.transform(x)


def displacement(x, field_: BrouwerField) -> np.ndarray:
    return field_.displacement(x)


# ------------------------------------------------------------ fixed points


def analytic_fixed_points(field_: BrouwerField) -> list[tuple[np.ndarray, int, str]]:
    """Exact cancellation points of the endpoint blends: (x*, vertex, side)."""
    path, prof = field_.path_, field_.profile_
    m = field_.m_
    e4u = np.zeros(path.dim)
    e4u[3 * m :] = 2.0
    out = []
    for (k, side), v in sorted(path.endpoint_vertex.items()):
        sh = prof.sqrt_h
        a = path.L[k] - sh / 3 if side == "end" else sh / 3
        base = path.S[k] + a * path.E[k]
        if abs(float(path.E[k] @ e4u) / path.dim) > 1e-9:
            x = base
        else:
            x = base + prof.h * e4u
        out.append((x, v, side))
    return out


def find_fixed_point(
    field_: BrouwerField,
    x0: np.ndarray,
    tol: float = 1e-10,
    method: str = "auto",
    max_iter: int = 20_000,
) -> tuple[np.ndarray, float]:
    """Local search for ``f(x) = x`` from ``x0``; returns (x, residual).

    ``damped`` iterates ``x <- x + gamma g(x)`` with clipped steps (stable at
    path ends that are sinks).  ``newton`` solves ``g(x) = 0`` with a
    quasi-Newton root finder (needed at path starts, which are saddles).
    ``auto`` tries newton first and falls back to damped.
    """
    prof = field_.profile_
    x0 = np.clip(np.asarray(x0, dtype=float), -1, 2)
    if method in ("newton", "auto"):
        sol = optimize.root(field_.displacement, x0, method="hybr", options={"xtol": 1e-14})
        x = np.clip(sol.x, -1, 2)
        res = nnorm(field_.displacement(x))
        if res <= tol or method == "newton":
            return x, res
    x = x0
    gamma = 0.5 * prof.h / prof.delta
    cap = prof.h / 10
    for _ in range(max_iter):
        g = field_.displacement(x)
        res = nnorm(g)
        if res <= tol:
            return x, res
        step = gamma * g
        sn = nnorm(step)
        if sn > cap:
            step *= cap / sn
        x = np.clip(x + step, -1, 2)
    return x, nnorm(field_.displacement(x))


def decode_fixed_point(x, field_: BrouwerField, tol: float | None = None) -> EolSolution:
    """EoL solution encoded by an approximate fixed point."""
    prof = field_.profile_
    tol = prof.delta / 10 if tol is None else tol
    x = field_._check(x)
    res = field_.residual(x)
    if res > tol:
        raise ValueError(f"residual {res:.3g} exceeds tolerance {tol:.3g}")
    m = field_.m_
    rad = field_.radii_
    got = []
    for r in (0, 1):
        dec = field_.code.nearest_codeword(x[r * m : (r + 1) * m], rad.inner, rad.outer)
        if dec.status == "vertex":
            got.append(dec.vertex)
    if not got or len(set(got)) != 1:
        raise ValueError(f"ambiguous decoding of blocks 1-2: {got}")
    v = got[0]
    inst = field_.instance_
    if v >= inst.host.num_vertices:
        raise ValueError(f"decoded label {v} is not a vertex of the instance")
    sol = check_eol_solution(inst, v)
    if sol is None:
        raise ValueError(f"decoded vertex {v} is not an EoL solution")
    return sol


# ------------------------------------------------------------- Lipschitz


def _near_path_points(path: BrouwerPath, B: int, rng, rmax: float) -> np.ndarray:
    k = rng.integers(0, path.num_segments, size=B)
    t = rng.random(B)
    X = path.S[k] + (t * path.L[k])[:, None] * path.E[k]
    noise = rng.standard_normal(X.shape)
    noise /= np.sqrt(np.mean(noise**2, axis=1))[:, None]
    X += (rng.random(B) * rmax)[:, None] * noise
    return np.clip(X, -1, 2)


def boundary_pairs(field_: BrouwerField, count: int, rng, eps: float = 1e-4) -> tuple[np.ndarray, np.ndarray]:
    """Pairs straddling the case boundaries (distance anchors, blends, corners, picture)."""
    path, prof = field_.path_, field_.profile_
    h, sh = prof.h, prof.sqrt_h
    D, m = path.dim, field_.m_
    X = np.empty((count, D))
    kinds = rng.integers(0, 4, size=count)
    for i in range(count):
        k = int(rng.integers(0, path.num_segments))
        n_ = rng.standard_normal(D)
        n_ -= (n_ @ path.E[k]) / D * path.E[k]
        n_ /= nnorm(n_)
        kind = kinds[i]
        if kind == 0:  # distance anchors
            a = rng.uniform(sh, max(sh, path.L[k] - sh))
            r = h * rng.choice([1.0, 2.0, 3.0])
        elif kind == 1:  # arc-length cut points
            a = rng.choice([0.0, sh, path.L[k] - sh, path.L[k]])
            r = rng.uniform(0, 3 * h)
        elif kind == 2:  # around corners
            a = path.L[k] + rng.uniform(-sh, sh / 4)
            r = rng.uniform(0, 3 * h)
        else:  # picture boundary near the first segment
            x = np.full(D, 0.0)
            x[3 * m :] = 0.5
            nn = rng.standard_normal(D)
            nn[3 * m :] -= nn[3 * m :].mean()
            nn /= nnorm(nn)
            X[i] = x + rng.uniform(0, 4 * h) * nn
            continue
        X[i] = path.S[k] + a * path.E[k] + r * n_
    X = np.clip(X, -1, 2)
    step = rng.standard_normal(X.shape)
    step /= np.sqrt(np.mean(step**2, axis=1))[:, None]
    Y = np.clip(X + eps * rng.random(count)[:, None] * step, -1, 2)
    return X, Y


def check_lipschitz(
    field_: BrouwerField, samples: int, rng, boundary: int = 0
) -> dict:
    """Empirical Lipschitz ratios over random and boundary-straddling pairs.

    Random pairs are a uniform point plus a perturbation of log-uniform size;
    half of them are placed within 4h of the path so that the path cases are
    exercised.  Returns the global ratio and the coordinatewise ratio
    ``|g_i(x) - g_i(y)| / max(|x_i - y_i|, ||x - y||)``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    D = field_.dim
    nu = samples // 2
    X = np.concatenate(
        [rng.uniform(-1, 2, size=(nu, D)), _near_path_points(field_.path_, samples - nu, rng, 4 * field_.profile_.h)]
    )
    dirs = rng.standard_normal(X.shape)
    dirs /= np.sqrt(np.mean(dirs**2, axis=1))[:, None]
    Y = np.clip(X + (10 ** rng.uniform(-5, -1, size=samples))[:, None] * dirs, -1, 2)
    if boundary:
        Xb, Yb = boundary_pairs(field_, boundary, rng)
        X, Y = np.concatenate([X, Xb]), np.concatenate([Y, Yb])
    gx, gy = field_.displacement(X), field_.displacement(Y)
    dxy = np.sqrt(np.mean((X - Y) ** 2, axis=1))
    keep = dxy > 0
    dg = np.sqrt(np.mean((gx - gy) ** 2, axis=1))
    ratio = dg[keep] / dxy[keep]
    denom = np.maximum(np.abs(X - Y), dxy[:, None])[keep]
    coord = (np.abs(gx - gy)[keep] / denom).max(axis=1)
    return {
        "pairs": int(keep.sum()),
        "L": float(ratio.max()),
        "L_coord": float(coord.max()),
        "L_raw_delta_over_h": float(ratio.max() / (field_.profile_.delta / field_.profile_.h)),
    }


# ------------------------------------------------------------- point files


def format_point(x: np.ndarray, profile: ConstantsProfile) -> str:
    x = profile.grid(x)
    m = x.size // 4
    return f"point v1 m={m}\n" + "\n".join(repr(float(v)) for v in x) + "\n"


def parse_point(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    m = int(parse_header(rows[0], "point")["m"])
    x = np.array([float(r) for r in rows[1:]])
    if x.size != 4 * m:
        raise ValueError(f"expected {4 * m} coordinates, got {x.size}")
    return x


def write_point(x, profile: ConstantsProfile, path: str | Path) -> None:
    Path(path).write_text(format_point(x, profile))


def read_point(path: str | Path) -> np.ndarray:
    return parse_point("\n".join(read_lines(path)))
