"""Oblivious routing into the butterfly multigraph and sensitivity experiments.

Routing: every edge ``(v, u)`` of a base graph on ``[N]`` is sent along a
minimum-length path of ``H`` through a uniformly random middle-layer vertex.
If the resulting vertex congestion exceeds ``d``, the embedding is rejected;
otherwise each path occurrence of an ``H`` edge is assigned a distinct copy
(slot) in ``H^d``, giving edge-disjoint images.

Sensitivity: critical/bicritical pointer-form instances, deletion and
shortcut block systems, reference solvers and block-sensitivity counts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graphs import (
    KIND_COMPLETE,
    KIND_DOUBLE,
    EolInstance,
    LabeledHostGraph,
    build_complete_host,
    butterfly_step_mask,
    choose_d,
    empty_instance,
    enumerate_solutions,
    multiply_edges,
    path_instance,
)

Solver = Callable[[EolInstance], int]

# ------------------------------------------------------------------ routing


def _edge_table(H: LabeledHostGraph) -> np.ndarray:
    """Lookup ``tail * 2 + type -> edge index`` for a double butterfly."""
    tab = H.meta.get("_edge_table")
    if tab is None:
        tab = np.empty(2 * H.num_vertices, dtype=np.int64)
        tab[H.tails * 2 + H.edge_type] = np.arange(H.num_edges)
        H.meta["_edge_table"] = tab
    return tab


def _route(n: int, v: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Host vertex ids of the min paths ``v -> w -> u``; shape ``(E, 2n+1)``."""
    N = 1 << n
    cols = []
    for i in range(n + 1):
        top = ((1 << i) - 1) << (n - i)
        cols.append((w & top) | (v & ~top & (N - 1)))
    for i in range(1, n + 1):
        top = ((1 << i) - 1) << (n - i)
        cols.append((u & top) | (w & ~top & (N - 1)))
    Z = np.stack(cols, axis=1)
    layers = np.arange(2 * n + 1) % (2 * n)
    return layers[None, :] * N + Z


def path_host_edges(H: LabeledHostGraph, paths: np.ndarray) -> np.ndarray:
    """Edge indices of ``H`` along each path (shape ``(E, 2n)``)."""
    N = 1 << H.n
    z = paths % N
    typ = (z[:, 1:] != z[:, :-1]).astype(np.int64)
    return _edge_table(H)[paths[:, :-1] * 2 + typ]


def sample_min_path(H: LabeledHostGraph, v: int, u: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform minimum-length ``(v, u)`` path: ``2n + 1`` host vertex ids."""
    if H.kind != KIND_DOUBLE:
        raise ValueError("expected a double butterfly")
    N = 1 << H.n
    if not (0 <= v < N and 0 <= u < N):
        raise ValueError("endpoints must lie in the marked first layer")
    w = rng.integers(0, N, size=1)
    return _route(H.n, np.array([v]), np.array([u]), w)[0]


def congestion(paths) -> int:
    """Maximum number of distinct paths touching a single vertex."""
    paths = [np.unique(np.asarray(p, dtype=np.int64)) for p in paths]
    if not paths:
        return 0
    flat = np.concatenate(paths)
    if flat.size == 0:
        return 0
    return int(np.bincount(flat).max())


def _congestion_rows(paths: np.ndarray, extra: int = 0) -> int:
    # rows visit distinct layers except possibly the last == first (v == u)
    body = paths[:, :-1].ravel()
    last = paths[:, -1][paths[:, -1] != paths[:, 0]]
    cnt = np.bincount(np.concatenate([body, last]), minlength=extra)
    return int(cnt.max()) if cnt.size else 0


@dataclass
class PathEmbedding:
    n: int
    d: int
    edges: np.ndarray  # (E, 2) base-graph edges
    paths: np.ndarray  # (E, 2n+1) host vertex ids
    host_edges: np.ndarray  # (E, 2n) edge indices of H
    status: str
    congestion: int
    hd_edges: np.ndarray | None = None  # (E, 2n) edge indices of H^d

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_instance(self, Hd: LabeledHostGraph) -> EolInstance:
        if not self.ok:
            raise ValueError("cannot build an instance from a rejected embedding")
        inst = empty_instance(Hd)
        inst.indicators[self.hd_edges.ravel()] = 1
        return inst


def audit_edge_disjoint(emb: PathEmbedding) -> int:
    """Number of repeated ``H^d`` edges across all embedded paths."""
    if emb.hd_edges is None:
        return 0
    flat = emb.hd_edges.ravel()
    return int(flat.size - np.unique(flat).size)


def sample_embedding(
    H: LabeledHostGraph, d: int, G_edges, rng: np.random.Generator
) -> PathEmbedding:
    """Route every base edge, reject on congestion > d, assign random slots."""
    if H.kind != KIND_DOUBLE:
        raise ValueError("expected a double butterfly")
    E = np.asarray(G_edges, dtype=np.int64).reshape(-1, 2)
    N = 1 << H.n
    w = rng.integers(0, N, size=len(E))
    paths = _route(H.n, E[:, 0], E[:, 1], w)
    hedges = path_host_edges(H, paths)
    cong = _congestion_rows(paths) if len(E) else 0
    if cong > d:
        return PathEmbedding(H.n, d, E, paths, hedges, "bot", cong)
    flat = hedges.ravel()
    order = np.argsort(flat, kind="stable")
    sorted_e = flat[order]
    used, start, counts = np.unique(sorted_e, return_index=True, return_counts=True)
    group = np.repeat(np.arange(used.size), counts)
    rank = np.arange(sorted_e.size) - start[group]
    perms = np.argsort(rng.random((used.size, d)), axis=1)
    slot_sorted = perms[group, rank]
    slot = np.empty_like(slot_sorted)
    slot[order] = slot_sorted
    hd = (flat * d + slot).reshape(hedges.shape)
    return PathEmbedding(H.n, d, E, paths, hedges, "ok", cong, hd)


# ------------------------------------------------------ instance sampling


def sample_critical(N: int, rng: np.random.Generator) -> EolInstance:
    """Single path through all of ``[N]`` from vertex 0, random order."""
    if N < 2:
        raise ValueError("N must be >= 2")
    order = [0] + (1 + rng.permutation(N - 1)).tolist()
    return path_instance(build_complete_host(N), [order])


def sample_bicritical(N: int, rng: np.random.Generator) -> EolInstance:
    """Two paths of ``l`` and ``N - l`` vertices (``l`` even), first from 0."""
    if N % 2 or N < 4:
        raise ValueError("bicritical sampling needs an even N >= 4")
    ell = 2 * int(rng.integers(1, N // 2))
    rest = (1 + rng.permutation(N - 1)).tolist()
    return path_instance(build_complete_host(N), [[0] + rest[: ell - 1], rest[ell - 1 :]])


def walk_path(inst: EolInstance, start: int | None = None) -> list[int]:
    """Vertices visited from ``start`` following successors (stops on repeats)."""
    v = inst.start if start is None else start
    seen = [v]
    mark = {v}
    while True:
        u = inst.successor(v)
        if u is None or u in mark:
            return seen
        seen.append(u)
        mark.add(u)
        v = u


def path_edges(order: list[int]) -> np.ndarray:
    return np.array(list(zip(order[:-1], order[1:])), dtype=np.int64).reshape(-1, 2)


# ---------------------------------------------------------------- blocks


@dataclass
class BlockSystem:
    """Disjoint coordinate sets over the pointer bits of a complete-host instance.

    Coordinate ``v*w + b`` is bit ``b`` (MSB first) of ``succ[v]``;
    ``N*w + v*w + b`` is bit ``b`` of ``pred[v]``.
    """

    kind: str
    blocks: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.blocks)

    def is_disjoint(self) -> bool:
        if not self.blocks:
            return True
        flat = np.concatenate(self.blocks)
        return flat.size == np.unique(flat).size


def pointer_bits(inst: EolInstance) -> np.ndarray:
    w = inst.host.label_bits
    shifts = np.arange(w - 1, -1, -1)
    vals = np.concatenate([inst.succ, inst.pred])
    return ((vals[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()


def from_pointer_bits(host: LabeledHostGraph, bits: np.ndarray) -> EolInstance:
    w, N = host.label_bits, host.num_vertices
    vals = bits.reshape(2 * N, w).astype(np.int64) @ (1 << np.arange(w - 1, -1, -1))
    return EolInstance(host, succ=vals[:N], pred=vals[N:])


def apply_block(inst: EolInstance, block: np.ndarray) -> EolInstance:
    """Flip the given pointer-bit coordinates (an involution)."""
    bits = pointer_bits(inst)
    bits[np.asarray(block, dtype=np.int64)] ^= 1
    return from_pointer_bits(inst.host, bits)


def _diff_block(inst: EolInstance, edits: list[tuple[str, int, int]]) -> np.ndarray:
    """Coordinates changed by setting ``(field, vertex, value)`` pointers."""
    w, N = inst.host.label_bits, inst.host.num_vertices
    out = []
    for fld, v, val in edits:
        old = int((inst.succ if fld == "succ" else inst.pred)[v])
        diff = old ^ val
        base = (0 if fld == "succ" else N * w) + v * w
        out.extend(base + b for b in range(w) if (diff >> (w - 1 - b)) & 1)
    return np.array(sorted(out), dtype=np.int64)


def _require_critical_path(inst: EolInstance) -> list[int]:
    if not inst.pointer_form:
        raise ValueError("block systems are defined on pointer-form instances")
    order = walk_path(inst)
    if len(order) != inst.host.num_vertices:
        raise ValueError("expected a critical instance (one path through all vertices)")
    return order


def deletion_block(inst: EolInstance, i: int) -> np.ndarray:
    order = _require_critical_path(inst)
    N = len(order)
    if not 1 <= i <= N - 1:
        raise ValueError(f"deletion index {i} outside 1..{N - 1}")
    v, u = order[i - 1], order[i]
    nul = inst.host.null
    return _diff_block(inst, [("succ", v, nul), ("pred", u, nul)])


def shortcut_block(inst: EolInstance, j: int) -> np.ndarray:
    order = _require_critical_path(inst)
    N = len(order)
    if not 1 <= j <= N // 2 - 1:
        raise ValueError(f"shortcut index {j} outside 1..{N // 2 - 1}")
    v, u = order[j - 1], order[j]
    v2, u2 = order[N - j - 1], order[N - j]
    nul = inst.host.null
    return _diff_block(inst, [("succ", v, u2), ("pred", u2, v), ("pred", u, nul), ("succ", v2, nul)])


def deletion_blocks(inst: EolInstance) -> BlockSystem:
    N = inst.host.num_vertices
    return BlockSystem("deletion", [deletion_block(inst, i) for i in range(1, N)])


def shortcut_blocks(inst: EolInstance) -> BlockSystem:
    N = inst.host.num_vertices
    return BlockSystem("shortcut", [shortcut_block(inst, j) for j in range(1, N // 2)])


def apply_deletion_block(inst: EolInstance, i: int) -> EolInstance:
    return apply_block(inst, deletion_block(inst, i))


def apply_shortcut_block(inst: EolInstance, j: int) -> EolInstance:
    return apply_block(inst, shortcut_block(inst, j))


# ---------------------------------------------------------------- solvers


def solve_canonical(inst: EolInstance) -> int:
    """End of the path that starts at the distinguished vertex."""
    if inst.predecessor(inst.start) is not None:
        return inst.start
    return walk_path(inst)[-1]


def solve_noncanonical(inst: EolInstance) -> int:
    """Smallest-label solution other than the canonical one, if any."""
    canon = solve_canonical(inst)
    others = [s.vertex for s in enumerate_solutions(inst) if s.vertex != canon]
    if not others:
        return canon
    return min(others, key=lambda v: int(inst.host.labels[v]))


def solve_coin(inst: EolInstance) -> int:
    """Deterministic pseudo-random choice between the two extremes."""
    h = hashlib.blake2b(digest_size=8)
    h.update(np.ascontiguousarray(inst.succ).tobytes())
    h.update(np.ascontiguousarray(inst.pred).tobytes())
    if h.digest()[0] & 1:
        return solve_canonical(inst)
    return solve_noncanonical(inst)


SOLVERS: dict[str, Solver] = {
    "canonical": solve_canonical,
    "noncanonical": solve_noncanonical,
    "coin": solve_coin,
}


def _call(solver: Solver, inst: EolInstance) -> int:
    v = solver(inst)
    if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < inst.host.num_vertices:
        raise ValueError(f"solver returned a non-vertex: {v!r}")
    return int(v)


def block_sensitivity(solver: Solver, inst: EolInstance, blocks: BlockSystem) -> int:
    """Number of blocks whose flip changes the solver's answer."""
    base = _call(solver, inst)
    return sum(_call(solver, apply_block(inst, B)) != base for B in blocks.blocks)


def dichotomy_experiment(
    solver: Solver, N: int, trials: int, rng: np.random.Generator, hit_samples: int = 16
) -> dict:
    """Estimate how often ``solver`` answers canonically on bicritical inputs.

    Bicritical inputs are produced by both routes: a uniform even deletion
    block and a uniform shortcut block applied to a uniform critical input.
    Hit rates are the fraction of sensitive blocks at the best of
    ``hit_samples`` critical inputs (even deletion indices only, so every
    flipped input is bicritical).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    can = {"deletion": 0, "shortcut": 0}
    for _ in range(trials):
        x = sample_critical(N, rng)
        i = 2 * int(rng.integers(1, N // 2))
        y = apply_deletion_block(x, i)
        can["deletion"] += _call(solver, y) == solve_canonical(y)
        j = int(rng.integers(1, N // 2))
        y = apply_shortcut_block(x, j)
        can["shortcut"] += _call(solver, y) == solve_canonical(y)
    best_del = best_cut = 0.0
    for _ in range(min(hit_samples, trials)):
        x = sample_critical(N, rng)
        base = _call(solver, x)
        dels = [apply_deletion_block(x, i) for i in range(2, N - 1, 2)]
        cuts = [apply_shortcut_block(x, j) for j in range(1, N // 2)]
        hd = np.mean([_call(solver, y) != base for y in dels]) if dels else 0.0
        hc = np.mean([_call(solver, y) != base for y in cuts]) if cuts else 0.0
        best_del, best_cut = max(best_del, float(hd)), max(best_cut, float(hc))
    p_del = can["deletion"] / trials
    p_cut = can["shortcut"] / trials
    slack = 3.0 / np.sqrt(trials)
    return {
        "N": N,
        "trials": trials,
        "p_canonical_deletion": p_del,
        "p_canonical_shortcut": p_cut,
        "p_canonical": (p_del + p_cut) / 2,
        "best_deletion_hit_rate": best_del,
        "best_shortcut_hit_rate": best_cut,
        "threshold": 0.5 - slack,
        "ok": max(best_del, best_cut) >= 0.5 - slack,
    }


# ---------------------------------------------------------------- experiments


def congestion_trials(n: int, d: int, trials: int, rng: np.random.Generator, H=None) -> dict:
    """Embed fresh critical paths on ``N = 2**n`` vertices ``trials`` times."""
    from .graphs import build_double_butterfly

    H = H or build_double_butterfly(n)
    N = 1 << n
    bots = viol = 0
    congs = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        order = [0] + (1 + rng.permutation(N - 1)).tolist()
        emb = sample_embedding(H, d, path_edges(order), rng)
        congs[t] = emb.congestion
        if emb.ok:
            viol += audit_edge_disjoint(emb)
        else:
            bots += 1
    return {
        "n": n,
        "d": d,
        "trials": trials,
        "bot_rate": bots / trials,
        "violations": viol,
        "mean_congestion": float(congs.mean()),
        "max_congestion": int(congs.max()),
        "congestions": congs,
    }


def coupling_failure_rate(
    N: int, n: int, trials: int, rng: np.random.Generator, d: float | None = None, H=None
) -> float:
    """Failure frequency of the coupling that adds one edge to an embedded G2.

    ``G2`` is a bicritical graph obtained by a uniform shortcut block; the
    extra edge is one of the removed path edges.  The coupling fails when
    the combined vertex congestion exceeds ``d`` (``d=None`` uses
    :func:`choose_d`, ``d=inf`` disables the cap).
    """
    from .graphs import build_double_butterfly

    if N > (1 << n):
        raise ValueError("N must be at most 2**n")
    H = H or build_double_butterfly(n)
    cap = choose_d(n) if d is None else d
    fails = 0
    for _ in range(trials):
        x = sample_critical(N, rng)
        order = walk_path(x)
        j = int(rng.integers(1, N // 2))
        y = apply_shortcut_block(x, j)
        e2 = y.edges()
        extra = np.array([[order[j - 1], order[j]]])
        w = rng.integers(0, 1 << n, size=len(e2) + 1)
        allE = np.concatenate([e2, extra])
        paths = _route(n, allE[:, 0], allE[:, 1], w)
        fails += _congestion_rows(paths) > cap
    return fails / trials


def embed_instance(n: int, inst: EolInstance, rng: np.random.Generator, d: int | None = None):
    """Embed a pointer-form instance's graph into ``H^d``; returns (emb, Hd)."""
    from .graphs import build_double_butterfly

    if inst.host.kind != KIND_COMPLETE:
        raise ValueError("expected a pointer-form instance")
    H = build_double_butterfly(n)
    d = choose_d(n) if d is None else d
    emb = sample_embedding(H, d, inst.edges(), rng)
    return emb, multiply_edges(H, d)
