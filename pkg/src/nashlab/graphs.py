"""Host graphs for End-of-Line instances.

Three host families are built here: the double butterfly ``H``, its
edge-multiplied version ``H^d`` and the constant-degree replacement product
``H'``.  A fourth kind, the complete host in pointer form, carries the
successor/predecessor representation used by the unbounded-degree
sensitivity experiments.

Vertices have dense integer ids; labels (bit strings of fixed width, stored as
Python/NumPy integers) are the external identity.  Butterfly vertices are laid
out as ``id = layer * N + z`` with 0-indexed layers ``0 .. 2n-1``; layer 0 is
the identified first layer, so base vertex ``v`` in ``[N]`` has host id ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ._util import bits_msb, ceil_log2, parse_header, read_lines

KIND_COMPLETE = "complete-with-pointers"
KIND_DOUBLE = "butterfly-double"
KIND_MULTI = "butterfly-multigraph"
KIND_PRODUCT = "replacement-product"
KINDS = (KIND_COMPLETE, KIND_DOUBLE, KIND_MULTI, KIND_PRODUCT)

# published constants for the replacement product
PRODUCT_DEGREE_BOUND = 2
PRODUCT_LABEL_DIFF = 4

REASONS = ("special-nonsource", "special-sink", "source", "sink", "degree-violation")


# ---------------------------------------------------------------- Gray codes


def gray(i):
    """Reflected binary Gray code (works on ints and integer arrays)."""
    return i ^ (i >> 1)


def cyclic_gray(i, length: int):
    """Cyclic Gray code of even ``length``.

    Takes the first and last ``length/2`` words of the reflected code on
    ``ceil(log2 length)`` bits, so consecutive entries (including the wrap
    from ``length-1`` to 0) differ in exactly one bit.
    """
    if length < 2 or length % 2:
        raise ValueError("cyclic Gray code needs an even length >= 2")
    b = ceil_log2(length)
    k = length // 2
    i = np.asarray(i)
    shifted = np.where(i < k, i, i + (1 << b) - length)
    out = gray(shifted)
    return int(out) if out.ndim == 0 else out


def popcount(a) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)


# ---------------------------------------------------------------- host graph


@dataclass(eq=False)
class LabeledHostGraph:
    """Directed multigraph with fixed-width integer labels.

    Edges are stored as parallel arrays ``tails, heads, slots`` in canonical
    order (tail label, head label, slot).  ``edge_type`` is 0 for straight
    and 1 for cross butterfly edges (absent for other kinds).
    """

    kind: str
    n: int
    labels: np.ndarray
    label_bits: int
    tails: np.ndarray
    heads: np.ndarray
    slots: np.ndarray
    degree_bound: int
    d: int = 0
    edge_type: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def num_vertices(self) -> int:
        return int(self.labels.shape[0])

    @property
    def num_edges(self) -> int:
        return int(self.tails.shape[0])

    @property
    def vertices(self) -> list[str]:
        return [self.label_str(v) for v in range(self.num_vertices)]

    @property
    def null(self) -> int:
        """All-ones pointer sentinel (complete host only)."""
        return (1 << self.label_bits) - 1

    def label_str(self, v: int) -> str:
        return bits_msb(int(self.labels[v]), self.label_bits)

    @cached_property
    def _label_index(self) -> dict[int, int]:
        return {int(lab): i for i, lab in enumerate(self.labels)}

    def vertex_of(self, label: str | int) -> int:
        key = int(label, 2) if isinstance(label, str) else int(label)
        try:
            return self._label_index[key]
        except KeyError:
            raise KeyError(f"unknown vertex label {label!r}") from None

    def _csr(self, keys: np.ndarray):
        order = np.argsort(keys, kind="stable")
        ptr = np.zeros(self.num_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(keys, minlength=self.num_vertices), out=ptr[1:])
        return ptr, order

    @cached_property
    def _out(self):
        return self._csr(self.tails)

    @cached_property
    def _in(self):
        return self._csr(self.heads)

    def out_edges(self, v: int) -> np.ndarray:
        """Edge indices leaving ``v``, in canonical order."""
        ptr, order = self._out
        return order[ptr[v] : ptr[v + 1]]

    def in_edges(self, v: int) -> np.ndarray:
        ptr, order = self._in
        return order[ptr[v] : ptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.tails, minlength=self.num_vertices)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.heads, minlength=self.num_vertices)

    def max_degree(self) -> int:
        if self.num_edges == 0:
            return 0
        return int(max(self.out_degrees().max(), self.in_degrees().max()))

    def edge_label_differences(self) -> np.ndarray:
        """Hamming distance between endpoint labels, per edge."""
        return popcount(self.labels[self.tails] ^ self.labels[self.heads])

    def is_canonical(self) -> bool:
        order = np.lexsort((self.slots, self.labels[self.heads], self.labels[self.tails]))
        return bool(np.array_equal(order, np.arange(self.num_edges)))


def _canonical(labels, tails, heads, slots, *extra):
    order = np.lexsort((slots, labels[heads], labels[tails]))
    return (tails[order], heads[order], slots[order]) + tuple(e[order] for e in extra)


def build_complete_host(N: int) -> LabeledHostGraph:
    """Complete host on ``[N]`` for pointer-form instances.

    Labels are ``w = ceil(log2(N+1))`` bits wide so that the all-ones word is
    never a vertex and can serve as the null pointer.  ``n`` stores ``N``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    w = int(N).bit_length()
    empty = np.zeros(0, dtype=np.int64)
    return LabeledHostGraph(
        kind=KIND_COMPLETE,
        n=N,
        labels=np.arange(N, dtype=np.int64),
        label_bits=w,
        tails=empty,
        heads=empty.copy(),
        slots=empty.copy(),
        degree_bound=max(N - 1, 0),
    )


def butterfly_step_mask(n: int, layer: int) -> int:
    """Bit flipped by the cross edge leaving 0-indexed ``layer``.

    Step ``i`` (1-indexed) flips the ``i``-th most significant bit of z.
    """
    return 1 << (n - 1 - (layer % n))


def build_double_butterfly(n: int) -> LabeledHostGraph:
    """Double butterfly on ``2 * 2**n * n`` vertices.

    Two n-step butterflies are glued: the last layer of each copy is
    identified with the first layer of the other.  Layer 0 (ids ``0..N-1``)
    is the marked copy of ``[N]``; layer ``n`` is the middle layer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    N = 1 << n
    L = 2 * n
    gb = ceil_log2(L)
    ids = np.arange(L * N, dtype=np.int64)
    z, layer = ids % N, ids // N
    labels = (z << gb) | cyclic_gray(layer, L)
    masks = np.array([butterfly_step_mask(n, i) for i in range(L)], dtype=np.int64)
    nxt = (layer + 1) % L
    tails = np.concatenate([ids, ids])
    heads = np.concatenate([nxt * N + z, nxt * N + (z ^ masks[layer])])
    etype = np.concatenate([np.zeros(ids.size, np.int64), np.ones(ids.size, np.int64)])
    slots = np.ones(tails.size, dtype=np.int64)
    tails, heads, slots, etype = _canonical(labels, tails, heads, slots, etype)
    return LabeledHostGraph(
        kind=KIND_DOUBLE,
        n=n,
        labels=labels,
        label_bits=n + gb,
        tails=tails,
        heads=heads,
        slots=slots,
        degree_bound=2,
        edge_type=etype,
        meta={"N": N, "layers": L, "marked_layer": 0, "middle_layer": n},
    )


def butterfly_id(H: LabeledHostGraph, z: int, layer: int) -> int:
    N = 1 << H.n
    return (layer % (2 * H.n)) * N + z


def butterfly_coords(H: LabeledHostGraph, v: int) -> tuple[int, int]:
    N = 1 << H.n
    return v % N, v // N


def choose_d(n: int) -> int:
    """Smallest power of two >= log2 of the double butterfly size."""
    Nprime = 2 * (1 << n) * n
    return 1 << ceil_log2(ceil_log2(Nprime))


def multiply_edges(H: LabeledHostGraph, d: int) -> LabeledHostGraph:
    """Repeat every edge of ``H`` ``d`` times (slots ``1..d``).

    The edge at index ``h`` of ``H`` becomes indices ``h*d .. h*d + d-1``.
    """
    if H.kind != KIND_DOUBLE:
        raise ValueError("multiply_edges expects a double butterfly")
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    d = int(d)
    rep = lambda a: np.repeat(a, d)  # noqa: E731
    return LabeledHostGraph(
        kind=KIND_MULTI,
        n=H.n,
        labels=H.labels,
        label_bits=H.label_bits,
        tails=rep(H.tails),
        heads=rep(H.heads),
        slots=np.tile(np.arange(1, d + 1, dtype=np.int64), H.num_edges),
        degree_bound=2 * d,
        d=d,
        edge_type=rep(H.edge_type),
        meta=dict(H.meta),
    )


# ---------------------------------------------------------------- gadget K


@dataclass(eq=False)
class GadgetK:
    """Layered routing gadget with ``2*delta + 1`` layers for ``2d`` ports.

    Vertex ``(A, B, layer)``.  In-tree layer ``i <= delta`` holds
    ``(a, b_<i 0...)``; out-tree layer ``delta + j`` holds
    ``(b_<j a_>=j, 0^j b_>=j)``.  Port ``p`` enters at ``(p, 0, 0)`` and
    leaves at ``(p, 0, 2*delta)``.
    """

    d: int
    delta: int
    A: np.ndarray
    B: np.ndarray
    layer: np.ndarray
    tails: np.ndarray
    heads: np.ndarray
    in_root: np.ndarray
    out_root: np.ndarray
    layer_bits: int

    @property
    def size(self) -> int:
        return int(self.A.shape[0])

    @property
    def num_layers(self) -> int:
        return 2 * self.delta + 1

    @property
    def label_bits(self) -> int:
        return 2 * self.delta + self.layer_bits

    @cached_property
    def labels(self) -> np.ndarray:
        code = cyclic_gray(self.layer, 2 * self.delta + 2)
        sh = self.layer_bits
        return (self.A << (self.delta + sh)) | (self.B << sh) | code


def build_gadget_k(d: int) -> GadgetK:
    P = 2 * d
    if d < 1 or P & (P - 1):
        raise ValueError("2d must be a power of two")
    delta = P.bit_length() - 1
    A, B, lay = [], [], []
    index: dict[tuple[int, int, int], int] = {}

    def add(a, b, layer):
        index[(a, b, layer)] = len(A)
        A.append(a)
        B.append(b)
        lay.append(layer)

    for i in range(delta + 1):
        for a in range(P):
            for pre in range(1 << i):
                add(a, pre << (delta - i), i)
    for j in range(1, delta + 1):
        for f in range(P):
            for s in range(1 << (delta - j)):
                add(f, s, delta + j)
    tails, heads = [], []
    for i in range(delta):
        bitw = 1 << (delta - 1 - i)
        for a in range(P):
            for pre in range(1 << i):
                b = pre << (delta - i)
                src = index[(a, b, i)]
                for bit in (0, 1):
                    tails.append(src)
                    heads.append(index[(a, b | (bitw * bit), i + 1)])
    for j in range(1, delta + 1):
        pos = 1 << (delta - j)
        for f in range(P):
            for s in range(1 << (delta - j + 1)):
                src = index[(f, s, delta + j - 1)]
                tails.append(src)
                heads.append(index[((f & ~pos) | (s & pos), s & ~pos, delta + j)])
    in_root = np.array([index[(p, 0, 0)] for p in range(P)], dtype=np.int64)
    out_root = np.array([index[(p, 0, 2 * delta)] for p in range(P)], dtype=np.int64)
    return GadgetK(
        d=d,
        delta=delta,
        A=np.array(A, dtype=np.int64),
        B=np.array(B, dtype=np.int64),
        layer=np.array(lay, dtype=np.int64),
        tails=np.array(tails, dtype=np.int64),
        heads=np.array(heads, dtype=np.int64),
        in_root=in_root,
        out_root=out_root,
        layer_bits=ceil_log2(2 * delta + 2),
    )


# ------------------------------------------------------ replacement product


def _port(Hd: LabeledHostGraph) -> np.ndarray:
    return Hd.edge_type * Hd.d + (Hd.slots - 1)


@dataclass(eq=False)
class ProductStructure:
    """Implicit replacement product: ``(x, k) -> x * |K| + k``.

    Used for audits at sizes where materializing every edge is wasteful.
    """

    Hd: LabeledHostGraph
    K: GadgetK

    @property
    def num_vertices(self) -> int:
        return self.Hd.num_vertices * self.K.size

    @property
    def label_bits(self) -> int:
        return self.Hd.label_bits + self.K.label_bits

    def label(self, x: int, k: int) -> int:
        return (int(self.Hd.labels[x]) << self.K.label_bits) | int(self.K.labels[k])

    def check_regular(self) -> bool:
        """Every H^d vertex uses each out-port and each in-port exactly once."""
        Hd, P = self.Hd, 2 * self.Hd.d
        port = _port(Hd)
        V = Hd.num_vertices
        out_use = np.bincount(Hd.tails * P + port, minlength=V * P)
        in_use = np.bincount(Hd.heads * P + port, minlength=V * P)
        return bool(np.all(out_use == 1) and np.all(in_use == 1))

    def degree_profile(self) -> tuple[int, int, int]:
        """(max out-degree, max in-degree, max in+out) over all vertices."""
        K = self.K
        outd = np.bincount(K.tails, minlength=K.size)
        ind = np.bincount(K.heads, minlength=K.size)
        outd[K.out_root] += 1
        ind[K.in_root] += 1
        return int(outd.max()), int(ind.max()), int((outd + ind).max())

    def max_label_difference(self) -> int:
        K, Hd = self.K, self.Hd
        intra = popcount(K.labels[K.tails] ^ K.labels[K.heads]).max()
        port = _port(Hd)
        hd = popcount(Hd.labels[Hd.tails] ^ Hd.labels[Hd.heads])
        kd = popcount(K.labels[K.out_root[port]] ^ K.labels[K.in_root[port]])
        return int(max(intra, (hd + kd).max()))

    def materialize(self) -> LabeledHostGraph:
        Hd, K = self.Hd, self.K
        S = K.size
        xs = np.arange(Hd.num_vertices, dtype=np.int64)[:, None]
        intra_t = (xs * S + K.tails[None, :]).ravel()
        intra_h = (xs * S + K.heads[None, :]).ravel()
        port = _port(Hd)
        inter_t = Hd.tails * S + K.out_root[port]
        inter_h = Hd.heads * S + K.in_root[port]
        tails = np.concatenate([intra_t, inter_t])
        heads = np.concatenate([intra_h, inter_h])
        labels = (np.repeat(Hd.labels, S) << K.label_bits) | np.tile(K.labels, Hd.num_vertices)
        slots = np.ones(tails.size, dtype=np.int64)
        tails, heads, slots = _canonical(labels, tails, heads, slots)
        return LabeledHostGraph(
            kind=KIND_PRODUCT,
            n=Hd.n,
            labels=labels,
            label_bits=self.label_bits,
            tails=tails,
            heads=heads,
            slots=slots,
            degree_bound=PRODUCT_DEGREE_BOUND,
            d=Hd.d,
            meta={"gadget_size": S, "gadget_layers": K.num_layers, "N": Hd.meta.get("N")},
        )


def replacement_product_structure(Hd: LabeledHostGraph) -> ProductStructure:
    if Hd.kind != KIND_MULTI:
        raise ValueError("replacement product expects an edge-multiplied butterfly")
    return ProductStructure(Hd, build_gadget_k(Hd.d))


def replacement_product(Hd: LabeledHostGraph, max_vertices: int = 3_000_000) -> LabeledHostGraph:
    """Materialized ``H'``; use :func:`replacement_product_structure` for big n."""
    ps = replacement_product_structure(Hd)
    if ps.num_vertices > max_vertices:
        raise ValueError(
            f"H' would have {ps.num_vertices} vertices (> {max_vertices}); "
            "use replacement_product_structure for implicit audits"
        )
    return ps.materialize()


def build_host(kind: str, n: int, d: int = 0) -> LabeledHostGraph:
    """Rebuild a host from the fields of an instance-file header."""
    if kind == KIND_COMPLETE:
        return build_complete_host(n)
    H = build_double_butterfly(n)
    if kind == KIND_DOUBLE:
        return H
    Hd = multiply_edges(H, d)
    if kind == KIND_MULTI:
        return Hd
    if kind == KIND_PRODUCT:
        return replacement_product(Hd)
    raise ValueError(f"unknown host kind {kind!r}")


# ---------------------------------------------------------------- instances


@dataclass(frozen=True)
class EolSolution:
    vertex: int
    label: str
    reason: str


@dataclass(eq=False)
class EolInstance:
    """Subgraph of a host, as edge indicators or as pointer arrays.

    For the complete host, ``succ``/``pred`` hold ``label_bits``-wide values;
    any value that is not a vertex id (the all-ones null in particular) means
    "no pointer".  An edge ``v -> u`` exists iff ``succ[v] == u`` and
    ``pred[u] == v``.
    """

    host: LabeledHostGraph
    indicators: np.ndarray | None = None
    succ: np.ndarray | None = None
    pred: np.ndarray | None = None
    start: int = 0

    def __post_init__(self):
        if self.host.kind == KIND_COMPLETE:
            N = self.host.num_vertices
            if self.succ is None or self.pred is None:
                raise ValueError("complete-host instances need succ and pred arrays")
            self.succ = np.asarray(self.succ, dtype=np.int64)
            self.pred = np.asarray(self.pred, dtype=np.int64)
            if self.succ.shape != (N,) or self.pred.shape != (N,):
                raise ValueError("pointer arrays must have one entry per vertex")
        else:
            if self.indicators is None:
                raise ValueError("indicator instances need an indicator vector")
            self.indicators = np.asarray(self.indicators, dtype=np.uint8)
            if self.indicators.shape != (self.host.num_edges,):
                raise ValueError("indicator length must equal the host edge count")

    @property
    def pointer_form(self) -> bool:
        return self.host.kind == KIND_COMPLETE

    def copy(self) -> "EolInstance":
        if self.pointer_form:
            return EolInstance(self.host, succ=self.succ.copy(), pred=self.pred.copy(), start=self.start)
        return EolInstance(self.host, indicators=self.indicators.copy(), start=self.start)

    def edges(self) -> np.ndarray:
        """Edges of G as an ``(E, 2)`` array of (tail, head) ids."""
        if self.pointer_form:
            N = self.host.num_vertices
            v = np.arange(N)
            u = self.succ
            ok = (u >= 0) & (u < N)
            ok[ok] &= self.pred[u[ok]] == v[ok]
            return np.stack([v[ok], u[ok]], axis=1)
        sel = self.indicators.astype(bool)
        return np.stack([self.host.tails[sel], self.host.heads[sel]], axis=1)

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        """(in-degree, out-degree) arrays, with the isolated-vertex rule on H'."""
        N = self.host.num_vertices
        e = self.edges()
        outd = np.bincount(e[:, 0], minlength=N)
        ind = np.bincount(e[:, 1], minlength=N)
        if self.host.kind == KIND_PRODUCT:
            iso = (outd == 0) & (ind == 0)
            outd = outd + iso
            ind = ind + iso
        return ind, outd

    def successor(self, v: int) -> int | None:
        """Unique successor in G, or None (first one in canonical order)."""
        if self.pointer_form:
            u = int(self.succ[v])
            if 0 <= u < self.host.num_vertices and int(self.pred[u]) == v:
                return u
            return None
        for e in self.host.out_edges(v):
            if self.indicators[e]:
                return int(self.host.heads[e])
        return None

    def predecessor(self, v: int) -> int | None:
        if self.pointer_form:
            p = int(self.pred[v])
            if 0 <= p < self.host.num_vertices and int(self.succ[p]) == v:
                return p
            return None
        for e in self.host.in_edges(v):
            if self.indicators[e]:
                return int(self.host.tails[e])
        return None

    def is_clean(self) -> bool:
        """Every non-null pointer is reciprocated (pointer form only)."""
        if not self.pointer_form:
            return True
        N = self.host.num_vertices
        e = self.edges()
        real_s = int(np.sum((self.succ >= 0) & (self.succ < N)))
        real_p = int(np.sum((self.pred >= 0) & (self.pred < N)))
        return real_s == len(e) == real_p


def empty_instance(host: LabeledHostGraph) -> EolInstance:
    if host.kind == KIND_COMPLETE:
        nul = np.full(host.num_vertices, host.null, dtype=np.int64)
        return EolInstance(host, succ=nul, pred=nul.copy())
    return EolInstance(host, indicators=np.zeros(host.num_edges, dtype=np.uint8))


def path_instance(host: LabeledHostGraph, paths: list[list[int]]) -> EolInstance:
    """Pointer-form instance whose edges are the given vertex paths."""
    inst = empty_instance(host)
    for p in paths:
        for a, b in zip(p[:-1], p[1:]):
            inst.succ[a] = b
            inst.pred[b] = a
    return inst


def _classify(v: int, ind: int, outd: int, start: int, rules: str) -> str | None:
    if rules == "strict":
        if v == start:
            if ind != 0:
                return "special-nonsource"
            if outd != 1:
                return "special-sink" if outd == 0 else "degree-violation"
            return None
        if ind == 1 and outd == 1:
            return None
        if outd == 0:
            return "sink"
        if ind == 0:
            return "source"
        return "degree-violation"
    if rules == "relaxed":
        target = ind + 1 if v == start else ind
        if outd == target:
            return None
        if v == start:
            if ind > 0:
                return "special-nonsource"
            return "special-sink" if outd < target else "degree-violation"
        return "sink" if outd < ind else "source"
    raise ValueError(f"unknown rule set {rules!r}")


def check_eol_solution(inst: EolInstance, v: int, rules: str = "strict") -> EolSolution | None:
    if not 0 <= int(v) < inst.host.num_vertices:
        raise KeyError(f"unknown vertex {v!r}")
    v = int(v)
    ind, outd = inst.degrees()
    reason = _classify(v, int(ind[v]), int(outd[v]), inst.start, rules)
    return None if reason is None else EolSolution(v, inst.host.label_str(v), reason)


def enumerate_solutions(inst: EolInstance, rules: str = "strict") -> list[EolSolution]:
    """All solutions, sorted by vertex id."""
    ind, outd = inst.degrees()
    if rules == "strict":
        bad = (ind != 1) | (outd != 1)
        bad[inst.start] = ind[inst.start] != 0 or outd[inst.start] != 1
    else:
        bad = outd != ind
        bad[inst.start] = outd[inst.start] != ind[inst.start] + 1
    out = []
    for v in np.flatnonzero(bad):
        reason = _classify(int(v), int(ind[v]), int(outd[v]), inst.start, rules)
        out.append(EolSolution(int(v), inst.host.label_str(int(v)), reason))
    return out


# ---------------------------------------------------------------- text format


def format_instance(inst: EolInstance) -> str:
    host = inst.host
    head = f"eol v1 kind={host.kind} n={host.n}"
    if host.kind in (KIND_MULTI, KIND_PRODUCT):
        head += f" d={host.d}"
    lines = [head]
    w = host.label_bits
    if inst.pointer_form:
        N = host.num_vertices

        def ptr(val: int) -> str:
            return "NULL" if val == host.null else bits_msb(int(val), w)

        for v in range(N):
            lab = bits_msb(v, w)
            lines.append(f"succ {lab} {ptr(inst.succ[v])}")
            lines.append(f"pred {lab} {ptr(inst.pred[v])}")
    else:
        labs = [bits_msb(int(x), w) for x in host.labels]
        for e in range(host.num_edges):
            lines.append(
                f"e {labs[host.tails[e]]} {labs[host.heads[e]]} {host.slots[e]} {inst.indicators[e]}"
            )
    return "\n".join(lines) + "\n"


def parse_instance(text: str, host: LabeledHostGraph | None = None) -> EolInstance:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(rows[0], "eol")
    kind, n, d = hdr["kind"], int(hdr["n"]), int(hdr.get("d", 0))
    if host is None:
        host = build_host(kind, n, d)
    elif host.kind != kind or host.n != n or host.d != d:
        raise ValueError("supplied host does not match the file header")
    body = rows[1:]
    if kind == KIND_COMPLETE:
        N = host.num_vertices
        if len(body) != 2 * N:
            raise ValueError("expected one succ and one pred line per vertex")
        succ = np.empty(N, dtype=np.int64)
        pred = np.empty(N, dtype=np.int64)
        for k, ln in enumerate(body):
            tag, lab, val = ln.split()
            v = int(lab, 2)
            if tag != ("succ" if k % 2 == 0 else "pred") or v != k // 2:
                raise ValueError(f"unexpected line {ln!r}")
            (succ if tag == "succ" else pred)[v] = host.null if val == "NULL" else int(val, 2)
        return EolInstance(host, succ=succ, pred=pred)
    if len(body) != host.num_edges:
        raise ValueError("edge line count does not match host")
    ind = np.empty(host.num_edges, dtype=np.uint8)
    for e, ln in enumerate(body):
        tag, t, h, s, bit = ln.split()
        if (
            tag != "e"
            or int(t, 2) != host.labels[host.tails[e]]
            or int(h, 2) != host.labels[host.heads[e]]
            or int(s) != host.slots[e]
        ):
            raise ValueError(f"edge line {e} out of canonical order: {ln!r}")
        ind[e] = int(bit)
    return EolInstance(host, indicators=ind)


def write_instance(inst: EolInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


def read_instance(path: str | Path, host: LabeledHostGraph | None = None) -> EolInstance:
    return parse_instance("\n".join(read_lines(path)), host)
