"""Gadget composition of EoL query inputs and the per-vertex protocol.

Every query coordinate (an edge indicator, or a pointer bit on the complete
host) is split into an Alice symbol and a Bob symbol; the coordinate is the
gadget applied to the pair.  The default gadget is the two-bit inner product
on ``{0,1}^2``, encoded as the integers 0..3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._util import bits_msb, ceil_log2, parse_header, read_lines
from .embed import from_pointer_bits, pointer_bits
from .graphs import (
    KIND_COMPLETE,
    PRODUCT_DEGREE_BOUND,
    EolInstance,
    LabeledHostGraph,
    ProductStructure,
    build_host,
)


@dataclass(frozen=True, eq=False)
class Gadget:
    name: str
    table: np.ndarray  # (|S|, |S|) of 0/1

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.uint8)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or not np.isin(t, (0, 1)).all():
            raise ValueError("gadget table must be a square 0/1 matrix")
        object.__setattr__(self, "table", t)

    @property
    def size(self) -> int:
        return int(self.table.shape[0])

    @property
    def symbol_bits(self) -> int:
        return ceil_log2(self.size)

    def __call__(self, a, b) -> np.ndarray:
        return self.table[np.asarray(a), np.asarray(b)]

    def preimages(self, x: int) -> np.ndarray:
        """All ``(a, b)`` pairs with ``g(a, b) = x``."""
        return np.argwhere(self.table == x)


def ip2() -> Gadget:
    s = np.arange(4)
    return Gadget("ip2", (np.bitwise_count(s[:, None] & s[None, :]) % 2).astype(np.uint8))


GADGETS = {"ip2": ip2}


# ------------------------------------------------------------ composition


def query_bits(inst: EolInstance) -> np.ndarray:
    return pointer_bits(inst) if inst.pointer_form else inst.indicators.copy()


def instance_from_bits(host: LabeledHostGraph, bits: np.ndarray, start: int = 0) -> EolInstance:
    if host.kind == KIND_COMPLETE:
        inst = from_pointer_bits(host, bits)
        inst.start = start
        return inst
    return EolInstance(host, indicators=np.asarray(bits, dtype=np.uint8), start=start)


def num_coordinates(host: LabeledHostGraph) -> int:
    if host.kind == KIND_COMPLETE:
        return 2 * host.num_vertices * host.label_bits
    return host.num_edges


@dataclass(eq=False)
class ComposedInstance:
    host: LabeledHostGraph
    gadget: Gadget
    alice: np.ndarray
    bob: np.ndarray
    start: int = 0

    def __post_init__(self):
        self.alice = np.asarray(self.alice, dtype=np.uint8)
        self.bob = np.asarray(self.bob, dtype=np.uint8)
        n = num_coordinates(self.host)
        if self.alice.shape != (n,) or self.bob.shape != (n,):
            raise ValueError(f"symbol strings must have length {n}")
        if max(self.alice.max(initial=0), self.bob.max(initial=0)) >= self.gadget.size:
            raise ValueError("symbol outside the gadget alphabet")


def decode_composed(ci: ComposedInstance) -> EolInstance:
    return instance_from_bits(ci.host, ci.gadget(ci.alice, ci.bob), ci.start)


def compose(inst: EolInstance, rng: np.random.Generator, gadget: Gadget | None = None) -> ComposedInstance:
    """Uniformly random symbol pair per coordinate among its gadget preimages."""
    gadget = gadget or ip2()
    x = query_bits(inst)
    a = np.empty(x.size, dtype=np.uint8)
    b = np.empty(x.size, dtype=np.uint8)
    for val in (0, 1):
        pre = gadget.preimages(val)
        sel = np.flatnonzero(x == val)
        pick = pre[rng.integers(0, len(pre), size=sel.size)]
        a[sel], b[sel] = pick[:, 0], pick[:, 1]
    return ComposedInstance(inst.host, gadget, a, b, inst.start)


def random_composed(host: LabeledHostGraph, rng: np.random.Generator, gadget: Gadget | None = None) -> ComposedInstance:
    gadget = gadget or ip2()
    n = num_coordinates(host)
    return ComposedInstance(
        host, gadget, rng.integers(0, gadget.size, n), rng.integers(0, gadget.size, n)
    )


# --------------------------------------------------------------- protocol


@dataclass
class Transcript:
    messages: list = field(default_factory=list)  # (speaker, bit string)

    def send(self, who: str, bits: str) -> None:
        self.messages.append((who, bits))

    @property
    def cost(self) -> int:
        return sum(len(b) for _, b in self.messages)

    def bits(self) -> str:
        return "".join(b for _, b in self.messages)


@dataclass(frozen=True)
class PiVResult:
    succ: int
    pred: int
    transcript: Transcript


def announce_width(host: LabeledHostGraph) -> int:
    return ceil_log2(host.degree_bound + 1)


def _symbols(sym: np.ndarray, bits: int) -> str:
    return "".join(bits_msb(int(s), bits) for s in sym)


def _unsymbols(s: str, bits: int) -> np.ndarray:
    return np.array([int(s[i : i + bits], 2) for i in range(0, len(s), bits)], dtype=np.int64)


def _pointer_coords(host: LabeledHostGraph, v: int, which: str) -> np.ndarray:
    w, N = host.label_bits, host.num_vertices
    off = 0 if which == "succ" else N * w
    return off + v * w + np.arange(w)


def run_pi_v(v: int, ci: ComposedInstance) -> PiVResult:
    """Successor/predecessor of ``v`` and the exact transcript that fixes them.

    Indicator hosts: Alice sends her symbols on the edges at ``v`` (out-edges
    then in-edges, canonical order); Bob announces the local index of the
    first present out-edge and in-edge, 0 meaning "self".

    Complete host: Alice sends ``v``'s two pointer fields, Bob names the two
    pointed-to vertices, Alice sends their back pointers and Bob announces
    the reciprocated neighbours as labels (``v`` itself when there is none).
    """
    host, g = ci.host, ci.gadget
    sb = g.symbol_bits
    tr = Transcript()
    if not 0 <= v < host.num_vertices:
        raise ValueError("vertex out of range")
    if host.kind == KIND_COMPLETE:
        w, N = host.label_bits, host.num_vertices
        idx = np.concatenate([_pointer_coords(host, v, "succ"), _pointer_coords(host, v, "pred")])
        tr.send("A", _symbols(ci.alice[idx], sb))
        x = g(ci.alice[idx], ci.bob[idx])
        u = int("".join(map(str, x[:w])), 2)
        p = int("".join(map(str, x[w:])), 2)
        tr.send("B", bits_msb(u, w) + bits_msb(p, w))
        back = []
        if u < N:
            back.append(_pointer_coords(host, u, "pred"))
        if p < N:
            back.append(_pointer_coords(host, p, "succ"))
        S, P = v, v
        if back:
            idx2 = np.concatenate(back)
            tr.send("A", _symbols(ci.alice[idx2], sb))
            y = g(ci.alice[idx2], ci.bob[idx2])
            k = 0
            if u < N:
                if int("".join(map(str, y[:w])), 2) == v:
                    S = u
                k = w
            if p < N and int("".join(map(str, y[k : k + w])), 2) == v:
                P = p
        tr.send("B", bits_msb(S, w) + bits_msb(P, w))
        return PiVResult(S, P, tr)
    out_e, in_e = host.out_edges(v), host.in_edges(v)
    idx = np.concatenate([out_e, in_e])
    tr.send("A", _symbols(ci.alice[idx], sb))
    x = g(ci.alice[idx], ci.bob[idx])
    xo, xi = x[: out_e.size], x[out_e.size :]
    so = int(np.argmax(xo)) + 1 if xo.any() else 0
    pi = int(np.argmax(xi)) + 1 if xi.any() else 0
    aw = announce_width(host)
    tr.send("B", bits_msb(so, aw) + bits_msb(pi, aw))
    return PiVResult(*pi_v_output(host, v, tr), tr)


def pi_v_output(host: LabeledHostGraph, v: int, tr: Transcript) -> tuple[int, int]:
    """``(S(v), P(v))`` recomputed from ``v`` and the transcript alone."""
    last = tr.messages[-1][1]
    if host.kind == KIND_COMPLETE:
        w = host.label_bits
        return int(last[:w], 2), int(last[w:], 2)
    aw = announce_width(host)
    so, pi = int(last[:aw], 2), int(last[aw:], 2)
    S = int(host.heads[host.out_edges(v)[so - 1]]) if so else v
    P = int(host.tails[host.in_edges(v)[pi - 1]]) if pi else v
    return S, P


def direct_neighbours(inst: EolInstance, v: int) -> tuple[int, int]:
    """Reference answer from the decoded instance (``v`` when absent)."""
    s, p = inst.successor(v), inst.predecessor(v)
    return (v if s is None else s), (v if p is None else p)


def max_transcript_cost(host: LabeledHostGraph | ProductStructure, gadget: Gadget | None = None) -> int:
    """Worst-case transcript length over all vertices of ``host``.

    A :class:`ProductStructure` is audited implicitly: when every port of
    ``H^d`` is used exactly once, a vertex's degree is its gadget degree plus
    one per root role, which :meth:`ProductStructure.degree_profile` maxes
    over the gadget vertices.
    """
    sb = (gadget or ip2()).symbol_bits
    if isinstance(host, ProductStructure):
        if not host.check_regular():
            raise ValueError("product ports are not used exactly once")
        deg = host.degree_profile()[2]
        return deg * sb + 2 * ceil_log2(PRODUCT_DEGREE_BOUND + 1)
    if host.kind == KIND_COMPLETE:
        w = host.label_bits
        return 4 * w * sb + 4 * w
    deg = int((host.out_degrees() + host.in_degrees()).max()) if host.num_edges else 0
    return deg * sb + 2 * announce_width(host)


# -------------------------------------------------------------- file format


def format_composed(ci: ComposedInstance) -> str:
    h = ci.host
    lines = [f"composed v1 gadget={ci.gadget.name} kind={h.kind} n={h.n} d={h.d} start={ci.start}"]
    lines += [f"s {e} {a} {b}" for e, (a, b) in enumerate(zip(ci.alice.tolist(), ci.bob.tolist()))]
    return "\n".join(lines) + "\n"


def parse_composed(text: str, host: LabeledHostGraph | None = None) -> ComposedInstance:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(rows[0], "composed")
    if hdr["gadget"] not in GADGETS:
        raise ValueError(f"unknown gadget {hdr['gadget']!r}")
    if host is None:
        host = build_host(hdr["kind"], int(hdr["n"]), int(hdr.get("d", 0)))
    n = num_coordinates(host)
    a = np.zeros(n, dtype=np.uint8)
    b = np.zeros(n, dtype=np.uint8)
    seen = np.zeros(n, dtype=bool)
    for ln in rows[1:]:
        tag, e, sa, sb = ln.split()
        e = int(e)
        if tag != "s" or not 0 <= e < n or seen[e]:
            raise ValueError(f"bad symbol line {ln!r}")
        a[e], b[e], seen[e] = int(sa), int(sb), True
    if not seen.all():
        raise ValueError("missing symbol lines")
    return ComposedInstance(host, GADGETS[hdr["gadget"]](), a, b, int(hdr.get("start", 0)))


def write_composed(ci: ComposedInstance, path: str | Path) -> None:
    Path(path).write_text(format_composed(ci))


def read_composed(path: str | Path, host: LabeledHostGraph | None = None) -> ComposedInstance:
    return parse_composed("\n".join(read_lines(path)), host)
