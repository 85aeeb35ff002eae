"""Two-player game whose well-supported equilibria encode fixed points of f.

Alice and Bob each hold half of every vertex label, an index ``j`` into the
subset families, a hide-and-seek guess ``J`` and a partial point.  Alice also
declares her gadget symbols around the vertices; Bob holds a second partial
point ``xhat`` that is rewarded for matching the doubly-local image of
Alice's point.  The equilibrium checkers are generic: they work with any
object exposing ``value(side, action, other)`` and ``best_response(side, other)``.

The host is the complete graph on ``N = 2**n`` vertices in pointer form, so
every pair of half-vertices is a half-neighbour pair.  A vertex's gadget
symbols are Alice's symbols on its own succ/pred pointer bits, and Bob reads
``S(v)``/``P(v)`` straight from those two fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._util import nnorm, parse_header, read_lines
from .brouwer import BrouwerField, decode_fixed_point
from .code import ConcatenatedCode
from .graphs import KIND_COMPLETE, EolInstance, EolSolution, LabeledHostGraph, check_eol_solution
from .lift import ComposedInstance, Gadget, ip2
from .locality import LocalEvaluator, SubsetFamily, block_coords, validate_vertex_pair
from .profile import ConstantsProfile, decode_radii

SIDES = ("A", "B")

# ------------------------------------------------------ mixed strategies


class MixedStrategy(dict):
    """Sparse map action -> probability."""

    def validate(self) -> "MixedStrategy":
        if not self:
            raise ValueError("empty strategy")
        p = np.array(list(self.values()), dtype=float)
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"unnormalized strategy (sum {p.sum():.15g})")
        return self

    @classmethod
    def uniform(cls, actions) -> "MixedStrategy":
        actions = list(actions)
        return cls({a: 1.0 / len(actions) for a in actions})

    @classmethod
    def normalized(cls, weights: dict) -> "MixedStrategy":
        tot = math.fsum(weights.values())
        if tot <= 0:
            raise ValueError("weights sum to zero")
        return cls({a: w / tot for a, w in weights.items() if w > 0})

    @property
    def support(self) -> list:
        return [a for a, p in self.items() if p > 0]


def mix(S1: MixedStrategy, S2: MixedStrategy, w: float) -> MixedStrategy:
    out: dict = {}
    for a, p in S1.items():
        out[a] = out.get(a, 0.0) + (1 - w) * p
    for a, p in S2.items():
        out[a] = out.get(a, 0.0) + w * p
    return MixedStrategy(out)


# ------------------------------------------------------------- checkers


class MatrixGame:
    """Bimatrix game; actions are row/column indices."""

    def __init__(self, UA, UB):
        self.UA = np.asarray(UA, dtype=float)
        self.UB = np.asarray(UB, dtype=float)
        if self.UA.shape != self.UB.shape or self.UA.ndim != 2:
            raise ValueError("payoff matrices must share one 2-d shape")

    def _vec(self, side: str, other: MixedStrategy) -> np.ndarray:
        U = self.UA if side == "A" else self.UB.T
        q = np.zeros(U.shape[1])
        for b, p in other.items():
            q[b] += p
        return U @ q

    def value(self, side: str, action, other: MixedStrategy) -> float:
        return float(self._vec(side, other)[action])

    def best_response(self, side: str, other: MixedStrategy):
        v = self._vec(side, other)
        k = int(np.argmax(v))
        return float(v[k]), k


@dataclass
class WsneReport:
    passed: bool
    eps: float
    regrets: dict  # side -> {action: regret}
    best: dict  # side -> (value, action)

    @property
    def max_regret(self) -> float:
        return max(max(r.values()) for r in self.regrets.values())


def regrets(game, side: str, S: MixedStrategy, other: MixedStrategy) -> tuple[dict, tuple]:
    best = game.best_response(side, other)
    return {a: best[0] - game.value(side, a, other) for a in S.support}, best


def check_wsne(A: MixedStrategy, B: MixedStrategy, game, eps: float) -> WsneReport:
    A.validate()
    B.validate()
    ra, ba = regrets(game, "A", A, B)
    rb, bb = regrets(game, "B", B, A)
    ok = max(ra.values()) <= eps and max(rb.values()) <= eps
    return WsneReport(bool(ok), eps, {"A": ra, "B": rb}, {"A": ba, "B": bb})


def expected_payoff(game, side: str, S: MixedStrategy, other: MixedStrategy) -> float:
    return math.fsum(p * game.value(side, a, other) for a, p in S.items())


def check_ane(A: MixedStrategy, B: MixedStrategy, game, eps: float) -> dict:
    A.validate()
    B.validate()
    gain = {}
    for side, S, O in (("A", A, B), ("B", B, A)):
        gain[side] = game.best_response(side, O)[0] - expected_payoff(game, side, S, O)
    return {"passed": bool(max(gain.values()) <= eps), "eps": eps, "gain": gain}


def prune_ane_to_wsne(A: MixedStrategy, B: MixedStrategy, game, eps: float):
    """Drop actions that are not ``(eps + sqrt(eps))``-optimal against the original profile."""
    thr = eps + math.sqrt(eps)
    out = []
    for side, S, O in (("A", A, B), ("B", B, A)):
        r, _ = regrets(game, side, S.validate(), O.validate())
        keep = {a: S[a] for a in S.support if r[a] <= thr}
        if not keep:
            raise ValueError(f"pruning empties {side}'s support: the profile is not an eps-ANE")
        out.append(MixedStrategy.normalized(keep))
    return out[0], out[1]


def ane_counterexample(eps: float, size: int = 3, seed: int = 0) -> tuple[MatrixGame, MixedStrategy, MixedStrategy]:
    """A strict pure equilibrium diluted by mass ``eps`` on a bad action.

    The profile is an ``eps``-ANE (deviation gain ``eps / 2``) yet not an
    ``eps``-WSNE for ``eps < 1/2``, since the bad action has regret 1/2.
    """
    rng = np.random.default_rng(seed)
    UA = rng.random((size, size)) * 0.5
    UB = rng.random((size, size)) * 0.5
    UA[0, 0] = UB[0, 0] = 1.0
    UA[size - 1, 0] = 0.5
    A = MixedStrategy({0: 1 - eps, size - 1: eps})
    B = MixedStrategy({0: 1.0})
    return MatrixGame(UA, UB), A, B


# ------------------------------------------------------------- the game


@dataclass(eq=False)
class GameSpec:
    """Public data shared by both players (code, families, constants)."""

    code: ConcatenatedCode
    family: SubsetFamily
    profile: ConstantsProfile
    host: LabeledHostGraph
    gadget: Gadget = field(default_factory=ip2)
    _inter: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.host.kind != KIND_COMPLETE:
            raise ValueError("the game is built over the complete pointer host")
        if self.family.m != self.code.m:
            raise ValueError("family and code disagree on m")
        if self.host.num_vertices > 1 << self.code.n:
            raise ValueError("code labels are too short for the host")
        self.radii = decode_radii(self.profile, self.code.distance, self.code.m)

    @property
    def m(self) -> int:
        return self.code.m

    @property
    def L(self) -> int:
        return self.family.size

    @property
    def halves(self) -> tuple[int, int]:
        """Number of values of Alice's and Bob's half-vertex."""
        return 1 << self.code.split, 1 << (self.code.n - self.code.split)

    def cover(self, side: str, j: int) -> np.ndarray:
        """Flat indices of ``[4] x sigma_j`` (Alice) or ``[4] x tau_j`` (Bob)."""
        T = self.family.sigma[j] if side == "A" else self.family.tau[j]
        return block_coords(T, self.m)

    def intersection(self, ja: int, jb: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(positions in Alice's partial, positions in Bob's partial, flat coords)."""
        key = (ja, jb)
        hit = self._inter.get(key)
        if hit is None:
            ca, cb = self.cover("A", ja), self.cover("B", jb)
            common = np.intersect1d(ca, cb)
            hit = (np.searchsorted(ca, common), np.searchsorted(cb, common), common)
            self._inter[key] = hit
        return hit

    def legal_pairs(self, side: str) -> list[tuple[int | None, int | None]]:
        """All half-vertex pairs; on the complete host every pair is half-neighbours."""
        vals = [None] + list(range(self.halves[0 if side == "A" else 1]))
        return [(a, b) for a in vals for b in vals]

    def join(self, va, vb) -> int | None:
        if va is None or vb is None:
            return None
        v = self.code.join(va, vb)
        return v if v < self.host.num_vertices else None

    def alpha_coords(self, v: int) -> np.ndarray:
        w, N = self.host.label_bits, self.host.num_vertices
        own = v * w + np.arange(w)
        return np.concatenate([own, N * w + own])

    @property
    def payoff_range(self) -> tuple[float, float]:
        p = self.profile
        lo = -2 * p.lam_v - 2 * p.lam_j - 2 * 9 * p.lam_x
        hi = 2 * p.lam_v + 2 * p.lam_alpha + 2 * p.lam_j
        return lo, hi


Alpha = tuple[int, ...] | None


@dataclass(frozen=True)
class AliceAction:
    v: tuple[int | None, int | None]
    j: int
    J: frozenset
    x: tuple[float, ...]
    alpha: tuple[Alpha, Alpha]


@dataclass(frozen=True)
class BobAction:
    v: tuple[int | None, int | None]
    j: int
    J: frozenset
    x: tuple[float, ...]
    xhat: tuple[float, ...]


def validate_action(action, spec: GameSpec) -> None:
    side = "A" if isinstance(action, AliceAction) else "B"
    hv = spec.halves[0 if side == "A" else 1]
    for v in action.v:
        if v is not None and not 0 <= v < hv:
            raise ValueError(f"half-vertex {v} out of range")
    if tuple(action.v) not in set(spec.legal_pairs(side)):
        raise ValueError("illegal half-vertex pair")
    if not 0 <= action.j < spec.L:
        raise ValueError("index j out of range")
    if len(action.J) != spec.L // 2 or not all(0 <= t < spec.L for t in action.J):
        raise ValueError("J must be a subset of size L/2")
    n = spec.cover(side, action.j).size
    vecs = [action.x] + ([action.xhat] if side == "B" else [])
    for vec in vecs:
        arr = np.asarray(vec, dtype=float)
        if arr.shape != (n,):
            raise ValueError(f"partial vector must have {n} entries")
        if not np.array_equal(spec.profile.grid(arr), arr):
            raise ValueError("partial vector is off the precision grid")
    if side == "A":
        w = 2 * spec.host.label_bits
        for al in action.alpha:
            if al is not None and (len(al) != w or not all(0 <= s < spec.gadget.size for s in al)):
                raise ValueError("malformed gadget symbols")


# -------------------------------------------------------------- oracles


class AliceOracle:
    """Alice's payoff oracle: holds her private symbol string only."""

    side = "A"

    def __init__(self, spec: GameSpec, alpha: np.ndarray):
        self.spec = spec
        self._alpha = np.asarray(alpha, dtype=np.uint8)

    def alpha_of(self, v: int | None) -> Alpha:
        if v is None:
            return None
        return tuple(int(s) for s in self._alpha[self.spec.alpha_coords(v)])


class BobOracle:
    """Bob's payoff oracle: holds his private symbol string only."""

    side = "B"

    def __init__(self, spec: GameSpec, beta: np.ndarray):
        self.spec = spec
        self._beta = np.asarray(beta, dtype=np.uint8)
        self.evaluator = LocalEvaluator(spec.code, spec.profile, 0)
        self._images: dict = {}

    def neighbourhood(self, v: int | None, alpha: Alpha):
        """(v, S(v), P(v)) from Alice's declared symbols and Bob's own."""
        if v is None or alpha is None:
            return None
        sp = self.spec
        w, N = sp.host.label_bits, sp.host.num_vertices
        bits = sp.gadget(np.asarray(alpha), self._beta[sp.alpha_coords(v)])
        weights = 1 << np.arange(w - 1, -1, -1)
        s, p = int(bits[:w] @ weights), int(bits[w:] @ weights)
        return (v, s if s < N else v, p if p < N else v)

    def vertex_info(self, a: AliceAction, b: BobAction):
        sp = self.spec
        infos = [self.neighbourhood(sp.join(a.v[r], b.v[r]), a.alpha[r]) for r in (0, 1)]
        try:
            validate_vertex_pair(infos)
        except ValueError:
            infos = [infos[0], None]
        return tuple(infos)

    def images(self, a: AliceAction, b: BobAction) -> np.ndarray:
        """Doubly-local images of Alice's partial point on all of ``[4] x sigma_j``."""
        vi = self.vertex_info(a, b)
        key = (a, vi)
        hit = self._images.get(key)
        if hit is None:
            sp = self.spec
            cols = sp.cover("A", a.j)
            x = np.asarray(a.x, dtype=float)
            hit = self.evaluator.evaluate(cols, x, vi, x, sp.family.sigma[a.j])
            if len(self._images) > 200_000:
                self._images.clear()
            self._images[key] = hit
        return hit


# ---------------------------------------------------------- sub-utilities


def _vertex_test(spec: GameSpec, v_half: int | None, side: str, r: int, other) -> int:
    """+1 / 0 / -1 rounding test of ``v_half`` against the other player's block r."""
    if v_half is None:
        return 0
    h = spec.m // 2
    if side == "A":
        T = spec.family.tau[other.j]
        sel = T < h
        coords = T[sel]
        word = spec.code.half.codewords_[v_half][coords]
    else:
        T = spec.family.sigma[other.j]
        sel = T >= h
        word = spec.code.half.codewords_[v_half][T[sel] - h]
    block = np.asarray(other.x, dtype=float)[r * T.size : (r + 1) * T.size][sel]
    return 1 if nnorm(word - block) < spec.radii.vertex_test else -1


def utility_v(side: str, a: AliceAction, b: BobAction, spec: GameSpec) -> int:
    if side == "A":
        return sum(_vertex_test(spec, a.v[r], "A", r, b) for r in (0, 1))
    return sum(_vertex_test(spec, b.v[r], "B", r, a) for r in (0, 1))


def utility_alpha(a: AliceAction, b: BobAction, oracle: AliceOracle) -> int:
    sp = oracle.spec
    return sum(int(a.alpha[r] == oracle.alpha_of(sp.join(a.v[r], b.v[r]))) for r in (0, 1))


def utility_hide_seek(a, b) -> dict:
    """Both hide-and-seek games: Bob hunts ``j^a`` with ``J^b`` and vice versa."""
    bob_J = 1 if a.j in b.J else -1
    alice_J = 1 if b.j in a.J else -1
    return {"A_j": -bob_J, "B_J": bob_J, "A_J": alice_J, "B_j": -alice_J}


def utility_x(side: str, a: AliceAction, b: BobAction, spec: GameSpec) -> float:
    pa, pb, _ = spec.intersection(a.j, b.j)
    xa = np.asarray(a.x)[pa]
    other = np.asarray(b.xhat if side == "A" else b.x)[pb]
    return -float(np.mean((other - xa) ** 2))


def utility_xhat_bob(a: AliceAction, b: BobAction, oracle: BobOracle) -> float:
    sp = oracle.spec
    pa, pb, _ = sp.intersection(a.j, b.j)
    img = oracle.images(a, b)[pa]
    return -float(np.mean((np.asarray(b.xhat)[pb] - img) ** 2))


def total_payoff(oracle, a: AliceAction, b: BobAction) -> float:
    sp = oracle.spec
    p = sp.profile
    hs = utility_hide_seek(a, b)
    if oracle.side == "A":
        return (
            p.lam_v * utility_v("A", a, b, sp)
            + p.lam_alpha * utility_alpha(a, b, oracle)
            + p.lam_j * (hs["A_j"] + hs["A_J"])
            + p.lam_x * utility_x("A", a, b, sp)
        )
    return (
        p.lam_v * utility_v("B", a, b, sp)
        + p.lam_j * (hs["B_j"] + hs["B_J"])
        + p.lam_x * (utility_x("B", a, b, sp) + utility_xhat_bob(a, b, oracle))
    )


# -------------------------------------------------------- the game object


def _top_half(marg: np.ndarray) -> frozenset:
    order = np.lexsort((np.arange(marg.size), -marg))
    return frozenset(int(t) for t in order[: marg.size // 2])


class ReductionGame:
    """Expected payoffs and exact best responses for the reduction game.

    Best responses use separability: ``J`` is the top half of the opponent's
    ``j`` marginal, partial vectors are conditional means snapped to the
    grid, and the discrete parts ``(v, alpha, j)`` are enumerated.
    """

    def __init__(self, spec: GameSpec, alice: AliceOracle, bob: BobOracle):
        self.spec = spec
        self.oracles = {"A": alice, "B": bob}

    def payoff(self, side: str, a: AliceAction, b: BobAction) -> float:
        return total_payoff(self.oracles[side], a, b)

    def value(self, side: str, action, other: MixedStrategy) -> float:
        if side == "A":
            return math.fsum(q * self.payoff("A", action, b) for b, q in other.items())
        return math.fsum(p * self.payoff("B", a, action) for a, p in other.items())

    def _marg(self, S: MixedStrategy) -> np.ndarray:
        marg = np.zeros(self.spec.L)
        for act, p in S.items():
            marg[act.j] += p
        return marg

    def _j_term(self, S: MixedStrategy) -> tuple[np.ndarray, frozenset, float]:
        """Value of hiding at each j against ``S``'s guesses, plus the best guess."""
        L = self.spec.L
        caught = np.zeros(L)
        for act, p in S.items():
            caught[list(act.J)] += p
        marg = self._marg(S)
        J = _top_half(marg)
        jval = 1 - 2 * caught
        return jval, J, 2 * float(marg[list(J)].sum()) - 1

    def _snap_mean(self, num: np.ndarray, den: np.ndarray) -> np.ndarray:
        mean = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
        return self.spec.profile.grid(mean)

    @staticmethod
    def _sq_value(x: np.ndarray, pieces) -> float:
        """``-sum_w w * mean((x[pos] - target)^2)`` over ``(w, pos, target)``."""
        return -math.fsum(w * float(np.mean((x[pos] - t) ** 2)) for w, pos, t in pieces)

    def best_response(self, side: str, other: MixedStrategy):
        other.validate()
        return self._br_alice(other) if side == "A" else self._br_bob(other)

    def _br_alice(self, B: MixedStrategy):
        sp, p = self.spec, self.spec.profile
        orc: AliceOracle = self.oracles["A"]
        jval, J, Jval = self._j_term(B)
        best_j = None
        for j in range(sp.L):
            n = sp.cover("A", j).size
            num, den, pieces = np.zeros(n), np.zeros(n), []
            for b, q in B.items():
                pa, pb, _ = sp.intersection(j, b.j)
                t = np.asarray(b.xhat)[pb]
                np.add.at(num, pa, q * t)
                np.add.at(den, pa, q)
                pieces.append((q, pa, t))
            x = self._snap_mean(num, den)
            val = p.lam_j * jval[j] + p.lam_x * self._sq_value(x, pieces)
            if best_j is None or val > best_j[0] + 1e-15:
                best_j = (val, j, tuple(x.tolist()))
        per_r = []
        for r in (0, 1):
            table = {}
            for vh in [None] + list(range(sp.halves[0])):
                uv = math.fsum(q * _vertex_test(sp, vh, "A", r, b) for b, q in B.items())
                votes: dict = {}
                for b, q in B.items():
                    key = orc.alpha_of(sp.join(vh, b.v[r]))
                    votes[key] = votes.get(key, 0.0) + q
                al = max(votes.items(), key=lambda kv: (kv[1], kv[0] is None))
                table[vh] = (p.lam_v * uv + p.lam_alpha * al[1], al[0])
            per_r.append(table)
        best_v = max(
            sp.legal_pairs("A"),
            key=lambda pr: per_r[0][pr[0]][0] + per_r[1][pr[1]][0],
        )
        vval = per_r[0][best_v[0]][0] + per_r[1][best_v[1]][0]
        action = AliceAction(
            best_v, best_j[1], J, best_j[2], (per_r[0][best_v[0]][1], per_r[1][best_v[1]][1])
        )
        return vval + best_j[0] + p.lam_j * Jval, action

    def _br_bob(self, A: MixedStrategy):
        sp, p = self.spec, self.spec.profile
        orc: BobOracle = self.oracles["B"]
        jval, J, Jval = self._j_term(A)
        uv = []
        for r in (0, 1):
            uv.append(
                {
                    vh: math.fsum(q * _vertex_test(sp, vh, "B", r, a) for a, q in A.items())
                    for vh in [None] + list(range(sp.halves[1]))
                }
            )
        # imitation part depends on j only
        ximit = {}
        for j in range(sp.L):
            n = sp.cover("B", j).size
            num, den, pieces = np.zeros(n), np.zeros(n), []
            for a, q in A.items():
                pa, pb, _ = sp.intersection(a.j, j)
                t = np.asarray(a.x)[pa]
                np.add.at(num, pb, q * t)
                np.add.at(den, pb, q)
                pieces.append((q, pb, t))
            x = self._snap_mean(num, den)
            ximit[j] = (self._sq_value(x, pieces), x)
        best = None
        for vb in sp.legal_pairs("B"):
            probe = BobAction(vb, 0, frozenset(), (), ())
            imgs = [(a, q, orc.images(a, probe)) for a, q in A.items()]
            for j in range(sp.L):
                n = sp.cover("B", j).size
                num, den, pieces = np.zeros(n), np.zeros(n), []
                for a, q, img in imgs:
                    pa, pb, _ = sp.intersection(a.j, j)
                    t = img[pa]
                    np.add.at(num, pb, q * t)
                    np.add.at(den, pb, q)
                    pieces.append((q, pb, t))
                xh = self._snap_mean(num, den)
                val = (
                    p.lam_v * (uv[0][vb[0]] + uv[1][vb[1]])
                    + p.lam_j * jval[j]
                    + p.lam_x * (ximit[j][0] + self._sq_value(xh, pieces))
                )
                if best is None or val > best[0] + 1e-15:
                    best = (val, vb, j, xh)
        val, vb, j, xh = best
        action = BobAction(vb, j, J, tuple(ximit[j][1].tolist()), tuple(xh.tolist()))
        return val + p.lam_j * Jval, action


def build_game(
    inst: EolInstance,
    code: ConcatenatedCode,
    family: SubsetFamily,
    profile: ConstantsProfile,
    rng: np.random.Generator,
) -> ReductionGame:
    """Split the instance's pointer bits into private symbol strings and wrap oracles."""
    from .lift import compose

    return game_from_composed(compose(inst, rng, ip2()), code, family, profile)


def game_from_composed(
    ci: ComposedInstance, code: ConcatenatedCode, family: SubsetFamily, profile: ConstantsProfile
) -> ReductionGame:
    spec = GameSpec(code, family, profile, ci.host, ci.gadget)
    return ReductionGame(spec, AliceOracle(spec, ci.alice), BobOracle(spec, ci.bob))


# ------------------------------------------------------------- extraction


def extract_point(S: MixedStrategy, spec: GameSpec, which: str = "x") -> tuple[np.ndarray, np.ndarray]:
    """Coordinatewise conditional expectation; returns (point, uncovered mask).

    Uncovered coordinates are set to 0.
    """
    num = np.zeros(4 * spec.m)
    den = np.zeros(4 * spec.m)
    for act, p in S.items():
        side = "A" if isinstance(act, AliceAction) else "B"
        cols = spec.cover(side, act.j)
        vec = np.asarray(act.xhat if which == "xhat" else act.x, dtype=float)
        num[cols] += p * vec
        den[cols] += p
    unc = den <= 0
    return np.divide(num, den, out=np.zeros_like(num), where=~unc), unc


# ------------------------------------------------------------- planting


def alternating_J(L: int) -> tuple[frozenset, frozenset]:
    J0 = frozenset(range(0, L, 2))
    return J0, frozenset(range(L)) - J0


def plant_equilibrium(game: ReductionGame, field_: BrouwerField, x_star: np.ndarray, tol: float | None = None):
    """Natural candidate profile at a fixed point ``x_star``.

    Alice plays every ``j`` uniformly with her slice of ``x_star``, the
    decoded half-vertices and her true gadget symbols; Bob plays every ``j``
    uniformly, imitates ``x_star`` with ``x`` and best-responds with ``xhat``.
    ``J`` alternates between the even indices and their complement.
    """
    sp = game.spec
    prof = sp.profile
    tol = prof.delta / 10 if tol is None else tol
    x_star = np.asarray(x_star, dtype=float)
    sol = decode_fixed_point(x_star, field_, tol)
    va, vb = sp.code.halves(sol.vertex)
    al = game.oracles["A"].alpha_of(sol.vertex)
    J0, J1 = alternating_J(sp.L)
    xs = prof.grid(x_star)
    A = MixedStrategy.uniform(
        AliceAction((va, va), j, J0 if j % 2 == 0 else J1, tuple(xs[sp.cover("A", j)].tolist()), (al, al))
        for j in range(sp.L)
    )
    bobs = {}
    orc = game.oracles["B"]
    for j in range(sp.L):
        probe = BobAction((vb, vb), j, J0 if j % 2 == 0 else J1, tuple(xs[sp.cover("B", j)].tolist()), ())
        n = sp.cover("B", j).size
        num, den = np.zeros(n), np.zeros(n)
        for a, q in A.items():
            pa, pb, _ = sp.intersection(a.j, j)
            np.add.at(num, pb, q * orc.images(a, probe)[pa])
            np.add.at(den, pb, q)
        xh = game._snap_mean(num, den)
        bobs[BobAction(probe.v, j, probe.J, probe.x, tuple(xh.tolist()))] = 1.0 / sp.L
    return A, MixedStrategy(bobs), sol


@dataclass
class ReductionResult:
    residual: float
    residual_sq: float
    solution: EolSolution
    uncovered: int
    point: np.ndarray


def verify_reduction(
    A: MixedStrategy,
    B: MixedStrategy,
    game: ReductionGame,
    field_: BrouwerField,
    eps: float,
    K: float,
) -> ReductionResult:
    """Equilibrium -> approximate fixed point -> EoL solution, with all checks."""
    rep = check_wsne(A, B, game, eps)
    if not rep.passed:
        raise ValueError(f"profile is not an eps-WSNE (max regret {rep.max_regret:.3g} > {eps:.3g})")
    x, unc = extract_point(B, game.spec, "xhat")
    res = nnorm(field_.transform(x) - x)
    bound = K * game.spec.profile.eps_brouwer
    if res**2 > bound:
        raise ValueError(f"residual^2 {res**2:.3g} exceeds K * eps_brouwer = {bound:.3g}")
    sol = decode_fixed_point(x, field_, tol=math.sqrt(bound))
    if check_eol_solution(field_.instance_, sol.vertex) != sol:
        raise ValueError("decoded vertex failed re-validation")
    return ReductionResult(res, res**2, sol, int(unc.sum()), x)


# ------------------------------------------------------------ audits


def half_neighbor_pairs(host: LabeledHostGraph, split: int | None = None) -> int:
    """Number of legal ``(v1, v2)`` half-vertex pairs on an edge-listed host.

    Counts ``bot`` shapes, equal pairs and half-neighbour pairs of the
    leading ``split`` label bits (default half the label width).
    """
    bits = host.label_bits
    split = bits // 2 if split is None else split
    shift = bits - split
    ha = host.labels[host.tails] >> shift
    hb = host.labels[host.heads] >> shift
    pairs = set(zip(ha.tolist(), hb.tolist())) | set(zip(hb.tolist(), ha.tolist()))
    pairs |= {(t, t) for t in range(1 << split)}
    return len(pairs) + 2 * (1 << split) + 1


# ---------------------------------------------------------- strategy files


def _opt(v) -> str:
    return "_" if v is None else str(v)


def _unopt(s: str):
    return None if s == "_" else int(s)


def format_action(a) -> str:
    J = ",".join(map(str, sorted(a.J)))
    xs = ",".join(repr(float(t)) for t in a.x)
    base = f"v={_opt(a.v[0])},{_opt(a.v[1])} j={a.j} J={J} x={xs}"
    if isinstance(a, AliceAction):
        al = ",".join("_" if s is None else "".join(map(str, s)) for s in a.alpha)
        return base + f" alpha={al}"
    return base + " xhat=" + ",".join(repr(float(t)) for t in a.xhat)


def parse_action(text: str, side: str):
    f = dict(tok.split("=", 1) for tok in text.split())
    v = tuple(_unopt(t) for t in f["v"].split(","))
    J = frozenset(int(t) for t in f["J"].split(",") if t)
    x = tuple(float(t) for t in f["x"].split(",") if t)
    if side == "A":
        al = tuple(None if s == "_" else tuple(int(c) for c in s) for s in f["alpha"].split(","))
        return AliceAction(v, int(f["j"]), J, x, al)
    xh = tuple(float(t) for t in f["xhat"].split(",") if t)
    return BobAction(v, int(f["j"]), J, x, xh)


def format_strategy(S: MixedStrategy, side: str) -> str:
    rows = sorted(((format_action(a), p) for a, p in S.items()))
    return f"strategy v1 side={side}\n" + "".join(f"p {p!r} {s}\n" for s, p in rows)


def parse_strategy(text: str) -> tuple[str, MixedStrategy]:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    side = parse_header(rows[0], "strategy")["side"]
    if side not in SIDES:
        raise ValueError(f"unknown side {side!r}")
    S = MixedStrategy()
    for ln in rows[1:]:
        tag, p, rest = ln.split(" ", 2)
        if tag != "p":
            raise ValueError(f"bad strategy line {ln[:40]!r}")
        S[parse_action(rest, side)] = float(p)
    return side, S.validate()


def write_strategy(S: MixedStrategy, side: str, path: str | Path) -> None:
    Path(path).write_text(format_strategy(S, side))


def read_strategy(path: str | Path) -> tuple[str, MixedStrategy]:
    return parse_strategy("\n".join(read_lines(path)))

