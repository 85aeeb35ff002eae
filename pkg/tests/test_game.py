import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.game import (
    AliceAction,
    BobAction,
    MatrixGame,
    MixedStrategy,
    ane_counterexample,
    check_ane,
    check_wsne,
    extract_point,
    format_action,
    format_strategy,
    mix,
    parse_action,
    parse_strategy,
    prune_ane_to_wsne,
    utility_hide_seek,
    validate_action,
    verify_reduction,
)


def _np_regrets(UA, UB, p, q):
    # oracle: payoff vectors against the opponent's mixture
    ua, ub = UA @ q, p @ UB
    return ua.max() - ua[p > 0], ub.max() - ub[q > 0]


def _strategy(vec):
    return MixedStrategy({i: float(w) for i, w in enumerate(vec) if w > 0})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31))
def test_regrets_match_numpy_and_wsne_implies_ane(seed):
    r = np.random.default_rng(seed)
    na, nb = r.integers(2, 5, size=2)
    UA, UB = r.random((na, nb)), r.random((na, nb))
    p = r.random(na) * (r.random(na) < 0.7)
    q = r.random(nb) * (r.random(nb) < 0.7)
    p[0] += 0.1
    q[-1] += 0.1
    p, q = p / p.sum(), q / q.sum()
    G, A, B = MatrixGame(UA, UB), _strategy(p), _strategy(q)
    rep = check_wsne(A, B, G, math.inf)
    ra, rb = _np_regrets(UA, UB, p, q)
    assert np.allclose(sorted(rep.regrets["A"].values()), sorted(ra))
    assert np.allclose(sorted(rep.regrets["B"].values()), sorted(rb))
    assert check_ane(A, B, G, rep.max_regret + 1e-12)["passed"]


def test_matching_pennies_exact():
    UA = np.array([[1.0, 0.0], [0.0, 1.0]])
    G = MatrixGame(UA, 1 - UA)
    A = B = MixedStrategy({0: 0.5, 1: 0.5})
    assert check_wsne(A, B, G, 0.0).passed
    assert not check_wsne(MixedStrategy({0: 1.0}), B, G, 0.0).passed
    assert not check_wsne(A, MixedStrategy({0: 0.9, 1: 0.1}), G, 0.1).passed


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-4])
def test_counterexample_and_pruning(eps):
    G, A, B = ane_counterexample(eps)
    assert check_ane(A, B, G, eps)["passed"]
    assert not check_wsne(A, B, G, eps).passed
    A2, B2 = prune_ane_to_wsne(A, B, G, eps)
    assert check_wsne(A2, B2, G, 3 * math.sqrt(eps)).passed
    assert len(A2) == 1


def test_prune_rejects_non_ane():
    UA = np.array([[1.0, 0.0], [0.0, 0.0]])
    G = MatrixGame(UA, UA.copy())
    with pytest.raises(ValueError):
        prune_ane_to_wsne(MixedStrategy({1: 1.0}), MixedStrategy({0: 1.0}), G, 0.01)


def test_mixed_strategy_validation():
    with pytest.raises(ValueError):
        MixedStrategy({0: 0.5, 1: 0.4}).validate()
    with pytest.raises(ValueError):
        MixedStrategy({0: 1.2, 1: -0.2}).validate()
    S = mix(MixedStrategy({0: 1.0}), MixedStrategy({1: 1.0}), 0.25)
    assert S == {0: 0.75, 1: 0.25}


def test_hide_and_seek_is_zero_sum():
    J = frozenset({0, 2})
    for ja in range(4):
        for jb in range(4):
            u = utility_hide_seek(AliceAction((0, 0), ja, J, (), (None, None)), BobAction((0, 0), jb, J, (), ()))
            assert u["A_j"] == -u["B_J"] and u["A_J"] == -u["B_j"]
            assert u["B_J"] == (1 if ja in J else -1)


def test_planted_profile_is_exact_wsne(planted6, setup6):
    G, A, B, sol = planted6
    inst, F, _ = setup6
    rep = check_wsne(A, B, G, 1e-12)
    assert rep.passed and rep.max_regret <= 1e-12
    assert sol.vertex == inst.successor(inst.successor(0)) or sol.reason == "sink"
    for side, S, O in (("A", A, B), ("B", B, A)):
        val, act = G.best_response(side, O)
        assert math.isclose(val, G.value(side, act, O), abs_tol=1e-15)
        for a in list(S)[:3]:
            assert G.value(side, a, O) <= val + 1e-15


def test_best_response_beats_random_deviations(planted6, rng):
    G, A, B, _ = planted6
    sp = G.spec
    val, _ = G.best_response("B", A)
    for _ in range(20):
        j = int(rng.integers(0, sp.L))
        x = tuple(sp.profile.grid(rng.uniform(-1, 2, sp.cover("B", j).size)).tolist())
        vb = (int(rng.integers(0, 8)), None)
        J = frozenset(rng.choice(sp.L, sp.L // 2, replace=False).tolist())
        b = BobAction(vb, j, J, x, x)
        validate_action(b, sp)
        assert G.value("B", b, A) <= val + 1e-15


def test_verify_reduction_roundtrip(planted6, setup6):
    G, A, B, sol = planted6
    inst, F, _ = setup6
    r = verify_reduction(A, B, G, F, 1e-9, 1e-3)
    assert r.solution.vertex == sol.vertex and r.uncovered == 0
    assert r.residual_sq <= 1e-3 * F.profile_.eps_brouwer


def test_verify_reduction_rejects_non_equilibrium(planted6, setup6):
    G, A, B, _ = planted6
    _, F, _ = setup6
    bad = MixedStrategy({BobAction(b.v, b.j, b.J, b.x, tuple(0.0 for _ in b.xhat)): p for b, p in B.items()})
    with pytest.raises(ValueError):
        verify_reduction(A, bad, G, F, 1e-9, 1e-3)


def test_extract_covers_every_coordinate(planted6, fixed6):
    G, _, B, _ = planted6
    x, unc = extract_point(B, G.spec, "x")
    assert not unc.any()
    assert np.abs(x - fixed6).max() <= 1e-8


def test_strategy_text_roundtrip(planted6):
    _, A, B, _ = planted6
    for side, S in (("A", A), ("B", B)):
        back_side, back = parse_strategy(format_strategy(S, side))
        assert back_side == side and back == S
    a = next(iter(A))
    assert parse_action(format_action(a), "A") == a


def test_validate_action_rejects_bad_shapes(planted6):
    G, A, _, _ = planted6
    a = next(iter(A))
    with pytest.raises(ValueError):
        validate_action(AliceAction(a.v, a.j, a.J, a.x[:-1], a.alpha), G.spec)
    with pytest.raises(ValueError):
        validate_action(AliceAction(a.v, G.spec.L, a.J, a.x, a.alpha), G.spec)
