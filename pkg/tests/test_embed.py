import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.embed import (
    apply_deletion_block,
    apply_shortcut_block,
    audit_edge_disjoint,
    block_sensitivity,
    congestion,
    congestion_trials,
    coupling_failure_rate,
    deletion_blocks,
    dichotomy_experiment,
    embed_instance,
    from_pointer_bits,
    path_edges,
    pointer_bits,
    sample_critical,
    sample_embedding,
    shortcut_blocks,
    solve_canonical,
    solve_coin,
    solve_noncanonical,
    walk_path,
)
from nashlab.graphs import build_double_butterfly, enumerate_solutions


@pytest.mark.parametrize("N", [6, 10, 50])
def test_block_sensitivity_counts(N, rng):
    x = sample_critical(N, rng)
    dels, cuts = deletion_blocks(x), shortcut_blocks(x)
    assert len(dels.blocks) == N - 1 and len(cuts.blocks) == N // 2 - 1
    assert dels.is_disjoint() and cuts.is_disjoint()
    assert block_sensitivity(solve_canonical, x, dels) == N - 1
    assert block_sensitivity(solve_noncanonical, x, cuts) == N // 2 - 1


@pytest.mark.parametrize("N", [6, 10])
def test_blocks_make_bicritical_inputs(N, rng):
    x = sample_critical(N, rng)
    assert len(enumerate_solutions(x)) == 1
    for i in range(1, N - 1):
        assert len(enumerate_solutions(apply_deletion_block(x, i))) == 3
    # the last edge leaves an isolated end vertex: old sink gone, two solutions remain
    assert len(enumerate_solutions(apply_deletion_block(x, N - 1))) == 2
    for j in range(1, N // 2):
        assert len(enumerate_solutions(apply_shortcut_block(x, j))) == 3


def test_solvers_return_solutions(rng):
    x = sample_critical(12, rng)
    y = apply_shortcut_block(x, 2)
    sols = {s.vertex for s in enumerate_solutions(y)}
    for solver in (solve_canonical, solve_noncanonical, solve_coin):
        assert solver(y) in sols
    assert solve_canonical(y) == walk_path(y)[-1]
    assert solve_noncanonical(y) != solve_canonical(y)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31))
def test_pointer_bits_roundtrip(N, seed):
    x = sample_critical(N, np.random.default_rng(seed))
    y = from_pointer_bits(x.host, pointer_bits(x))
    assert np.array_equal(y.succ, x.succ) and np.array_equal(y.pred, x.pred)


def test_routed_paths_use_host_edges(rng):
    n = 4
    H = build_double_butterfly(n)
    edges = set(zip(H.tails.tolist(), H.heads.tolist()))
    order = [0] + (1 + rng.permutation((1 << n) - 1)).tolist()
    emb = sample_embedding(H, 16, path_edges(order), rng)
    assert emb.ok
    for (a, b), p in zip(emb.edges, emb.paths):
        assert p[0] == a and p[-1] == b and len(p) == 2 * n + 1
        assert all((int(s), int(t)) in edges for s, t in zip(p[:-1], p[1:]))
    assert audit_edge_disjoint(emb) == 0


def test_congestion_counts_vertex_visits():
    # oracle: max over vertices of the number of paths through it (interior + ends)
    paths = np.array([[0, 1, 2], [3, 1, 4], [5, 1, 2]])
    assert congestion(paths) == 3
    assert congestion(np.array([[0, 1], [2, 3]])) == 1


def test_embedding_instance_degrees_follow_congestion(rng):
    x = sample_critical(16, rng)
    emb, Hd = embed_instance(4, x, rng)
    inst = emb.to_instance(Hd)
    ind, outd = inst.degrees()
    assert int(inst.indicators.sum()) == 15 * 2 * 4
    assert max(ind.max(), outd.max()) <= emb.congestion <= Hd.d
    # only the embedded path's two ends are unbalanced
    assert int(np.sum(ind != outd)) == 2


def test_small_congestion_experiment(rng):
    r = congestion_trials(6, 16, 40, rng)
    assert r["bot_rate"] <= 0.05 and r["violations"] == 0
    low = congestion_trials(6, 1, 10, rng)
    assert low["bot_rate"] == 1.0


def test_coupling_and_dichotomy_run(rng):
    assert coupling_failure_rate(16, 4, 20, rng, d=float("inf")) == 0.0
    r = dichotomy_experiment(solve_canonical, 10, 20, rng)
    assert r["p_canonical"] == 1.0 and r["ok"]
