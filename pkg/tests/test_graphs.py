import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.graphs import (
    build_complete_host,
    build_double_butterfly,
    build_gadget_k,
    check_eol_solution,
    choose_d,
    empty_instance,
    enumerate_solutions,
    format_instance,
    multiply_edges,
    parse_instance,
    path_instance,
    replacement_product,
    replacement_product_structure,
)


def _brute_butterfly_edges(n):
    # independent oracle: (z, layer) -> (z, layer+1) and (z with step bit flipped, layer+1)
    N, L = 1 << n, 2 * n
    out = set()
    for layer in range(L):
        bit = 1 << (n - 1 - layer % n)
        for z in range(N):
            out.add(((z, layer), (z, (layer + 1) % L)))
            out.add(((z, layer), (z ^ bit, (layer + 1) % L)))
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_double_butterfly_matches_definition(n):
    H = build_double_butterfly(n)
    N = 1 << n
    assert H.num_vertices == 2 * n * N
    got = {((int(t) % N, int(t) // N), (int(h) % N, int(h) // N)) for t, h in zip(H.tails, H.heads)}
    assert got == _brute_butterfly_edges(n)
    assert (H.out_degrees() == 2).all() and (H.in_degrees() == 2).all()
    assert len(set(H.labels.tolist())) == H.num_vertices


def test_choose_d_values():
    # 2 * 2**n * n vertices, ceil(log2) rounded up to a power of two
    assert [choose_d(n) for n in (2, 6, 10, 12)] == [4, 16, 16, 32]


def test_multiply_edges_slots():
    H = build_double_butterfly(2)
    Hd = multiply_edges(H, 3)
    assert Hd.num_edges == 3 * H.num_edges
    assert np.array_equal(Hd.tails[::3], H.tails)
    assert Hd.slots[:6].tolist() == [1, 2, 3, 1, 2, 3]


def test_replacement_product_has_degree_two():
    Hd = multiply_edges(build_double_butterfly(2), choose_d(2))
    P = replacement_product_structure(Hd)
    assert P.check_regular()
    Hp = replacement_product(Hd)
    assert Hp.num_vertices == P.num_vertices
    assert max(Hp.out_degrees().max(), Hp.in_degrees().max()) <= 2
    assert P.degree_profile()[2] == int((Hp.out_degrees() + Hp.in_degrees()).max())


def test_gadget_k_layers():
    K = build_gadget_k(4)
    assert K.num_layers == 2 * K.delta + 1
    assert len(K.in_root) == len(K.out_root) == 8


def test_complete_host_null_label():
    H = build_complete_host(64)
    assert H.label_bits == 7 and H.null == 127
    H = build_complete_host(63)
    assert H.label_bits == 6 and H.null == 63


def _brute_solutions(succ, pred, N, null, start):
    # oracle straight from the degree definition
    out = []
    for v in range(N):
        outd = int(succ[v] != null and succ[v] < N and pred[succ[v]] == v)
        ind = int(pred[v] != null and pred[v] < N and succ[pred[v]] == v)
        if v == start:
            if ind != 0 or outd != 1:
                out.append(v)
        elif not (ind == 1 and outd == 1):
            out.append(v)
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.randoms(use_true_random=False))
def test_solutions_match_degree_oracle(N, r):
    H = build_complete_host(N)
    inst = empty_instance(H)
    for v in range(N):
        if r.random() < 0.7:
            inst.succ[v] = r.randrange(N + 1) if N + 1 < H.null else r.randrange(N)
        if r.random() < 0.7:
            inst.pred[v] = r.randrange(N)
    got = [s.vertex for s in enumerate_solutions(inst)]
    assert got == _brute_solutions(inst.succ, inst.pred, N, H.null, 0)
    for v in range(N):
        assert (check_eol_solution(inst, v) is not None) == (v in got)


def test_path_instance_single_solution():
    H = build_complete_host(8)
    inst = path_instance(H, [[0, 5, 2, 7]])
    sols = enumerate_solutions(inst)
    # isolated vertices are sink-sources; the path end is a sink
    assert 7 in [s.vertex for s in sols]
    assert 0 not in [s.vertex for s in sols]
    crit = path_instance(H, [[0, 3, 1, 2, 4, 5, 6, 7]])
    assert [(s.vertex, s.reason) for s in enumerate_solutions(crit)] == [(7, "sink")]


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(1, 10))))
def test_instance_text_roundtrip(perm):
    H = build_complete_host(10)
    inst = path_instance(H, [[0] + list(perm)])
    back = parse_instance(format_instance(inst))
    assert np.array_equal(back.succ, inst.succ) and np.array_equal(back.pred, inst.pred)


def test_indicator_instance_roundtrip():
    Hd = multiply_edges(build_double_butterfly(2), 2)
    inst = empty_instance(Hd)
    inst.indicators[[0, 5, 9]] = 1
    back = parse_instance(format_instance(inst))
    assert np.array_equal(back.indicators, inst.indicators)
    assert sorted(map(tuple, back.edges().tolist())) == sorted(map(tuple, inst.edges().tolist()))


def test_label_strings_are_fixed_width():
    H = build_double_butterfly(3)
    for v in itertools.islice(range(H.num_vertices), 10):
        assert len(H.label_str(v)) == H.label_bits
