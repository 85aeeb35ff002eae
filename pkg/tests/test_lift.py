import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.embed import sample_critical
from nashlab.graphs import (
    build_complete_host,
    build_double_butterfly,
    choose_d,
    empty_instance,
    multiply_edges,
    replacement_product,
    replacement_product_structure,
)
from nashlab.lift import (
    compose,
    decode_composed,
    direct_neighbours,
    format_composed,
    ip2,
    max_transcript_cost,
    parse_composed,
    pi_v_output,
    query_bits,
    random_composed,
    run_pi_v,
)


@pytest.fixture(scope="module")
def hprime():
    return replacement_product(multiply_edges(build_double_butterfly(2), choose_d(2)))


def test_ip2_table():
    g = ip2()
    # a, b in {0,1}^2 as integers; <a, b> mod 2
    assert g.table.tolist() == [[0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]]
    assert g.symbol_bits == 2
    assert len(g.preimages(0)) == 10 and len(g.preimages(1)) == 6


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31))
def test_compose_roundtrip(N, seed):
    r = np.random.default_rng(seed)
    x = sample_critical(N, r)
    ci = compose(x, r)
    y = decode_composed(ci)
    assert np.array_equal(query_bits(y), query_bits(x))


def test_protocol_matches_direct_decoding(hprime, rng):
    hosts = [hprime, build_complete_host(16), build_complete_host(13)]
    for t in range(600):
        host = hosts[t % 3]
        ci = random_composed(host, rng)
        inst = decode_composed(ci)
        v = int(rng.integers(0, host.num_vertices))
        r = run_pi_v(v, ci)
        assert (r.succ, r.pred) == direct_neighbours(inst, v)
        assert pi_v_output(host, v, r.transcript) == (r.succ, r.pred)
        assert r.transcript.cost <= max_transcript_cost(host)


def test_cost_constants(hprime):
    # 3 incident edges of 2-bit symbols, then two 2-bit local indices
    assert max_transcript_cost(hprime) == 3 * 2 + 2 * 2
    for n in (6, 8, 10):
        P = replacement_product_structure(multiply_edges(build_double_butterfly(n), choose_d(n)))
        assert max_transcript_cost(P) == 10
    # complete host: 4w symbols twice 2 bits, plus 4w announced bits
    assert max_transcript_cost(build_complete_host(64)) == 12 * 7


def test_complete_host_worst_case_is_reached(rng):
    host = build_complete_host(64)
    x = sample_critical(64, rng)
    ci = compose(x, rng)
    v = next(v for v in range(64) if x.successor(v) is not None and x.predecessor(v) is not None)
    assert run_pi_v(v, ci).transcript.cost == 84


def test_alone_vertex_reports_itself(hprime):
    inst = empty_instance(hprime)
    ci = compose(inst, np.random.default_rng(0))
    r = run_pi_v(3, ci)
    assert (r.succ, r.pred) == (3, 3)


def test_composed_file_roundtrip(rng):
    ci = compose(sample_critical(16, rng), rng)
    back = parse_composed(format_composed(ci))
    assert np.array_equal(back.alice, ci.alice) and np.array_equal(back.bob, ci.bob)
    with pytest.raises(ValueError):
        parse_composed(format_composed(ci).replace("gadget=ip2", "gadget=xor"))
