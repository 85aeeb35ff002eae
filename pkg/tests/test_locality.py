import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.locality import (
    LocalEvaluator,
    agreement_experiment,
    block_coords,
    build_subset_families,
    concentration_check,
    doubly_local_eval,
    family_invariants,
    format_family,
    grid_cells,
    hash_buckets,
    parse_family,
    point_vertex_info,
    smallest_prime_at_least,
    validate_vertex_pair,
    vertex_info_of,
)


def _is_prime(p):
    return p >= 2 and all(p % q for q in range(2, p))


@given(st.integers(0, 3000))
def test_smallest_prime(x):
    p = smallest_prime_at_least(x)
    assert _is_prime(p) and p >= x
    assert not any(_is_prime(q) for q in range(max(x, 0), p))


def test_checkerboard_layout():
    r, c = grid_cells(16)
    assert len(set(zip(r.tolist(), c.tolist()))) == 16
    assert ((r[:8] + c[:8]) % 2 == 0).all() and ((r[8:] + c[8:]) % 2 == 1).all()
    with pytest.raises(ValueError):
        grid_cells(9)


def test_hash_buckets_are_balanced():
    t = hash_buckets(12, 3, 2, np.random.default_rng(0))
    assert t.shape == (9, 12)
    for row in t:
        assert np.bincount(row, minlength=3).tolist() == [4, 4, 4]


@pytest.mark.parametrize("m,ell,k", [(16, 2, 2), (36, 2, 4), (36, 3, 2), (64, 4, 2), (144, 6, 2)])
def test_family_sets_match_set_oracle(m, ell, k):
    fam = build_subset_families(m, ell, k, 0)
    sig = [set(s.tolist()) for s in fam.sigma]
    tau = [set(t.tolist()) for t in fam.tau]
    assert fam.size == ell ** (k + 1)
    assert all(len(s) == m // ell for s in sig + tau)
    assert all(len(s & t) == m // ell**2 for s, t in itertools.product(sig, tau))
    # within one hash outcome the ell buckets partition the coordinates
    for w in range(0, fam.size, ell):
        assert set().union(*sig[w : w + ell]) == set(range(m))
    inv = family_invariants(fam)
    assert inv["ok"] and inv["intersections"] == [m // ell**2]


def test_family_file_roundtrip():
    fam = build_subset_families(36, 2, 4, 3)
    back = parse_family(format_family(fam))
    assert np.array_equal(back.sigma, fam.sigma) and np.array_equal(back.tau, fam.tau)
    assert format_family(build_subset_families(36, 2, 4, 3)) == format_family(fam)


def test_family_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_subset_families(50, 2, 2, 0)
    with pytest.raises(ValueError):
        build_subset_families(36, 4, 2, 0)


def test_concentration_absolute_threshold():
    fam = build_subset_families(1024, 4, 6, 0)
    r = concentration_check(fam, 2000, np.random.default_rng(0), delta=0.1, absolute=True)
    assert r["frequency"] <= 0.02
    # relative reading (|mean - mu| > 0.1 mu) is looser: a few percent at this size
    r = concentration_check(fam, 2000, np.random.default_rng(0), delta=0.1)
    assert r["frequency"] <= 0.1 and r["ok"]
    fam = build_subset_families(144, 4, 3, 0)
    x = np.zeros(144)
    x[:72] = 1
    r = concentration_check(fam, 500, np.random.default_rng(1), x=x, delta=0.1)
    assert r["max_deviation"] == 0.0


def test_block_coords():
    assert block_coords(np.array([1, 3]), 5).tolist() == [1, 3, 6, 8, 11, 13, 16, 18]


def test_vertex_pair_validation():
    validate_vertex_pair(((1, 2, 0), (2, 3, 1)))
    validate_vertex_pair(((1, 2, 0), (1, 2, 0)))
    validate_vertex_pair((None, (2, 3, 1)))
    with pytest.raises(ValueError):
        validate_vertex_pair(((1, 2, 0), (1, 4, 0)))
    with pytest.raises(ValueError):
        validate_vertex_pair(((1, 5, 0), (2, 3, 9)))
    with pytest.raises(ValueError):
        validate_vertex_pair(((1, 2, 0), (2, 3, 7)))


def test_local_eval_on_path_points(setup6, rng):
    inst, F, fam = setup6
    P = F.path_
    ev = LocalEvaluator(F.code, F.profile_, inst.start)
    for _ in range(40):
        k = int(rng.integers(1, P.num_segments))
        x = np.clip(P.S[k] + rng.random() * P.L[k] * P.E[k] + 0.005 * rng.standard_normal(F.dim), -1, 2)
        vi = point_vertex_info(x, F)
        T = fam.members("sigma", int(rng.integers(0, fam.size)))
        cols = block_coords(T, F.m_)
        i = int(rng.integers(0, F.dim))
        y = ev(i, x[i], vi, x[cols], T)
        assert y == doubly_local_eval(i, x[i], vi, x[cols], T, F.code, F.profile_, inst.start)
        assert abs(y - F.transform(x)[i]) <= 10 * np.sqrt(F.profile_.eps_brouwer)


def test_vertex_info_of(setup6):
    inst, _, _ = setup6
    v = inst.start
    s = inst.successor(v)
    assert vertex_info_of(inst, v) == (v, s, v)
    assert vertex_info_of(inst, None) is None


def test_agreement_small(setup6):
    _, F, fam = setup6
    r = agreement_experiment(F, fam, 400, np.random.default_rng(2))
    assert r["agree_freq"] >= 0.95 and r["perturb_freq"] >= 0.95
