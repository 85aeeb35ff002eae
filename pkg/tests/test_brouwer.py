import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from nashlab._util import nnorm
from nashlab.brouwer import (
    BrouwerField,
    analytic_fixed_points,
    check_lipschitz,
    coordinate_displacement,
    decode_fixed_point,
    find_fixed_point,
    format_point,
    min_nonadjacent_separation,
    parse_point,
    picture_weight,
    segment_distance,
)
from nashlab.code import ConcatenatedCode, RandomLinearCode
from nashlab.graphs import build_complete_host, enumerate_solutions, path_instance
from nashlab.profile import ConstantsProfile


@pytest.fixture(scope="module")
def code6():
    return ConcatenatedCode(RandomLinearCode(3, 18, min_distance=9, seed=0).fit(), 6)


def _seg_oracle(s1, t1, s2, t2):
    # grid search refined by a bounded optimizer
    g = np.linspace(0, 1, 41)
    P = s1 + g[:, None] * (t1 - s1)
    Q = s2 + g[:, None] * (t2 - s2)
    d = np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).mean(-1))
    i, j = np.unravel_index(d.argmin(), d.shape)
    fun = lambda st_: nnorm(s1 + st_[0] * (t1 - s1) - s2 - st_[1] * (t2 - s2))  # noqa: E731
    res = minimize(fun, [g[i], g[j]], bounds=[(0, 1), (0, 1)], method="L-BFGS-B")
    return min(res.fun, d.min())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 6))
def test_segment_distance_matches_oracle(seed, dim):
    r = np.random.default_rng(seed)
    s1, t1, s2, t2 = r.normal(size=(4, dim))
    assert abs(segment_distance(s1, t1, s2, t2) - _seg_oracle(s1, t1, s2, t2)) < 1e-6


def test_path_shape(setup6):
    inst, F, _ = setup6
    P = F.path_
    # first segment plus four per edge; no edge enters the start
    assert P.num_segments == 1 + 4 * 63
    assert np.allclose(P.S[0][108:], 2.0) and not P.T[0].any()
    assert [(v, side) for _, v, side, _ in P.endpoints()] == [(enumerate_solutions(inst)[0].vertex, "end")]


def test_segments_are_long_and_separated(code6):
    # a short path keeps the quadratic separation scan cheap
    inst = path_instance(build_complete_host(64), [[0, 9, 33, 4, 60]])
    F = BrouwerField(code6, ConstantsProfile.default()).fit(inst)
    eta = F.profile_.eta
    assert F.path_.L.min() >= 1.25 * eta - 1e-12
    assert min_nonadjacent_separation(F.path_) >= 1.25 * eta - 1e-12


def test_range_and_default_direction(setup6, rng):
    _, F, _ = setup6
    X = rng.uniform(-1, 2, size=(2000, F.dim))
    f = F.transform(X)
    assert f.min() >= -1 and f.max() <= 2
    # inside the picture and far from the path the flow is delta along block 4
    x = np.full(F.dim, 0.5)
    x[108:] = 0.0
    assert F.locate(x).classification == "far"
    g = F.raw_displacement(x)
    assert np.allclose(g[:108], 0) and np.allclose(g[108:], F.profile_.delta)


def test_on_segment_flow_follows_direction(setup6):
    _, F, _ = setup6
    P = F.path_
    for k in (5, 50, 120):
        x = P.S[k] + 0.5 * P.L[k] * P.E[k]
        assert np.allclose(F.raw_displacement(x), F.profile_.delta * P.E[k], atol=1e-15)


def test_batch_matches_pointwise(setup6, rng):
    _, F, _ = setup6
    P = F.path_
    k = rng.integers(0, P.num_segments, size=200)
    X = P.S[k] + (rng.random(200) * P.L[k])[:, None] * P.E[k]
    X += 0.02 * rng.standard_normal(X.shape)
    X = np.clip(np.concatenate([X, rng.uniform(-1, 2, (50, F.dim))]), -1, 2)
    G = F.raw_displacement(X)
    for t in range(0, len(X), 7):
        assert np.allclose(G[t], F.raw_displacement(X[t]), atol=1e-15)


def test_coordinate_displacement_matches_full(setup6, rng):
    _, F, _ = setup6
    P = F.path_
    for _ in range(30):
        k = int(rng.integers(0, P.num_segments))
        x = np.clip(P.S[k] + rng.random() * P.L[k] * P.E[k] + 0.01 * rng.standard_normal(F.dim), -1, 2)
        loc = F.locate(x)
        idx = np.arange(F.dim)
        assert np.allclose(coordinate_displacement(loc, idx, x, F.m_, F.profile_), F.raw_displacement(x), atol=1e-15)


def test_fixed_point_decodes_to_solution(setup6, fixed6):
    inst, F, _ = setup6
    assert F.residual(fixed6) <= 1e-8
    sol = decode_fixed_point(fixed6, F)
    assert [sol.vertex] == [s.vertex for s in enumerate_solutions(inst)]
    for x, v, _ in analytic_fixed_points(F):
        assert F.residual(x) < 1e-12


def test_decode_rejects_non_fixed_point(setup6):
    _, F, _ = setup6
    with pytest.raises(ValueError):
        decode_fixed_point(np.zeros(F.dim) + 0.3, F)


def test_isolated_start_and_cycles_have_one_endpoint(code6):
    inst = path_instance(build_complete_host(64), [[5, 6, 7, 5]])
    F = BrouwerField(code6, ConstantsProfile.default()).fit(inst)
    assert [(v, side) for _, v, side, _ in F.path_.endpoints()] == [(0, "end")]
    x0, v, _ = analytic_fixed_points(F)[0]
    x, res = find_fixed_point(F, x0)
    assert res <= 1e-8 and decode_fixed_point(x, F).vertex == 0


def test_lipschitz_small_sample(setup6, rng):
    _, F, _ = setup6
    r = check_lipschitz(F, 2000, rng, boundary=500)
    assert r["pairs"] == 2500 and r["L"] <= 0.2


def test_picture_weight():
    assert picture_weight(0.5) == 0.0 and picture_weight(2.0) == 1.0
    assert picture_weight(1.25) == 0.5


def test_point_file_roundtrip(fixed6):
    p = ConstantsProfile.default()
    back = parse_point(format_point(fixed6, p))
    assert np.abs(back - fixed6).max() <= p.eps_precision
    with pytest.raises(ValueError):
        parse_point("point v1 m=2\n0.0\n")
