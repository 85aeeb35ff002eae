import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nashlab.code import (
    ConcatenatedCode,
    RandomLinearCode,
    format_code,
    minimum_distance,
    parse_code,
    valid_m,
)


def _brute_distance(G):
    # oracle: pairwise Hamming distance over all distinct message pairs
    k = G.shape[0]
    words = [tuple(np.array(msg) @ G % 2) for msg in itertools.product((0, 1), repeat=k)]
    return min(sum(a != b for a, b in zip(u, v)) for u, v in itertools.combinations(words, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(4, 10), st.integers(0, 2**31))
def test_minimum_distance_matches_pairwise_oracle(k, m, seed):
    G = np.random.default_rng(seed).integers(0, 2, size=(k, m))
    d = minimum_distance(G)
    if d == 0:
        return  # rank deficient: some pair of messages collides
    assert d == _brute_distance(G)


def test_standard_code_is_frozen():
    c = RandomLinearCode(3, 18, min_distance=9, seed=0).fit()
    assert c.distance_ == 9 and c.certify()
    assert c.distance_ == _brute_distance(c.generator_)
    assert c.transform([[0, 0, 0]]).sum() == 0


def test_code_is_linear():
    c = RandomLinearCode(4, 12, seed=3).fit()
    for a, b in itertools.combinations(range(16), 2):
        assert np.array_equal(c.codewords_[a] ^ c.codewords_[b], c.codewords_[a ^ b])


def test_predict_recovers_messages():
    c = RandomLinearCode(3, 18, min_distance=9, seed=0).fit()
    noisy = c.codewords_.astype(float) + 0.2
    assert np.array_equal(c.predict(noisy), np.arange(8))


def test_code_file_roundtrip_and_certificate():
    c = RandomLinearCode(3, 18, min_distance=9, seed=0).fit()
    back = parse_code(format_code(c))
    assert np.array_equal(back.generator_, c.generator_)
    tampered = format_code(c).replace("dist=9", "dist=10")
    with pytest.raises(ValueError):
        parse_code(tampered)


def test_concatenated_code_halves():
    cc = ConcatenatedCode(RandomLinearCode(3, 18, min_distance=9, seed=0).fit(), 6)
    assert cc.m == 36 and cc.distance == 9
    for v in (0, 5, 63):
        a, b = cc.halves(v)
        assert cc.join(a, b) == v
        w = cc.encode_full(v)
        assert np.array_equal(w[:18], cc.half.codewords_[a])
        assert np.array_equal(w[18:], cc.half.codewords_[b])
    assert cc.full_min_distance() == 9


def test_nearest_codeword_statuses():
    cc = ConcatenatedCode(RandomLinearCode(3, 18, min_distance=9, seed=0).fit(), 6)
    w = cc.encode_full(17).astype(float)
    r = cc.nearest_codeword(w, 0.125, 0.25)
    assert (r.status, r.vertex, r.distance) == ("vertex", 17, 0.0)
    assert cc.nearest_codeword(np.full(36, 0.5), 0.125, 0.25).status == "bottom"
    half = cc.nearest_codeword(w[:18], 0.125, 0.25)
    assert half.vertex == cc.halves(17)[0]


def test_valid_m_rule():
    assert valid_m(6, 2) == 36
    assert valid_m(6, 3) == 36
    assert valid_m(8, 4) == 64
    assert valid_m(16, 2) == 64
    for n in range(1, 30):
        for ell in (1, 2, 3, 4):
            m = valid_m(n, ell)
            r = int(np.sqrt(m))
            assert r * r == m and r % ell == 0 and m % 2 == 0 and m >= 4 * n
