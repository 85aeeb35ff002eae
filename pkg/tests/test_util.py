import math

import numpy as np
from hypothesis import given, strategies as st

from nashlab._util import bits_msb, ceil_log2, nnorm, parse_header, sha256_file, substream


def test_substream_is_keyed_by_path():
    a = substream(7, "x", 1).random(4)
    assert np.array_equal(a, substream(7, "x", 1).random(4))
    assert not np.array_equal(a, substream(7, "x", 2).random(4))
    assert not np.array_equal(a, substream(8, "x", 1).random(4))


def test_nnorm_is_root_mean_square():
    assert nnorm(np.ones(9)) == 1.0
    assert math.isclose(nnorm([3.0, 4.0]), math.sqrt(12.5))
    assert np.allclose(nnorm(np.array([[1.0, 1.0], [2.0, 0.0]]), axis=1), [1.0, math.sqrt(2)])


@given(st.integers(0, 10**9))
def test_ceil_log2_matches_float_log(x):
    b = ceil_log2(x)
    assert 2**b >= x
    assert b == 0 or 2 ** (b - 1) < x


@given(st.integers(0, 2**20), st.integers(21, 30))
def test_bits_msb_roundtrip(v, w):
    s = bits_msb(v, w)
    assert len(s) == w and int(s, 2) == v


def test_parse_header_rejects_wrong_magic():
    assert parse_header("code v1 a=1 b=x", "code") == {"a": "1", "b": "x"}
    for bad in ("point v1 a=1", "code v2", "code v1 junk"):
        try:
            parse_header(bad, "code")
        except ValueError:
            continue
        raise AssertionError(bad)


def test_sha256_file(tmp_path):
    p = tmp_path / "f"
    p.write_bytes(b"abc")
    assert sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
