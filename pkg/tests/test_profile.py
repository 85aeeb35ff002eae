import json
import math

import pytest

from nashlab.profile import (
    ConstantsProfile,
    brouwer_min_distance,
    decode_radii,
    load_profile,
    save_profile,
)


def test_default_profile_is_valid():
    p = ConstantsProfile.default()
    assert p.violations() == []
    assert math.isclose(p.eta, 0.2)
    # eps_brouwer = 1e-6 is not well below delta^2 = 1e-8 at desk scale
    assert p.warnings()
    assert ConstantsProfile.tight().warnings() == []


def test_hierarchy_violation_is_reported():
    with pytest.raises(ValueError):
        ConstantsProfile(delta=1e-6).validate()
    with pytest.raises(ValueError):
        ConstantsProfile(lam_v=1e-4).validate()


def test_grid_snaps_and_clips():
    p = ConstantsProfile.default()
    assert p.grid(3.0) == 2.0 and p.grid(-5) == -1.0
    assert abs(p.grid(0.123456789) - 0.12345679) < 1e-15


def test_profile_roundtrip(tmp_path):
    p = ConstantsProfile.default().with_(lam_v=0.2)
    save_profile(p, tmp_path / "p.json")
    assert load_profile(tmp_path / "p.json") == p
    assert load_profile("default") == ConstantsProfile.default()
    (tmp_path / "bad.json").write_text(json.dumps({"nope": 1}))
    with pytest.raises(ValueError):
        load_profile(tmp_path / "bad.json")


def test_standard_radii():
    r = decode_radii(ConstantsProfile.default(), 9, 36)
    # rho = sqrt(9/36) = 1/2 caps 8 sqrt(h) and 25 sqrt(h)
    assert (r.inner, r.outer) == (0.125, 0.25)
    assert math.isclose(r.vertex_test, 0.125 + 15 / 17 * 0.125)


def test_min_distance_for_m36():
    assert brouwer_min_distance(ConstantsProfile.default(), 36) == 9
