import numpy as np
import pytest

from nashlab.acceptance import standard_setup
from nashlab.brouwer import analytic_fixed_points, find_fixed_point
from nashlab.game import build_game, plant_equilibrium
from nashlab._util import substream


@pytest.fixture(scope="session")
def setup6():
    """Critical instance on 64 vertices, its field (m=36) and families (l=2, k=4)."""
    return standard_setup(0)


@pytest.fixture(scope="session")
def fixed6(setup6):
    _, F, _ = setup6
    x0 = next(x for x, _, side in analytic_fixed_points(F) if side == "end")
    return find_fixed_point(F, x0)[0]


@pytest.fixture(scope="session")
def planted6(setup6, fixed6):
    inst, F, fam = setup6
    G = build_game(inst, F.code, fam, F.profile_, substream(0, "game"))
    A, B, sol = plant_equilibrium(G, F, fixed6)
    return G, A, B, sol


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
