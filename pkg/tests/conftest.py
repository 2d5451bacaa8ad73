from importlib import resources

import pytest

from qesurf.atlas import Atlas, SurfacePoint, blow_up
from qesurf.derivation import Derivation, isolated_singular_points

D1 = "y"
D2 = "x^2 + x^2*t + t^4"

P = SurfacePoint.make("U0xV0", {"x": 0, "y": 0, "t": 0})
Q1 = SurfacePoint.make("UinfxV0", {"w": 0, "z": 0, "t": 1})
Q2 = SurfacePoint.make("UinfxVinf", {"w": 0, "z": 0, "s": 1})
R = SurfacePoint.make("UinfxVinf", {"w": 0, "z": 0, "s": 0})


def load_base_atlas():
    return Atlas.loads(resources.files("qesurf.data").joinpath("base_atlas.json").read_text())


def make_D(atlas):
    chart = atlas.chart("U0xV0")
    return Derivation.parse("U0xV0", chart.field, D1, D2)


@pytest.fixture(scope="session")
def base_atlas():
    return load_base_atlas()


@pytest.fixture(scope="session")
def D(base_atlas):
    return make_D(base_atlas)


@pytest.fixture(scope="session")
def resolved(base_atlas, D):
    """Atlas after blowing up P, the singular point on G1, Q and R."""
    atlas = blow_up(base_atlas, P, "G1")
    on_g1 = [s.point for s in isolated_singular_points(D, atlas) if atlas.on_curve(s.point, "G1")]
    atlas = blow_up(atlas, on_g1[0], "G2")
    atlas = blow_up(atlas, Q1, "E1")
    atlas = blow_up(atlas, R, "E2")
    return atlas
