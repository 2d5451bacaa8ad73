"""Charts, transitions, blow-ups and vanishing orders on the E x P^1 atlas."""

import json

import pytest

from qesurf.algebra import substitute
from qesurf.atlas import Atlas, SurfacePoint, blow_up
from qesurf.errors import ChartMismatch, CurveNotVisible

from conftest import P, Q1, Q2, R, load_base_atlas


def test_all_transitions_round_trip(base_atlas):
    names = list(base_atlas.charts)
    for a in names:
        for b in names:
            tr = base_atlas.transition(a, b)
            assert tr.round_trip_ok(base_atlas.chart(a).field, base_atlas.chart(b).field)


def test_transition_substitutions(base_atlas):
    U = base_atlas.chart("U0xV0")
    W = base_atlas.chart("UinfxV0")
    to_w = {"x": W.parse("w/z"), "y": W.parse("1/z"), "t": W.parse("t")}
    assert substitute(U.parse("x"), to_w) == W.parse("w/z")
    S = base_atlas.chart("U0xVinf")
    assert substitute(U.parse("t"), {"x": S.parse("x"), "y": S.parse("y"),
                                     "t": S.parse("1/s")}) == S.parse("1/s")
    f = U.parse("(x + y)/(t + 1)")
    assert substitute(f, U.field.identity_map()) == f


def test_transition_maps_relation(base_atlas):
    # the defining relation reduces to zero inside the field
    U = base_atlas.chart("U0xV0")
    rel = U.parse("y^2 + y + x^3")
    assert rel.is_zero()
    tr = base_atlas.transition("U0xV0", "UinfxV0")
    assert tr.push(U.parse("y")) == base_atlas.chart("UinfxV0").parse("1/z")


def test_identified_points(base_atlas):
    assert base_atlas.same_point(Q1, Q2)
    assert not base_atlas.same_point(R, Q2)
    assert base_atlas.locate(P, "UinfxV0") is None


def test_points_on_named_curves(base_atlas):
    assert base_atlas.on_curve(P, "F_0")
    assert base_atlas.on_curve(Q1, "F_inf")
    assert base_atlas.on_curve(R, "C_inf") and base_atlas.on_curve(R, "F_inf")
    assert not base_atlas.on_curve(Q1, "C_inf")


def test_blow_up_chart_shape(base_atlas):
    atlas = blow_up(base_atlas, P, "G1")
    a = atlas.chart("G1_a")
    assert str(a.parent_map["x"]) == str(a.parse("uG1"))
    assert a.parent_map["t"] == a.parse("uG1*vG1")
    loc = atlas.curve("G1").loci["G1_a"]
    assert (loc.coord, loc.value) == ("uG1", 0)
    assert atlas.history[-1].incidences == {"C_inf": 0, "F_0": 1, "F_inf": 0}


def test_blow_up_off_named_curves_keeps_old_loci(base_atlas):
    center = SurfacePoint.make("U0xV0", {"x": 0, "y": 1, "t": 0})
    atlas = blow_up(base_atlas, center, "Z")
    assert not any(atlas.history[-1].incidences.values())
    for name, cv in base_atlas.curves.items():
        for chart, loc in cv.loci.items():
            assert atlas.curve(name).loci[chart] == loc


def test_proper_transform_of_section_meets_exceptional_once(base_atlas):
    atlas = blow_up(base_atlas, R, "E2")
    E2 = atlas.curve("E2")
    for chart in E2.loci:
        s = atlas.transition("UinfxVinf", chart).push(atlas.chart("UinfxVinf").parse("s"))
        order = atlas.vanishing_order(s, E2, chart)
        # s is the exceptional equation times the proper transform; C_inf is smooth at R
        assert order == 1


def test_vanishing_orders(base_atlas):
    V = base_atlas.chart("UinfxVinf")
    assert base_atlas.vanishing_order(V.parse("1/s^2"), "C_inf", "UinfxVinf") == -2
    assert base_atlas.vanishing_order(V.parse("1/(w^4*s^2)"), "F_inf", "UinfxVinf") == -4
    assert base_atlas.vanishing_order(V.field.one(), "F_inf", "UinfxVinf") == 0
    assert base_atlas.vanishing_order(V.parse("w"), "generic_fiber", "UinfxVinf") == 0


def test_split_branch_valuation(base_atlas):
    U = base_atlas.chart("U0xV0")
    # along x = 0 the cover splits; y vanishes on the branch y = 0 to order 3 (y = x^3 + ...)
    assert base_atlas.vanishing_order(U.parse("y"), "F_0", "U0xV0") == 3
    assert base_atlas.vanishing_order(U.parse("y + 1"), "F_0", "U0xV0") == 0


def test_curve_not_visible(base_atlas):
    U = base_atlas.chart("U0xV0")
    with pytest.raises(CurveNotVisible):
        base_atlas.vanishing_order(U.parse("x"), "C_inf", "U0xV0")
    with pytest.raises(ChartMismatch):
        base_atlas.chart("nowhere")


def test_json_round_trip(base_atlas, resolved):
    for atlas in (base_atlas, resolved):
        again = Atlas.loads(atlas.dumps())
        assert json.loads(again.dumps()) == json.loads(atlas.dumps())
        assert list(again.charts) == list(atlas.charts)
        assert len(again.all_points()) == len(atlas.all_points())


def test_blown_up_transitions_round_trip(resolved):
    names = list(resolved.charts)
    for a in names:
        for b in names:
            if a < b:
                tr = resolved.transition(a, b)
                assert tr.round_trip_ok(resolved.chart(a).field, resolved.chart(b).field)


def test_base_atlas_loads_fresh():
    atlas = load_base_atlas()
    atlas.validate()
    assert set(atlas.curves) == {"C_inf", "F_0", "F_inf", "generic_fiber"}
