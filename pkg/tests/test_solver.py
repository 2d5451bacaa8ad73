"""Kodaira-dimension criterion, multicanonical thresholds and the global search."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from qesurf.errors import CapsInsufficient, InvalidConfig, NotKodairaDimOne
from qesurf.solver import (Caps, Fiber, FibrationConfig, RuleSet, case_classify,
                           enumerate_configs, global_bound, holds, kodaira_positive, min_m)


def tame(p, n=1):
    return tuple(Fiber(p, p - 1, "tame") for _ in range(n))


def cfg(p, g, chi, t, fibers=()):
    return FibrationConfig(p, g, chi, t, tuple(fibers))


WITNESS = cfg(2, 1, 0, 0, tame(2))


# -- brute force oracle ---------------------------------------------------

def chi_floor(g):
    if g == 0:
        return 1
    if g == 1:
        return 0
    return -((g - 1) // 3)  # ceil((1 - g)/3)


def oracle(p, caps, iii2_exclusion=True):
    """Nested loops over (g, chi, t, #tame, #wild of each a)."""
    out = set()
    for g in range(caps.max_g + 1):
        for chi in range(chi_floor(g), caps.max_chi_t + 1):
            for t in range(0, caps.max_chi_t - chi + 1):
                for counts in product(range(caps.max_fibers + 1), repeat=p + 1):
                    n_tame, wild = counts[0], counts[1:]
                    if sum(counts) > caps.max_fibers or sum(wild) > t:
                        continue
                    value = Fraction(2 * g - 2 + chi + t) + n_tame * Fraction(p - 1, p)
                    value += sum(k * Fraction(a, p) for a, k in enumerate(wild))
                    if value <= 0:
                        continue
                    if (iii2_exclusion and p == 2 and g == 0 and chi + t == 2
                            and n_tame == 0 and sum(wild) == 1):
                        continue
                    fibers = [("tame", p - 1)] * n_tame
                    for a, k in enumerate(wild):
                        fibers += [("wild", a)] * k
                    out.add((g, chi, t, tuple(sorted(fibers))))
    return out


def as_key(c):
    return (c.g, c.chi, c.t, tuple(sorted((f.kind, f.a) for f in c.fibers)))


@pytest.mark.parametrize("p,caps", [(2, Caps(1, 1, 1)), (2, Caps(2, 3, 3)), (3, Caps(1, 2, 2)),
                                    (2, Caps(0, 0, 0)), (3, Caps(2, 2, 3))])
@pytest.mark.parametrize("exclusion", [True, False])
def test_enumeration_matches_oracle(p, caps, exclusion):
    got = enumerate_configs(p, RuleSet(exclusion), caps)
    keys = [as_key(c) for c in got]
    assert len(keys) == len(set(keys))
    assert set(keys) == oracle(p, caps, exclusion)


def test_small_caps_contain_witness():
    got = enumerate_configs(2, RuleSet(), Caps(1, 1, 1))
    assert WITNESS in got


def test_zero_caps_are_empty():
    assert enumerate_configs(2, RuleSet(), Caps(0, 0, 0)) == []


def test_iii2_exclusion_removes_family():
    lone_wild = [c for c in enumerate_configs(2, RuleSet(False), Caps(0, 2, 1))
                 if c.chi_t == 2 and c.n_wild == 1 and c.n_tame == 0]
    assert lone_wild
    kept = enumerate_configs(2, RuleSet(True), Caps(0, 2, 1))
    assert not any(c in kept for c in lone_wild)


def test_enumeration_is_deterministic():
    a = enumerate_configs(3, RuleSet(), Caps(2, 3, 3))
    b = enumerate_configs(3, RuleSet(), Caps(2, 3, 3))
    assert a == b


# -- criteria --------------------------------------------------------------

def test_kodaira_examples():
    assert kodaira_positive(WITNESS)
    assert not kodaira_positive(cfg(2, 1, 0, 0))
    assert kodaira_positive(cfg(2, 0, 1, 0, tame(2, 3)))


def test_min_m_examples():
    assert min_m(WITNESS) == 6
    assert not holds(WITNESS, 5)
    assert min_m(cfg(2, 0, 1, 0, tame(2, 3))) == 4
    assert min_m(cfg(3, 1, 0, 0, tame(3))) == 5
    assert min_m(cfg(2, 0, 1, 2)) == 1
    with pytest.raises(NotKodairaDimOne):
        min_m(cfg(2, 1, 0, 0))


def test_case_labels():
    assert case_classify(WITNESS) == "II-2"
    assert case_classify(cfg(2, 3, 0, 0)) == "I"
    assert case_classify(cfg(2, 0, 1, 1, (Fiber(2, 0, "wild"),) + tame(2))) == "III-2"
    assert case_classify(cfg(2, 0, 1, 2)) == "III-1"
    assert case_classify(cfg(2, 0, 1, 0, tame(2, 3))) == "III-3"
    assert case_classify(cfg(2, 1, 0, 1)) == "II-1"


def test_invalid_configs():
    with pytest.raises(InvalidConfig):
        cfg(2, 1, 0, 0, (Fiber(2, 2, "wild"),))
    with pytest.raises(InvalidConfig):
        cfg(2, 1, 0, 0, (Fiber(3, 2, "tame"),))
    with pytest.raises(InvalidConfig):
        cfg(2, 1, 0, 0, (Fiber(2, 0, "tame"),))
    with pytest.raises(InvalidConfig):
        cfg(2, 1, 0, 0, (Fiber(2, 0, "wild"),))
    with pytest.raises(InvalidConfig):
        cfg(2, 0, 0, 3)
    with pytest.raises(InvalidConfig):
        cfg(5, 1, 0, 0)
    with pytest.raises(InvalidConfig):
        FibrationConfig.from_json({"p": 2, "g": 1})


POOL = enumerate_configs(2, RuleSet(False), Caps(3, 5, 5)) + \
    enumerate_configs(3, RuleSet(), Caps(3, 4, 4))


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(POOL))
def test_min_m_definition(c):
    m = min_m(c)
    assert holds(c, m)
    assert m == 1 or not holds(c, m - 1)
    # the threshold is final: every larger m works
    for k in range(m, m + 12):
        assert holds(c, k)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(POOL))
def test_min_m_monotone(c):
    m = min_m(c)
    more = cfg(c.p, c.g, c.chi, c.t + 1, c.fibers)
    assert min_m(more) <= m
    extra = cfg(c.p, c.g, c.chi, c.t, c.fibers + tame(c.p))
    assert min_m(extra) <= m


# -- global search ---------------------------------------------------------

def test_global_bound_p2():
    r = global_bound(2)
    assert r.global_M == 6
    assert r.witness == WITNESS
    assert {k: v.max_min_m for k, v in r.per_case.items()} == {
        "I": 3, "II-1": 3, "II-2": 6, "III-1": 1, "III-2": 2, "III-3": 4}
    assert r.certified


def test_global_bound_p3():
    r = global_bound(3)
    assert r.global_M == 5
    # II-2 and III-3 both reach 5; ties go to the lexicographically smallest config
    assert r.per_case["II-2"].max_min_m == r.per_case["III-3"].max_min_m == 5
    assert r.witness == cfg(3, 0, 1, 0, tame(3, 2))


def test_without_exclusion_bound_is_unchanged():
    assert global_bound(2, RuleSet(False)).global_M == 6


def test_removing_witness_family_drops_bound():
    rest = [c for c in enumerate_configs(2) if not (c.g == 1 and c.chi_t == 0)]
    assert max(min_m(c) for c in rest) <= 4


def test_reports_identical_across_threads():
    one = global_bound(2, threads=1).dumps()
    many = global_bound(2, threads=4).dumps()
    assert one == many
    assert global_bound(2, threads=3).table() == global_bound(2, threads=1).table()


def test_caps_insufficient_carries_report():
    with pytest.raises(CapsInsufficient) as info:
        global_bound(2, caps=Caps(1, 1, 1))
    report = info.value.report
    assert not report.certified
    assert report.global_M == 6


def test_caps_parse():
    assert Caps.parse("g=1,chit=2,fibers=3") == Caps(1, 2, 3)
    assert Caps.parse("g=2") == Caps(2, 5, 6)
    with pytest.raises(ValueError):
        Caps.parse("h=2")


def test_config_json_round_trip():
    for c in POOL[:50]:
        assert FibrationConfig.from_json(c.to_json()) == c
