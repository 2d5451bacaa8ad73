"""Polynomial, rational function and quadratic function field arithmetic."""

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qesurf.algebra import FunctionField, Poly, gcd, lcm, parse_poly
from qesurf.algebra.poly import divide_linear, linear_order
from qesurf.errors import DivisionByZero, ParseError, UnknownVariable

VARS = ("t", "x")


def polys(p, max_terms=5, max_exp=4):
    mono = st.tuples(st.integers(0, max_exp), st.integers(0, max_exp))
    return st.dictionaries(mono, st.integers(1, p - 1), max_size=max_terms).map(
        lambda d: _poly(p, d))


def _poly(p, d):
    terms = {}
    for (et, ex), c in d.items():
        m = tuple((v, e) for v, e in (("t", et), ("x", ex)) if e)
        terms[m] = c
    return Poly(p, terms)


def to_sympy(P):
    t, x = sympy.symbols("t x")
    expr = sum((c * t ** dict(m).get("t", 0) * x ** dict(m).get("x", 0)
                for m, c in P.terms.items()), sympy.Integer(0))
    return sympy.Poly(expr, t, x, modulus=P.p)


def from_sympy(S, p):
    terms = {}
    for (et, ex), c in S.terms():
        m = tuple((v, e) for v, e in (("t", et), ("x", ex)) if e)
        terms[m] = int(c) % p
    return Poly(p, terms)


def associates(a, b):
    return a.divides(b) and b.divides(a)


@pytest.fixture(params=[2, 3])
def p(request):
    return request.param


# -- Poly ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(polys(p), polys(p), polys(p))))
def test_ring_axioms(abc):
    a, b, c = abc
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly(a.p)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(polys(p), polys(p))))
def test_product_matches_sympy(ab):
    a, b = ab
    assert a * b == from_sympy(to_sympy(a) * to_sympy(b), a.p)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(polys(p), polys(p), polys(p, 3, 2))))
def test_gcd_matches_sympy(abc):
    a, b, c = abc
    a, b = a * c, b * c
    if a.is_zero() or b.is_zero():
        return
    ours = gcd(a, b)
    theirs = from_sympy(sympy.gcd(to_sympy(a), to_sympy(b)), a.p)
    assert associates(ours, theirs)
    assert ours.divides(a) and ours.divides(b)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: polys(p)))
def test_partial_matches_sympy(a):
    S = to_sympy(a)
    for v in VARS:
        assert a.partial(v) == from_sympy(S.diff(sympy.symbols(v)), a.p)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: polys(p)))
def test_pth_power_has_zero_derivative(a):
    ap = a ** a.p
    assert ap.partial("x").is_zero() and ap.partial("t").is_zero()


def test_lcm_and_exact_division():
    x, t = Poly.var(2, "x"), Poly.var(2, "t")
    a, b = x * (t + 1), x ** 2 * t
    L = lcm(a, b)
    assert L == x ** 2 * t * (t + 1)
    assert L.exact_div(a) == x * t


def test_linear_order():
    x, t = Poly.var(2, "x"), Poly.var(2, "t")
    f = (t + 1) ** 3 * x * (x + t)
    assert linear_order(f, "t", 1) == 3
    assert linear_order(f, "t", 0) == 0
    assert divide_linear(f, "t", 1, 3) == x * (x + t)


def test_parse_and_print_round_trip(p):
    text = "x^3*t + 2*x + 1" if p == 3 else "x^3*t + x + 1"
    P = parse_poly(text, p, ["x", "t"])
    assert parse_poly(str(P), p, ["x", "t"]) == P


def test_juxtaposition_multiplies():
    F = fields()[0]
    assert F.parse("x^2 t^4 + y t") == F.parse("x^2*t^4 + y*t")
    assert F.parse("(x + 1)(t + 1)") == F.parse("(x + 1)*(t + 1)")
    assert F.parse("x -t") == F.parse("x - t")


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_poly("x +* t", 2, ["x", "t"])
    with pytest.raises(UnknownVariable):
        parse_poly("q + 1", 2, ["x", "t"])


# -- FunctionField ------------------------------------------------------

def fields():
    return [FunctionField(2, ("x", "t"), "y", "x^3"),
            FunctionField(2, ("w", "t"), "z", "w^3"),
            FunctionField(3, ("x", "t"), "y", "x^3 + t")]


def elems(F):
    c1, c2 = F.coords
    texts = [f"{c1}", f"{c2} + 1", f"{F.gen}", f"{F.gen}*{c1} + {c2}^2",
             f"({F.gen} + {c1})/({c2} + 1)", f"1/({c1}*{F.gen} + 1)", f"{c1}^2*{c2}"]
    return [F.parse(s) for s in texts]


@pytest.mark.parametrize("F", fields(), ids=str)
def test_field_axioms(F):
    E = elems(F)
    for a in E:
        assert a * a.inverse() == F.one()
        for b in E:
            assert (a + b) - b == a
            assert (a * b) / b == a
            for c in E[:3]:
                assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("F", fields(), ids=str)
def test_generator_satisfies_relation(F):
    y = F.var(F.gen)
    assert y * y + y == F.from_poly(F.relation)


@pytest.mark.parametrize("F", fields(), ids=str)
def test_leibniz_rule(F):
    E = elems(F)
    for v in F.coords:
        for a in E:
            for b in E:
                assert (a * b).partial(v) == a.partial(v) * b + a * b.partial(v)
        for a in E[:4]:
            for b in E:
                assert (a / b).partial(v) == (a.partial(v) * b - a * b.partial(v)) / (b * b)


@pytest.mark.parametrize("F", fields(), ids=str)
def test_relation_is_differentiated_consistently(F):
    y = F.var(F.gen)
    for v in F.coords:
        assert (y * y + y - F.from_poly(F.relation)).partial(v).is_zero()


def test_pth_power_is_a_constant_for_partials():
    F = fields()[0]
    for a in elems(F):
        sq = a * a
        assert sq.partial("x").is_zero() and sq.partial("t").is_zero()


def test_implicit_derivative_oracle():
    # y^2 + y = x^3 in char 2: y' (2y + 1) = 3x^2, so y' = x^2
    F = fields()[0]
    assert F.var("y").partial("x") == F.parse("x^2")
    f = F.parse("(x + y)/(t + 1)")
    assert f.partial("x") == F.parse("(1 + x^2)/(t + 1)")
    assert f.partial("t") == F.parse("(x + y)/(t + 1)^2")


def test_norm_and_conjugate():
    F = fields()[0]
    y = F.var("y")
    assert y.conjugate() == y + 1
    assert (y * y.conjugate()) == F.parse("x^3")
    assert y.norm().num == parse_poly("x^3", 2, ["x", "t"])


def test_value_at():
    F = fields()[0]
    f = F.parse("(x + y)/(t + 1)")
    assert f.value_at({"x": 1, "y": 0, "t": 0}) == 1
    with pytest.raises(DivisionByZero):
        f.value_at({"x": 1, "y": 0, "t": 1})


def test_division_by_zero():
    F = fields()[0]
    with pytest.raises(DivisionByZero):
        F.one() / F.zero()


class Dual:
    """a + b eps with eps^2 = 0."""

    def __init__(self, a, b):
        self.a, self.b = a, b

    def __add__(self, o):
        return Dual(self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        return Dual(self.a - o.a, self.b - o.b)

    def __mul__(self, o):
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)


def dual_lift_of_gen(F, var):
    """gen(var + eps) to first order, solved from the relation without differentiating."""
    pt = {v: Dual(F.var(v), F.one() if v == var else F.zero()) for v in F.coords}

    def residual(d):
        Y = Dual(F.var(F.gen), d)
        r = Dual(F.zero(), F.zero())
        for m, c in F.relation.terms.items():
            term = Dual(F.const(c), F.zero())
            for v, e in m:
                for _ in range(e):
                    term = term * pt[v]
            r = r + term
        return (Y * Y + Y - r).b

    r0, r1 = residual(F.zero()), residual(F.one())
    return pt, Dual(F.var(F.gen), -r0 / (r1 - r0))


@pytest.mark.parametrize("F", fields(), ids=str)
def test_partials_match_dual_number_oracle(F):
    for var in F.coords:
        pt, Y = dual_lift_of_gen(F, var)
        c1, c2 = (pt[v] for v in F.coords)
        cases = [(F.var(F.gen) * F.var(F.coords[0]), Y * c1),
                 (F.var(F.gen) * F.var(F.gen) * F.var(F.coords[1]), Y * Y * c2),
                 (F.var(F.coords[0]) * F.var(F.coords[1]) + F.var(F.gen), c1 * c2 + Y)]
        for f, lifted in cases:
            assert f.partial(var) == lifted.b


def test_partial_of_x_times_y():
    F = fields()[0]
    assert (F.var("x") * F.var("y")).partial("x") == F.parse("y + x^3")
