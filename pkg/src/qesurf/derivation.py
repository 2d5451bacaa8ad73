"""Rational vector fields on charts.

A derivation is stored on one chart by its values on the two chart
coordinates; its value on the generator follows from the relation.  All
local questions (integrality of a curve, singular and cuspidal points) use
saturation along the coordinate lines through a point, so they do not depend
on a chart-wide coprime factorization, which need not exist.
"""

from dataclasses import dataclass

from .algebra import FuncElem, Poly, gcd
from .algebra.poly import divide_linear, lcm, linear_order
from .atlas import SurfacePoint
from .errors import (ChartMismatch, CurveIsIntegral, CurveNotVisible,
                     InconsistentOrders, IsolatedSingularityPresent, ZeroFunction)
from .local import LocalPoint, line_roots, line_valuation


@dataclass(frozen=True)
class Derivation:
    chart: str
    dx: FuncElem
    dt: FuncElem

    @classmethod
    def parse(cls, chart, field, dx, dt):
        return cls(chart, field.parse(dx), field.parse(dt))

    @property
    def field(self):
        return self.dx.field

    def coefficient(self, coord):
        c1, c2 = self.field.coords
        if coord == c1:
            return self.dx
        if coord == c2:
            return self.dt
        raise ChartMismatch(f"{coord!r} is not a coordinate of chart {self.chart}")

    def is_zero(self):
        return self.dx.is_zero() and self.dt.is_zero()

    def scale(self, h):
        return Derivation(self.chart, h * self.dx, h * self.dt)

    def to_json(self):
        c1, c2 = self.field.coords
        return {"chart": self.chart, c1: str(self.dx), c2: str(self.dt)}

    def __str__(self):
        c1, c2 = self.field.coords
        return f"({self.dx}) d/d{c1} + ({self.dt}) d/d{c2}"


def apply(D, f):
    if f.field != D.field:
        raise ChartMismatch("function and derivation live on different charts")
    c1, c2 = D.field.coords
    out = D.field.zero()
    if not D.dx.is_zero():
        out = out + D.dx * f.partial(c1)
    if not D.dt.is_zero():
        out = out + D.dt * f.partial(c2)
    return out


def power_apply(D, f, n):
    for _ in range(n):
        f = apply(D, f)
    return f


def transport(D, atlas, target):
    """The same vector field written on another chart of the atlas."""
    if D.chart not in atlas.charts or D.field != atlas.chart(D.chart).field:
        raise ChartMismatch(f"derivation does not live on chart {D.chart}")
    trans = atlas.transition(D.chart, target)
    tgt = atlas.chart(target)
    c1, c2 = tgt.coords
    images = [trans.push(apply(D, trans.backward[c])) for c in (c1, c2)]
    return Derivation(target, images[0], images[1])


def p_closed_witness(D):
    """gamma with D^p = gamma * D, or None when D is not p-closed."""
    if D.is_zero():
        raise ZeroFunction("zero derivation")
    p = D.field.p
    c1, c2 = D.field.coords
    first = [(D.coefficient(c), power_apply(D, D.field.var(c), p)) for c in (c1, c2)]
    gamma = None
    for d1, dp in first:
        if not d1.is_zero():
            gamma = dp / d1
            break
    for d1, dp in first:
        if dp != gamma * d1:
            return None
    return gamma


@dataclass(frozen=True)
class Factorization:
    """D = h (f d/dc1 + g d/dc2) in display form.

    ``h`` collects the common denominator and the polynomial content of the
    numerators.  ``coprime`` is True when f = g = 0 has no common curve in the
    chart, False when a shared curve was found (listed in ``shared``), and None
    when a common factor of the norms could not be attributed to a branch.
    """
    h: FuncElem
    f: FuncElem
    g: FuncElem
    coprime: object
    shared: tuple = ()


def factorize(D):
    if D.is_zero():
        raise ZeroFunction("zero derivation")
    fld = D.field
    p = fld.p
    parts = [D.dx.numerator_parts(), D.dt.numerator_parts()]
    den = lcm(parts[0][2], parts[1][2])
    polys = []
    for A, B, d in parts:
        k = den.exact_div(d)
        polys += [A * k, B * k]
    common = Poly(p)
    for P in polys:
        if not P.is_zero():
            common = P if common.is_zero() else gcd(common, P)
    h = fld.from_poly(common) / fld.from_poly(den)
    f, g = D.dx / h, D.dt / h
    coprime, shared = _coprimality(f, g)
    return Factorization(h, f, g, coprime, tuple(shared))


def _norm_numerator(e):
    n = e.norm()
    return n.num


def _coprimality(f, g):
    if f.is_zero() or g.is_zero():
        other = g if f.is_zero() else f
        return (other.norm().num.is_constant(), ())
    G = gcd(_norm_numerator(f), _norm_numerator(g))
    if G.is_constant():
        return True, []
    fld = f.field
    p = fld.p
    shared = []
    rest = G
    for coord in fld.coords:
        for value in range(p):
            k = linear_order(rest, coord, value)
            if not k:
                continue
            rest = divide_linear(rest, coord, value, k)
            roots = line_roots(fld, coord, value)
            for root in (roots or (None,)):
                if (line_valuation(f, coord, value, root) > 0
                        and line_valuation(g, coord, value, root) > 0):
                    label = f"{coord} = {value}"
                    if root is not None:
                        label += f", {fld.gen} = {root}"
                    shared.append(label)
    if shared:
        return False, shared
    if rest.is_constant():
        return True, []
    return None, [f"undecided common norm factor {rest}"]


# -- local saturation -------------------------------------------------

def local_saturation(D, lp):
    """Exponents (m1, m2) with D = c1'^m1 c2'^m2 (f_P d/dc1 + g_P d/dc2) near the point."""
    c1, c2 = D.field.coords
    out = []
    for coord in (c1, c2):
        vals = [lp.valuation(e, coord) for e in (D.dx, D.dt) if not e.is_zero()]
        out.append(min(vals))
    return tuple(out)


def _local_unit_factor(lp, m):
    fld = lp.field
    c1, c2 = fld.coords
    X = fld.var(c1) - lp.values[c1]
    T = fld.var(c2) - lp.values[c2]
    return X ** m[0] * T ** m[1]


def saturated_at(D, atlas, point):
    """(f_P, g_P, (m1, m2)) for the chart of ``point``; D must live on that chart."""
    if point.chart != D.chart:
        D = transport(D, atlas, point.chart)
    lp = LocalPoint(D.field, point.values)
    m = local_saturation(D, lp)
    hp = _local_unit_factor(lp, m)
    return lp, D.dx / hp, D.dt / hp, m


@dataclass(frozen=True)
class IsolatedSingularity:
    point: SurfacePoint
    multiplicity: int


def isolated_singular_points(D, atlas, chart=None):
    """F_p-rational isolated singular points with their local degrees.

    With ``chart`` given, only that chart is searched; otherwise every chart is
    searched and points are reported once.
    """
    names = [chart] if chart is not None else list(atlas.charts)
    found = []
    for name in names:
        Dc = D if name == D.chart else transport(D, atlas, name)
        for pt in atlas.chart_points(name):
            lp, fp, gp, _ = saturated_at(Dc, atlas, pt)
            if lp.value(fp) == 0 and lp.value(gp) == 0:
                if any(atlas.same_point(pt, s.point) for s in found):
                    continue
                found.append(IsolatedSingularity(pt, lp.multiplicity(fp, gp)))
    return found


def _locus(atlas, curve, chart):
    cv = atlas.curve(curve) if isinstance(curve, str) else curve
    if chart is None:
        if not cv.loci:
            raise CurveNotVisible(f"{cv.name} has no local equation in any chart")
        chart = next(iter(cv.loci))
    if chart not in cv.loci:
        raise CurveNotVisible(f"{cv.name} is not visible in chart {chart}")
    return cv, chart, cv.loci[chart]


def curve_saturation(D, locus):
    vals = [line_valuation(e, locus.coord, locus.value, locus.branch)
            for e in (D.dx, D.dt) if not e.is_zero()]
    return min(vals)


def is_integral(D, atlas, curve, chart=None):
    """Whether D is tangent to the curve (after removing its divisorial part)."""
    cv, chart, loc = _locus(atlas, curve, chart)
    Dc = D if chart == D.chart else transport(D, atlas, chart)
    m = curve_saturation(Dc, loc)
    dc = Dc.coefficient(loc.coord)
    if dc.is_zero():
        return True
    return line_valuation(dc, loc.coord, loc.value, loc.branch) > m


def cuspidal_points(D, atlas, curve):
    """Points of a non-integral curve where D is tangent to it, singular points excluded."""
    cv = atlas.curve(curve) if isinstance(curve, str) else curve
    if is_integral(D, atlas, cv):
        raise CurveIsIntegral(f"{cv.name} is integral")
    singular = isolated_singular_points(D, atlas)
    found = []
    for chart, loc in cv.loci.items():
        Dc = D if chart == D.chart else transport(D, atlas, chart)
        for pt in atlas.curve_points(cv):
            here = atlas.locate(pt, chart)
            if here is None:
                continue
            if any(atlas.same_point(here, s.point) for s in singular):
                continue
            if any(atlas.same_point(here, q) for q in found):
                continue
            lp, fp, gp, _ = saturated_at(Dc, atlas, here)
            tangent = fp if loc.coord == Dc.field.coords[0] else gp
            if lp.value(tangent) == 0:
                found.append(here)
    return found


def divisor_of_D(D, atlas, curves=None, check_singular=True):
    """Coefficient of each named curve in the divisor of D, checked in every chart."""
    if check_singular:
        sing = isolated_singular_points(D, atlas)
        if sing:
            raise IsolatedSingularityPresent(
                "isolated singular points remain: " + "; ".join(str(s.point) for s in sing))
    names = list(atlas.curves) if curves is None else list(curves)
    out = {}
    for name in names:
        cv = atlas.curve(name)
        if cv.kind == "generic_fiber":
            out[name] = 0
            continue
        orders = {}
        for chart, loc in cv.loci.items():
            Dc = D if chart == D.chart else transport(D, atlas, chart)
            orders[chart] = curve_saturation(Dc, loc)
        if not orders:
            raise CurveNotVisible(f"{name} has no local equation")
        if len(set(orders.values())) != 1:
            raise InconsistentOrders(f"{name}: orders differ between charts {orders}")
        out[name] = next(iter(orders.values()))
    return out


def closure_identities_check(D, chart_label=None):
    """D(f g) = 0 and D(f / g) = 0 for the display factorization (f, g)."""
    fac = factorize(D)
    label = chart_label or D.chart
    report = []
    prod = apply(D, fac.f * fac.g)
    report.append({"check": "D(f*g) = 0", "chart": label,
                   "status": "pass" if prod.is_zero() else "fail", "details": str(prod)})
    if fac.g.is_zero():
        report.append({"check": "D(f/g) = 0", "chart": label, "status": "skipped",
                       "details": "g = 0"})
    else:
        quo = apply(D, fac.f / fac.g)
        report.append({"check": "D(f/g) = 0", "chart": label,
                       "status": "pass" if quo.is_zero() else "fail", "details": str(quo)})
    return report
