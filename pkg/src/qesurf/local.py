"""Local analysis on a chart: valuations along coordinate lines and at points.

A chart carries coordinates (c1, c2) and possibly a generator y with
y^2 + y = r(c1, c2).  In characteristic 2 the relation is unramified
everywhere, so c1 and c2 are local parameters at every point and along every
coordinate line.  A line {c = v} either stays irreducible over the base field
(inert) or splits into two branches y = q(other) and y = q(other) + 1.
"""

from .algebra import series
from .algebra.poly import Poly, divide_linear, linear_order
from .errors import (CommonComponent, UnsupportedLocalStructure, ZeroFunction,
                     DivisionByZero)


class NotRegular(DivisionByZero):
    """A function has a pole through the point where it was evaluated."""


def other_coord(field, coord):
    c1, c2 = field.coords
    return c2 if coord == c1 else c1


def line_roots(field, coord, value):
    """Polynomial roots (q, q+1) of the relation restricted to {coord = value}.

    Returns None when the line is inert over F_p (no F_p-polynomial branch).
    """
    if field.gen is None:
        return None
    if field.p != 2:
        raise UnsupportedLocalStructure("line branches are only implemented in characteristic 2")
    other = other_coord(field, coord)
    rbar = field.relation.substitute({coord: Poly.constant(2, value)})
    extra = rbar.variables - {other}
    if extra:
        raise UnsupportedLocalStructure(f"restricted relation depends on {sorted(extra)}")
    coeffs = {e: c.constant_value() for e, c in rbar.coefficients(other).items()}
    if coeffs.get(0, 0):
        return None
    q = {}
    for k in range(1, max(coeffs) + 1 if coeffs else 1):
        val = coeffs.get(k, 0)
        if k % 2 == 0:
            val ^= q.get(k // 2, 0)
        q[k] = val
    root = Poly(2, {((other, k),): c for k, c in q.items() if c})
    if root * root + root != rbar:
        return None
    return (root, root + 1)


def _order(rf, coord, value):
    return linear_order(rf.num, coord, value) - linear_order(rf.den, coord, value)


def line_valuation(f, coord, value, root):
    """Order of vanishing of ``f`` along the branch {coord = value, gen = root}.

    ``root`` is None for an inert line (or a chart without generator).
    """
    if f.is_zero():
        raise ZeroFunction("valuation of the zero function")
    field = f.field
    if root is None:
        return min(_order(rf, coord, value) for rf in (f.a, f.b) if not rf.is_zero())
    p = field.p
    A, B, den = f.numerator_parts()
    vden = linear_order(den, coord, value)
    r = field.relation
    rbar = r.substitute({coord: Poly.constant(p, value)})
    q_r = divide_linear(r - rbar, coord, value)
    y1 = Poly.constant(p, -1) - root
    k = 0
    for _ in range(100000):
        orders = [linear_order(P, coord, value) for P in (A, B) if not P.is_zero()]
        e = min(orders)
        if e:
            A = divide_linear(A, coord, value, e) if not A.is_zero() else A
            B = divide_linear(B, coord, value, e) if not B.is_zero() else B
            k += e
        A1 = A + B * root
        if not A1.substitute({coord: Poly.constant(p, value)}).is_zero():
            return k - vden
        A2 = divide_linear(A1, coord, value)
        # A + B y = c * (A2 (y - y1) + B q_r) / (y - y1), and y - y1 is a unit on the branch
        A, B = -(A2 * y1) + B * q_r, A2
        k += 1
    raise RuntimeError("valuation loop did not terminate")


class LocalPoint:
    """Analysis of functions at an F_p-rational point of a chart."""

    def __init__(self, field, values):
        self.field = field
        self.values = dict(values)
        p = field.p
        c1, c2 = field.coords
        self.p = p
        self.c1, self.c2 = c1, c2
        self.x0, self.t0 = values[c1] % p, values[c2] % p
        self.y0 = values[field.gen] % p if field.gen else None
        self.roots = {}
        for coord in (c1, c2):
            roots = line_roots(field, coord, values[coord])
            if roots is None:
                self.roots[coord] = None
            else:
                o = other_coord(field, coord)
                match = [q for q in roots if q.evaluate({o: values[o]}) == self.y0]
                if len(match) != 1:
                    raise UnsupportedLocalStructure("point does not lie on a unique branch")
                self.roots[coord] = match[0]
        self._shift = {c1: Poly.var(p, c1) + self.x0, c2: Poly.var(p, c2) + self.t0}
        self._y_cache = {}

    def valuation(self, f, coord):
        """Order along the coordinate line through the point."""
        return line_valuation(f, coord, self.values[coord], self.roots[coord])

    def _den_shape(self, den):
        s = den.substitute(self._shift)
        a = series.order_along(s, self.c1)
        b = series.order_along(s, self.c2)
        mono = tuple(sorted(kv for kv in ((self.c1, a), (self.c2, b)) if kv[1]))
        unit = series.divide_monomial(s, mono)
        if unit.constant_value() == 0:
            raise UnsupportedLocalStructure(
                f"denominator {den} has a non-coordinate factor through the point")
        return mono, a + b, unit

    def is_regular(self, f):
        if f.is_zero():
            return True
        den = f.common_denominator()
        if den.evaluate(self.values) != 0:
            return True
        self._den_shape(den)
        return all(self.valuation(f, c) >= 0 for c in (self.c1, self.c2))

    def _y_series(self, n):
        if n not in self._y_cache:
            p = self.p
            R = self.field.relation.substitute(self._shift) - (self.y0 * self.y0 + self.y0)
            inv = pow((2 * self.y0 + 1) % p, p - 2, p)
            Y = Poly(p)
            for _ in range(n + 1):
                Y = series.truncate((R - series.mul(Y, Y, n)).scale(inv), n)
            self._y_cache[n] = Y + self.y0
        return self._y_cache[n]

    def series(self, f, n):
        """Taylor expansion of a regular function in the shifted coordinates, degree <= n."""
        if not self.is_regular(f):
            raise NotRegular(f"{f} has a pole at the point")
        A, B, den = f.numerator_parts()
        mono, d, unit = self._den_shape(den)
        need = n + d
        num = series.truncate(A.substitute(self._shift), need)
        if not B.is_zero():
            num = num + series.mul(B.substitute(self._shift), self._y_series(need), need)
        quotient = series.divide_monomial(num, mono)
        return series.mul(series.truncate(quotient, n), series.inverse(unit, n), n)

    def value(self, f):
        if f.is_zero():
            return 0
        den = f.common_denominator()
        if den.evaluate(self.values) != 0:
            return f.value_at(self.values)
        return self.series(f, 0).constant_value()

    def vanishes(self, f):
        return self.value(f) == 0

    def multiplicity(self, f, g, precisions=(8, 16, 32)):
        """Local intersection number dim O_P/(f, g), certified by truncation.

        A value k <= n computed from degree-n truncations is exact: m^k lies in
        the truncated ideal, so the discarded tails do not change it.
        """
        for n in precisions:
            F, G = self.series(f, n), self.series(g, n)
            m = series.intersection_multiplicity(F, G, self.c1, self.c2, limit=n)
            if m is not None:
                return m
        raise CommonComponent("could not certify that the two functions are coprime at the point")
