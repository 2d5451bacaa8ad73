"""Function fields F_p(c1, c2, ...)[gen] / (gen^2 + gen - r) and their elements.

Every element is stored in the basis {1, gen} as ``a + b*gen`` with ``a`` and
``b`` rational functions in the independent coordinates, so equality is
componentwise.  Charts without an algebraic generator use ``b = 0``.
"""

from ..errors import (ChartMismatch, DenominatorVanishesIdentically, DivisionByZero,
                      InconsistentSubstitution, UnknownVariable)
from .poly import Poly, lcm
from .ratfunc import RatFunc


class FunctionField:
    """Context shared by the elements of one chart's function field.

    ``relation`` is the polynomial r in the coordinates with gen^2 + gen = r.
    """

    __slots__ = ("p", "coords", "gen", "relation", "_key")

    def __init__(self, p, coords, gen=None, relation=None):
        if p not in (2, 3):
            raise ValueError(f"unsupported characteristic {p}")
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise ValueError("repeated coordinate name")
        if (gen is None) != (relation is None):
            raise ValueError("a generator needs a relation and vice versa")
        if gen is not None:
            if gen in coords:
                raise ValueError("generator name clashes with a coordinate")
            if isinstance(relation, str):
                from .parse import parse_poly
                relation = parse_poly(relation, p, coords)
            extra = relation.variables - set(coords)
            if extra:
                raise UnknownVariable(f"relation uses non-coordinates {sorted(extra)}")
        self.p = p
        self.coords = coords
        self.gen = gen
        self.relation = relation
        self._key = (p, coords, gen, relation)

    def __eq__(self, other):
        return isinstance(other, FunctionField) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.gen is None:
            return f"F_{self.p}({', '.join(self.coords)})"
        return f"F_{self.p}({', '.join(self.coords)})[{self.gen}]/({self.gen}^2 + {self.gen} - ({self.relation}))"

    @property
    def names(self):
        return self.coords + ((self.gen,) if self.gen else ())

    # -- element constructors -----------------------------------------
    def zero(self):
        z = RatFunc.zero(self.p)
        return FuncElem(self, z, z)

    def one(self):
        return self.const(1)

    def const(self, c):
        return FuncElem(self, RatFunc.constant(self.p, c), RatFunc.zero(self.p))

    def from_poly(self, poly):
        return FuncElem(self, RatFunc(poly), RatFunc.zero(self.p))

    def from_parts(self, a, b=None):
        """Element a + b*gen from polynomials or rational functions."""
        a = a if isinstance(a, RatFunc) else RatFunc(a)
        if b is None:
            b = RatFunc.zero(self.p)
        elif not isinstance(b, RatFunc):
            b = RatFunc(b)
        return FuncElem(self, a, b)

    def var(self, name):
        p = self.p
        if name in self.coords:
            return FuncElem(self, RatFunc(Poly.var(p, name), normalize=False), RatFunc.zero(p))
        if name == self.gen:
            return FuncElem(self, RatFunc.zero(p), RatFunc.constant(p, 1))
        raise UnknownVariable(f"{name!r} is not a variable of {self!r}")

    def parse(self, text):
        from .parse import parse_elem
        return parse_elem(text, self)

    def identity_map(self):
        return {n: self.var(n) for n in self.names}

    def check_map(self, mapping, target):
        """Raise unless ``mapping`` (names of self -> elements of target) respects the relations."""
        for n in self.names:
            if n not in mapping:
                raise UnknownVariable(f"substitution misses variable {n!r}")
            if mapping[n].field != target:
                raise ChartMismatch("substitution image outside the target field")
        if self.gen is not None:
            g = mapping[self.gen]
            lhs = g * g + g
            rhs = substitute(self.from_poly(self.relation), mapping)
            if lhs != rhs:
                raise InconsistentSubstitution(
                    f"{self.gen}^2 + {self.gen} - r does not map to 0 under the substitution")


class FuncElem:
    """Immutable element a + b*gen of a FunctionField."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = a
        self.b = b

    # -- helpers ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FuncElem):
            if other.field != self.field:
                raise ChartMismatch("elements of different function fields")
            return other
        if isinstance(other, int):
            return self.field.const(other)
        return NotImplemented

    def _relation(self):
        return RatFunc(self.field.relation, normalize=False)

    def is_zero(self):
        return self.a.is_zero() and self.b.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.const(other)
        if not isinstance(other, FuncElem):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FuncElem(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return FuncElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FuncElem(self.field, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        if b1.is_zero() and b2.is_zero():
            return FuncElem(self.field, a1 * a2, b1)
        bb = b1 * b2
        a = a1 * a2
        b = a1 * b2 + a2 * b1
        if not bb.is_zero():
            # gen^2 = r - gen
            a = a + bb * self._relation()
            b = b - bb
        return FuncElem(self.field, a, b)

    __rmul__ = __mul__

    def conjugate(self):
        """Image under gen -> -1 - gen (the other root of the relation)."""
        return FuncElem(self.field, self.a - self.b, -self.b)

    def norm(self):
        """a^2 - ab - b^2 r as a rational function in the coordinates."""
        a, b = self.a, self.b
        if b.is_zero():
            return a * a
        return a * a - a * b - b * b * self._relation()

    def trace(self):
        return self.a + self.a - self.b

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of the zero function")
        if self.b.is_zero():
            return FuncElem(self.field, self.a.inverse(), self.b)
        n = self.norm().inverse()
        c = self.conjugate()
        return FuncElem(self.field, c.a * n, c.b * n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------
    def partial(self, var):
        """Formal partial derivative with respect to an independent coordinate."""
        field = self.field
        if var not in field.coords:
            raise UnknownVariable(f"cannot differentiate with respect to {var!r}")
        da = self.a.partial(var)
        db = self.b.partial(var)
        result = FuncElem(field, da, db)
        if field.gen is not None and not self.b.is_zero():
            result = result + FuncElem(field, self.b, RatFunc.zero(field.p)) * gen_partial(field, var)
        return result

    # -- structure ----------------------------------------------------
    def common_denominator(self):
        return lcm(self.a.den, self.b.den)

    def numerator_parts(self):
        """(A, B, Den) with self = (A + B*gen)/Den and A, B, Den polynomials."""
        den = self.common_denominator()
        A = self.a.num * den.exact_div(self.a.den)
        B = self.b.num * den.exact_div(self.b.den)
        return A, B, den

    def is_regular_polynomial(self):
        return self.a.is_polynomial() and self.b.is_polynomial()

    def value_at(self, values):
        """Naive evaluation at an F_p point; the denominator must not vanish there."""
        A, B, den = self.numerator_parts()
        d = den.evaluate(values)
        if d == 0:
            raise DivisionByZero("denominator vanishes at the point")
        p = self.field.p
        v = A.evaluate(values)
        if not B.is_zero():
            v += B.evaluate(values) * values[self.field.gen]
        return v * pow(d, p - 2, p) % p

    def substitute(self, mapping):
        return substitute(self, mapping)

    def __str__(self):
        if self.b.is_zero():
            return str(self.a)
        if self.a.is_zero():
            return f"{self.b}*{self.field.gen}"
        return f"{self.a} + {self.b}*{self.field.gen}"

    def __repr__(self):
        return f"FuncElem({self})"


def gen_partial(field, var):
    """d(gen)/d(var) from implicit differentiation: (2 gen + 1) gen' = dr/dvar."""
    dr = field.from_poly(field.relation.partial(var))
    if dr.is_zero():
        return field.zero()
    two_gen_plus_one = field.var(field.gen) * 2 + 1
    return dr / two_gen_plus_one


def _eval_poly(poly, mapping, target, cache):
    result = target.zero()
    for m, c in poly.terms.items():
        term = target.const(c)
        for v, e in m:
            key = (v, e)
            if key not in cache:
                try:
                    cache[key] = mapping[v] ** e
                except KeyError:
                    raise UnknownVariable(f"substitution misses variable {v!r}") from None
            term = term * cache[key]
        result = result + term
    return result


def substitute(f, mapping):
    """Image of ``f`` under a map sending each variable to an element of one target field."""
    if not mapping:
        return f
    target = next(iter(mapping.values())).field
    for v in mapping.values():
        if v.field != target:
            raise ChartMismatch("substitution images in different fields")
    cache = {}

    def image(rf):
        if rf.is_zero():
            return target.zero()
        num = _eval_poly(rf.num, mapping, target, cache)
        den = _eval_poly(rf.den, mapping, target, cache)
        if den.is_zero():
            raise DenominatorVanishesIdentically(f"denominator {rf.den} maps to 0")
        return num / den if not (den == target.one()) else num

    out = image(f.a)
    if not f.b.is_zero():
        gen = f.field.gen
        if gen not in mapping:
            raise UnknownVariable(f"substitution misses generator {gen!r}")
        out = out + image(f.b) * mapping[gen]
    return out
