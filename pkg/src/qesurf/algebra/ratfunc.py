"""Rational functions over F_p in lowest terms with a monic denominator."""

from ..errors import DivisionByZero
from .poly import Poly, gcd


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize=True):
        p = num.p
        if den is None:
            den = Poly.constant(p, 1)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if normalize:
            if num.is_zero():
                den = Poly.constant(p, 1)
            elif den.is_constant():
                num = num.scale(pow(den.constant_value(), p - 2, p))
                den = Poly.constant(p, 1)
            else:
                g = gcd(num, den)
                if not g.is_constant():
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                c = den.lc()
                if c != 1:
                    inv = pow(c, p - 2, p)
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def p(self):
        return self.num.p

    @classmethod
    def constant(cls, p, c):
        return cls(Poly.constant(p, c), normalize=False) if c % p else cls.zero(p)

    @classmethod
    def zero(cls, p):
        return cls(Poly(p), Poly.constant(p, 1), normalize=False)

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return RatFunc.zero(self.p)
        return RatFunc(self.num * other.num, self.den * other.den)

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def partial(self, var):
        n, d = self.num, self.den
        return RatFunc(n.partial(var) * d - n * d.partial(var), d * d)

    def substitute_poly(self, mapping):
        return RatFunc(self.num.substitute(mapping), self.den.substitute(mapping))

    @property
    def variables(self):
        return self.num.variables | self.den.variables

    def __str__(self):
        if self.den.is_constant():
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    __repr__ = __str__
