"""Sparse multivariate polynomials over a prime field F_p.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name, so two polynomials over different variable sets combine without any
alignment step.  Terms with coefficient zero are never stored, which makes
equality structural.

The monomial order is lexicographic with variables ranked by ascending name.
"""

import heapq
from functools import reduce

Monomial = tuple

ONE_MONO = ()


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_div(m1, m2):
    """m1 / m2, or None when m2 does not divide m1."""
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        have = d.get(v, 0)
        if have < e:
            return None
        if have == e:
            del d[v]
        else:
            d[v] = have - e
    return tuple(sorted(d.items()))


def mono_key(m, variables):
    d = dict(m)
    return tuple(d.get(v, 0) for v in variables)


def mono_str(m):
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


class Poly:
    """Immutable polynomial over F_p."""

    __slots__ = ("p", "terms", "_hash")

    def __init__(self, p, terms=None):
        self.p = p
        clean = {}
        if terms:
            for m, c in terms.items():
                c %= p
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, p, terms):
        obj = cls.__new__(cls)
        obj.p = p
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, p, c):
        return cls(p, {ONE_MONO: c})

    @classmethod
    def var(cls, p, name, exp=1):
        return cls._raw(p, {((name, exp),): 1}) if exp else cls.constant(p, 1)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("polynomials over different prime fields")
            return other
        if isinstance(other, int):
            return Poly.constant(self.p, other)
        return NotImplemented

    # -- basic queries ------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self):
        """Constant term (the value at the origin)."""
        return self.terms.get(ONE_MONO, 0)

    @property
    def variables(self):
        out = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return frozenset(out)

    def degree(self, var=None):
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def min_degree(self, var):
        if not self.terms:
            return -1
        return min(dict(m).get(var, 0) for m in self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.constant(self.p, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = (out.get(m, 0) + c) % p
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(p, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return Poly._raw(p, {m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if not self.terms or not other.terms:
            return Poly._raw(p, {})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = (out.get(m, 0) + c1 * c2) % p
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(p, out)

    __rmul__ = __mul__

    def scale(self, c):
        return Poly(self.p, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.p, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- ordering and normalisation ------------------------------------
    def leading(self, variables=None):
        """(monomial, coefficient) of the lex-largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if variables is None:
            variables = sorted(self.variables)
        m = max(self.terms, key=lambda mm: mono_key(mm, variables))
        return m, self.terms[m]

    def lc(self):
        return self.leading()[1]

    def monic(self):
        if not self.terms:
            return self
        inv = pow(self.lc(), self.p - 2, self.p)
        return self.scale(inv) if inv != 1 else self

    def coefficients(self, var):
        """Mapping exponent of ``var`` -> coefficient polynomial in the other variables."""
        out = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for v, k in m:
                if v == var:
                    e = k
                else:
                    rest.append((v, k))
            out.setdefault(e, {})[tuple(rest)] = c
        return {e: Poly._raw(self.p, t) for e, t in out.items()}

    def evaluate(self, values):
        """Value in F_p; ``values`` must cover every variable present."""
        p = self.p
        total = 0
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                try:
                    term = term * pow(values[v], e, p) % p
                except KeyError:
                    raise KeyError(f"no value for variable {v!r}") from None
            total += term
        return total % p

    def substitute(self, mapping):
        """Compose: replace variables by polynomials (simultaneously)."""
        p = self.p
        result = Poly._raw(p, {})
        cache = {}
        for m, c in self.terms.items():
            term = Poly.constant(p, c)
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = mapping[v] ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * Poly._raw(p, {tuple(keep): 1})
            result = result + term
        return result

    def partial(self, var):
        p = self.p
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e % p == 0:
                continue
            if e == 1:
                del d[var]
            else:
                d[var] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = (out.get(key, 0) + c * e) % p
        return Poly(p, out)

    # -- division -----------------------------------------------------
    def divmod_lex(self, other):
        """Multivariate division by ``other``; returns (quotient, remainder)."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        variables = sorted(self.variables | other.variables)
        lm_b, lc_b = other.leading(variables)
        inv = pow(lc_b, p - 2, p)
        rest_b = [(m, c) for m, c in other.terms.items() if m != lm_b]
        r = dict(self.terms)
        q, rem = {}, {}
        # max-heap of live monomials of r, keyed by negated exponent vectors
        heap = [(tuple(-e for e in mono_key(m, variables)), m) for m in r]
        heapq.heapify(heap)
        queued = set(r)
        while heap:
            _, lm = heapq.heappop(heap)
            queued.discard(lm)
            c = r.pop(lm, 0)
            if not c:
                continue
            t = mono_div(lm, lm_b)
            if t is None:
                rem[lm] = c
                continue
            k = c * inv % p
            q[t] = k
            for m, cb in rest_b:
                mm = mono_mul(t, m)
                v = (r.get(mm, 0) - k * cb) % p
                if v:
                    r[mm] = v
                    if mm not in queued:
                        queued.add(mm)
                        heapq.heappush(heap, (tuple(-e for e in mono_key(mm, variables)), mm))
                else:
                    r.pop(mm, None)
        return Poly._raw(p, q), Poly._raw(p, rem)

    def exact_div(self, other):
        q, r = self.divmod_lex(other)
        if r.terms:
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other):
        """True when self divides other."""
        return not other.divmod_lex(self)[1].terms

    # -- text ---------------------------------------------------------
    def sorted_terms(self):
        variables = sorted(self.variables)
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0], variables), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono_str(m))
            else:
                parts.append(f"{c}*{mono_str(m)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly(p={self.p}, {self})"


# -- gcd ------------------------------------------------------------------
def content(a, var):
    """gcd of the coefficients of ``a`` viewed as a polynomial in ``var``."""
    coeffs = list(a.coefficients(var).values())
    return reduce(gcd, coeffs, Poly._raw(a.p, {}))


def pseudo_rem(a, b, var):
    db = b.degree(var)
    lc_b = b.coefficients(var)[db]
    r = a
    while not r.is_zero():
        dr = r.degree(var)
        if dr < db:
            break
        lead = r.coefficients(var)[dr]
        r = lc_b * r - lead * Poly.var(a.p, var, dr - db) * b
    return r


def gcd(a, b):
    """Monic gcd over F_p[vars] (recursive primitive remainder sequence)."""
    p = a.p
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Poly.constant(p, 1)
    variables = sorted(a.variables | b.variables)
    var = variables[0]
    if var not in a.variables:
        return gcd(a, content(b, var))
    if var not in b.variables:
        return gcd(content(a, var), b)
    ca, cb = content(a, var), content(b, var)
    pa, pb = a.exact_div(ca), b.exact_div(cb)
    c = gcd(ca, cb)
    if pa.degree(var) < pb.degree(var):
        pa, pb = pb, pa
    while not pb.is_zero():
        r = pseudo_rem(pa, pb, var)
        pa = pb
        if r.is_zero():
            pb = r
        else:
            pb = r.exact_div(content(r, var))
    g = pa.exact_div(content(pa, var))
    return (g * c).monic()


def lcm(a, b):
    if a.is_zero() or b.is_zero():
        return Poly._raw(a.p, {})
    return (a * b).exact_div(gcd(a, b)).monic()


def linear_order(poly, var, value):
    """Multiplicity of the factor (var - value) in ``poly``."""
    if poly.is_zero():
        raise ValueError("order of the zero polynomial")
    if value:
        poly = poly.substitute({var: Poly.var(poly.p, var) + value})
    return poly.min_degree(var)


def divide_linear(poly, var, value, times=1):
    """poly / (var - value)^times, exactly."""
    p = poly.p
    if value:
        shifted = poly.substitute({var: Poly.var(p, var) + value})
    else:
        shifted = poly
    out = {}
    for m, c in shifted.terms.items():
        d = dict(m)
        e = d.get(var, 0)
        if e < times:
            raise ArithmeticError("inexact division by a linear factor")
        if e == times:
            d.pop(var, None)
        else:
            d[var] = e - times
        out[tuple(sorted(d.items()))] = c
    q = Poly._raw(p, out)
    if value:
        q = q.substitute({var: Poly.var(p, var) - value})
    return q
