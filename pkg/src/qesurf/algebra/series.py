"""Truncated power series in two local parameters, stored as Poly objects.

A series "to precision N" keeps every term of total degree <= N.
Also hosts Fulton's algorithm for local intersection multiplicities of plane
curves at the origin.
"""

from .poly import Poly, mono_mul


def truncate(s, n):
    return Poly._raw(s.p, {m: c for m, c in s.terms.items() if sum(e for _, e in m) <= n})


def mul(a, b, n):
    p = a.p
    out = {}
    da = [(m, c, sum(e for _, e in m)) for m, c in a.terms.items()]
    db = [(m, c, sum(e for _, e in m)) for m, c in b.terms.items()]
    for m1, c1, d1 in da:
        if d1 > n:
            continue
        for m2, c2, d2 in db:
            if d1 + d2 > n:
                continue
            m = mono_mul(m1, m2)
            out[m] = (out.get(m, 0) + c1 * c2) % p
    return Poly(p, out)


def inverse(u, n):
    """Inverse of a unit series to precision n."""
    p = u.p
    c0 = u.constant_value()
    if c0 == 0:
        raise ZeroDivisionError("series with zero constant term is not a unit")
    v = Poly.constant(p, pow(c0, p - 2, p))
    prec = 0
    two = Poly.constant(p, 2)
    while prec < n:
        prec = min(2 * prec + 1, n)
        v = mul(v, two - mul(u, v, prec), prec)
    return v


def order_along(poly, var):
    """Largest k with var^k dividing every term (poly must be nonzero)."""
    return min(dict(m).get(var, 0) for m in poly.terms)


def divide_monomial(poly, mono):
    """poly / mono, requiring every term to be divisible."""
    out = {}
    for m, c in poly.terms.items():
        d = dict(m)
        for v, e in mono:
            have = d.get(v, 0)
            if have < e:
                raise ArithmeticError("series not divisible by the monomial")
            if have == e:
                del d[v]
            else:
                d[v] = have - e
        out[tuple(sorted(d.items()))] = c
    return Poly._raw(poly.p, out)


def _restrict(poly, t_var):
    """poly(X, 0) as a Poly in the remaining variable."""
    return Poly._raw(poly.p, {m: c for m, c in poly.terms.items() if t_var not in dict(m)})


def intersection_multiplicity(F, G, x_var, t_var, limit=None, max_steps=100000):
    """dim O/(F, G) at the origin of the (x_var, t_var) plane; None if infinite.

    With ``limit`` set, None is also returned as soon as the number is known
    to exceed it.

    F and G are polynomials.  Fulton's algorithm: only uses
    I(F, G) = I(F, G + A F), I(T*F1, G) = I(T, G) + I(F1, G) and
    I(T, G) = ord_X G(X, 0).
    """
    p = F.p
    total = 0
    # Bezout: without a common component the local number is <= deg F * deg G
    bound = max(F.degree(), 0) * max(G.degree(), 0)
    if limit is not None:
        bound = min(bound, limit)
    for _ in range(max_steps):
        if total > bound:
            return None
        if F.constant_value() or G.constant_value():
            return total
        if F.is_zero() or G.is_zero():
            return None
        f0 = _restrict(F, t_var)
        g0 = _restrict(G, t_var)
        if f0.is_zero() and g0.is_zero():
            return None
        if f0.is_zero() or g0.is_zero():
            if f0.is_zero():
                F, G, f0, g0 = G, F, g0, f0
            # now g0 == 0: G = T * G1
            total += order_along(f0, x_var)
            G = divide_monomial(G, ((t_var, 1),))
            continue
        r, s = f0.degree(x_var), g0.degree(x_var)
        if r > s:
            F, G, f0, g0, r, s = G, F, g0, f0, s, r
        lf = f0.coefficients(x_var)[r].constant_value()
        lg = g0.coefficients(x_var)[s].constant_value()
        G = G.scale(lf) - F * Poly.var(p, x_var, s - r).scale(lg)
    raise RuntimeError("intersection multiplicity did not terminate")
