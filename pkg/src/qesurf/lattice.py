"""Integer bookkeeping of curve classes, intersection numbers and canonical classes.

A model keeps a list of named classes (proper transforms plus exceptional
curves), their intersection matrix, a canonical divisor written in those
classes, the Euler number c2 and optionally a fibration (base genus and the
class of a fiber).  The named classes need not be independent.
"""

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (NoIntegerSolution, NonIntegralChi, NonIntegralIntersection,
                     NotContractible, NotInPullbackImage)


@dataclass(frozen=True)
class Fibration:
    base_genus: int
    fiber: tuple  # class of a fiber, aligned with the model basis


@dataclass(frozen=True)
class Contraction:
    parent: "SurfaceModel"
    contracted: str


@dataclass(frozen=True)
class SurfaceModel:
    basis: tuple
    form: tuple  # tuple of tuples
    K: tuple
    c2: int
    fibration: Fibration = None
    contraction: Contraction = dc_field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.basis)
        if len(set(self.basis)) != n:
            raise ValueError("repeated class name")
        if len(self.form) != n or any(len(r) != n for r in self.form):
            raise ValueError("intersection matrix has the wrong shape")
        for i in range(n):
            for j in range(n):
                if self.form[i][j] != self.form[j][i]:
                    raise ValueError("intersection matrix is not symmetric")
        if len(self.K) != n:
            raise ValueError("canonical class has the wrong length")

    # -- vectors ------------------------------------------------------
    def index(self, name):
        try:
            return self.basis.index(name)
        except ValueError:
            raise KeyError(f"unknown class {name!r}") from None

    def vec(self, coeffs):
        """Vector from {class: coefficient}."""
        out = [0] * len(self.basis)
        for name, c in coeffs.items():
            out[self.index(name)] += c
        return tuple(out)

    def unit(self, name):
        return self.vec({name: 1})

    def as_dict(self, v):
        return {b: c for b, c in zip(self.basis, v) if c}

    def dot(self, u, v):
        u = self.unit(u) if isinstance(u, str) else u
        v = self.unit(v) if isinstance(v, str) else v
        return sum(u[i] * self.form[i][j] * v[j]
                   for i in range(len(u)) if u[i] for j in range(len(v)) if v[j])

    def genus(self, c):
        v = self.unit(c) if isinstance(c, str) else c
        twice = self.dot(v, v) + self.dot(self.K, v)
        return Fraction(twice, 2) + 1

    def fmt(self, v):
        terms = []
        for b, c in zip(self.basis, v):
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            terms.append((sign, b if mag == 1 else f"{mag}{b}"))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, t in terms[1:]:
            out += f" {sign} {t}"
        return out

    # -- serialization ------------------------------------------------
    def to_json(self):
        out = {"basis": list(self.basis), "form": [list(r) for r in self.form],
               "K": list(self.K), "c2": self.c2}
        if self.fibration is not None:
            out["fibration"] = {"base_genus": self.fibration.base_genus,
                                "fiber": list(self.fibration.fiber)}
        return out

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data):
        fib = data.get("fibration")
        if fib is not None:
            fib = Fibration(int(fib["base_genus"]), tuple(fib["fiber"]))
        return cls(tuple(data["basis"]), tuple(tuple(r) for r in data["form"]),
                   tuple(data["K"]), int(data["c2"]), fib)


def product_model(section="C_inf", fibers=("F_0", "F_inf"), base_genus=1):
    """E x P^1 with tracked fibers of the first projection and one horizontal section.

    The section is E x {pt}; K = -2 (section) numerically.
    """
    basis = tuple(fibers) + (section,)
    n = len(basis)
    form = [[0] * n for _ in range(n)]
    for i in range(len(fibers)):
        form[i][n - 1] = form[n - 1][i] = 1
    K = [0] * n
    K[n - 1] = -2
    fiber = [0] * n
    fiber[0] = 1
    return SurfaceModel(basis, tuple(map(tuple, form)), tuple(K), 0,
                        Fibration(base_genus, tuple(fiber)))


def blow_up_model(m, incidences, name):
    """Blow up a point lying on the classes listed with their multiplicities there."""
    if name in m.basis:
        raise ValueError(f"class {name!r} already exists")
    for c, k in incidences.items():
        m.index(c)
        if k < 0:
            raise ValueError("negative multiplicity")
    mult = [incidences.get(b, 0) for b in m.basis]
    n = len(m.basis)
    form = [[m.form[i][j] - mult[i] * mult[j] for j in range(n)] + [mult[i]] for i in range(n)]
    form.append(mult + [-1])
    K = list(m.K) + [sum(k * e for k, e in zip(m.K, mult)) + 1]
    fib = None
    if m.fibration is not None:
        f = m.fibration.fiber
        fib = Fibration(m.fibration.base_genus,
                        tuple(f) + (sum(a * e for a, e in zip(f, mult)),))
    return SurfaceModel(m.basis + (name,), tuple(map(tuple, form)), tuple(K), m.c2 + 1, fib)


def total_transform(m_up, v_down, name):
    """Pullback to the blown-up model of a vector written on the model before."""
    i = m_up.index(name)
    coeffs = list(v_down[:i]) + [0] + list(v_down[i:])
    e = sum(c * m_up.form[j][i] for j, c in enumerate(coeffs))
    coeffs[i] = e
    return tuple(coeffs)


@dataclass(frozen=True)
class QuotientSpec:
    p: int
    flags: dict  # class -> "integral" | "non-integral"

    def multiplier(self, name):
        flag = self.flags[name]
        if flag == "integral":
            return 1
        if flag == "non-integral":
            return self.p
        raise ValueError(f"unknown flag {flag!r} for {name}")


def quotient_model(m, spec, K=None):
    """Model of the quotient by a p-closed vector field.

    pi^* of the image of C is C (integral) or pC (non-integral), and
    (pi^* A, pi^* B) = p (A, B).  ``K`` may be supplied (in the quotient basis);
    otherwise it is left zero until canonical_descent fills it in.
    """
    missing = [b for b in m.basis if b not in spec.flags]
    if missing:
        raise ValueError(f"integrality flags missing for {missing}")
    p = spec.p
    e = [spec.multiplier(b) for b in m.basis]
    n = len(m.basis)
    form = []
    for i in range(n):
        row = []
        for j in range(n):
            num = e[i] * e[j] * m.form[i][j]
            if num % p:
                raise NonIntegralIntersection(
                    f"({m.basis[i]}, {m.basis[j]}) on the quotient would be {num}/{p}")
            row.append(num // p)
        form.append(tuple(row))
    fib = None
    if m.fibration is not None:
        fib = Fibration(m.fibration.base_genus, quotient_vector(m, spec, m.fibration.fiber, p))
    return SurfaceModel(m.basis, tuple(form), tuple(K) if K is not None else (0,) * n, m.c2, fib)


def quotient_vector(m, spec, v, factor=1):
    """The vector w on the quotient with pi^* w = factor * v."""
    out = []
    for b, c in zip(m.basis, v):
        e = spec.multiplier(b)
        if (factor * c) % e:
            raise NotInPullbackImage(f"coefficient {factor * c} of {b} is not divisible by {e}")
        out.append(factor * c // e)
    return tuple(out)


def pullback_vector(spec, basis, w):
    return tuple(c * spec.multiplier(b) for b, c in zip(basis, w))


def canonical_descent(m_up, divisor, spec):
    """(pi^* K_quotient, K_quotient) from K_up = pi^* K_quotient + (p - 1)(D)."""
    p = spec.p
    pulled = tuple(k - (p - 1) * d for k, d in zip(m_up.K, divisor))
    return pulled, quotient_vector(m_up, spec, pulled)


def with_canonical(m, K):
    return SurfaceModel(m.basis, m.form, tuple(K), m.c2, m.fibration, m.contraction)


def blow_down(m, name):
    """Contract a (-1)-curve of virtual genus 0."""
    i = m.index(name)
    if m.form[i][i] != -1:
        raise NotContractible(f"{name}^2 = {m.form[i][i]}, not -1")
    if m.genus(name) != 0:
        raise NotContractible(f"{name} has virtual genus {m.genus(name)}")
    keep = [j for j in range(len(m.basis)) if j != i]
    E = [m.form[j][i] for j in range(len(m.basis))]
    form = tuple(tuple(m.form[a][b] + E[a] * E[b] for b in keep) for a in keep)
    K = tuple(m.K[j] for j in keep)
    fib = None
    if m.fibration is not None:
        fib = Fibration(m.fibration.base_genus, tuple(m.fibration.fiber[j] for j in keep))
    down = SurfaceModel(tuple(m.basis[j] for j in keep), form, K, m.c2 - 1, fib,
                        Contraction(m, name))
    # K_up must be numerically sigma^* K_down + E
    expected = tuple(a + b for a, b in zip(total_transform(m, K, name), m.unit(name)))
    if not check_equivalence(m, m.K, expected):
        raise NotContractible(f"canonical class is incompatible with contracting {name}")
    return down


def pullback_chain(m_down, v, m_up):
    """Pull a vector back through the recorded contractions down to ``m_up``."""
    model = m_down
    while model is not m_up:
        if model.contraction is None:
            raise ValueError("target model is not an ancestor through contractions")
        parent = model.contraction.parent
        v = total_transform(parent, v, model.contraction.contracted)
        model = parent
    return v


def check_equivalence(m, lhs, rhs):
    """Numerical equivalence of two vectors over the model's classes."""
    diff = tuple(a - b for a, b in zip(lhs, rhs))
    return all(m.dot(diff, m.unit(b)) == 0 for b in m.basis)


@dataclass(frozen=True)
class GenusReport:
    genera: dict
    K2: int
    c2: int
    chi: int


def genus_and_noether(m):
    K2 = m.dot(m.K, m.K)
    total = K2 + m.c2
    if total % 12:
        raise NonIntegralChi(f"K^2 + c2 = {total} is not divisible by 12")
    genera = {b: m.genus(b) for b in m.basis}
    return GenusReport(genera, K2, m.c2, total // 12)


def multiple_fiber_coefficient(m, fiber_component, test_curve, p):
    """(a, deg L) with (K, T) = (F, T) deg L + a (component, T) and 0 <= a <= p - 1.

    F is the fiber class of the model's fibration.
    """
    if m.fibration is None:
        raise ValueError("model has no fibration")
    kt = m.dot(m.K, test_curve)
    ft = m.dot(m.fibration.fiber, test_curve)
    ct = m.dot(fiber_component, test_curve)
    if ft == 0:
        raise NoIntegerSolution("test curve does not meet the fibers")
    for a in range(p):
        rest = kt - a * ct
        if rest % ft == 0:
            return a, rest // ft
    raise NoIntegerSolution(f"no a in [0, {p - 1}] solves {kt} = {ft} deg L + {ct} a")
