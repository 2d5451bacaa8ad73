"""Multicanonical bounds for quasi-elliptic fibrations of Kodaira dimension 1.

A configuration (g, chi, t, fibers) describes the canonical bundle formula
K = phi^*(K_B - f) + sum a_i F_i with deg f = -(chi + t) and multiple fibers
p F_i.  The multicanonical system |mK| is asked to give the fibration, which
holds once

    m (2g - 2 + chi + t) + sum floor(m a_i / m_i) >= 2g + 1.

``min_m`` is the threshold from which this holds for every larger m as well.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import ceil

from .errors import CapsInsufficient, InvalidConfig, NotKodairaDimOne, Unclassifiable

CASES = ("I", "II-1", "II-2", "III-1", "III-2", "III-3")


@dataclass(frozen=True, order=True)
class Fiber:
    m: int
    a: int
    kind: str  # "tame" or "wild"

    def to_json(self):
        return {"m": self.m, "a": self.a, "kind": self.kind}


def chi_lower_bound(g):
    if g == 0:
        return 1
    if g == 1:
        return 0
    return ceil(Fraction(1 - g, 3))


@dataclass(frozen=True, order=True)
class FibrationConfig:
    p: int
    g: int
    chi: int
    t: int
    fibers: tuple = ()

    def __post_init__(self):
        fibers = tuple(sorted(self.fibers))
        object.__setattr__(self, "fibers", fibers)
        if self.p not in (2, 3):
            raise InvalidConfig(f"p = {self.p} is not 2 or 3")
        if self.g < 0:
            raise InvalidConfig("negative base genus")
        if self.t < 0:
            raise InvalidConfig("negative torsion length")
        if self.chi < chi_lower_bound(self.g):
            raise InvalidConfig(f"chi = {self.chi} is below {chi_lower_bound(self.g)} for g = {self.g}")
        wild = 0
        for f in fibers:
            if f.m != self.p:
                raise InvalidConfig(f"multiple fiber of multiplicity {f.m}; must be {self.p}")
            if not 0 <= f.a <= f.m - 1:
                raise InvalidConfig(f"a = {f.a} outside [0, {f.m - 1}]")
            if f.kind == "tame":
                if f.a != f.m - 1:
                    raise InvalidConfig("a tame fiber has a = m - 1")
            elif f.kind == "wild":
                wild += 1
            else:
                raise InvalidConfig(f"unknown fiber kind {f.kind!r}")
        if wild > self.t:
            raise InvalidConfig(f"{wild} wild fibers need t >= {wild}")

    @property
    def chi_t(self):
        return self.chi + self.t

    @property
    def n_tame(self):
        return sum(1 for f in self.fibers if f.kind == "tame")

    @property
    def n_wild(self):
        return sum(1 for f in self.fibers if f.kind == "wild")

    def key(self):
        return (self.g, self.chi, self.t, tuple((f.m, f.a, f.kind) for f in self.fibers))

    def to_json(self):
        return {"p": self.p, "g": self.g, "chi": self.chi, "t": self.t,
                "fibers": [f.to_json() for f in self.fibers]}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfig("config must be a JSON object")
        try:
            fibers = tuple(Fiber(int(f["m"]), int(f["a"]), str(f.get("kind", "tame")))
                           for f in data.get("fibers", ()))
            return cls(int(data["p"]), int(data["g"]), int(data["chi"]), int(data.get("t", 0)),
                       fibers)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(f"malformed config: {exc}") from None

    def __str__(self):
        fibers = ", ".join(f"{f.kind} ({f.m},{f.a})" for f in self.fibers) or "none"
        return f"g={self.g}, chi={self.chi}, t={self.t}, fibers: {fibers}"


def kodaira_value(c):
    """2g - 2 + chi + t + sum a_i / m_i as an exact fraction."""
    return Fraction(2 * c.g - 2 + c.chi_t) + sum((Fraction(f.a, f.m) for f in c.fibers), Fraction(0))


def kodaira_positive(c):
    return kodaira_value(c) > 0


def lhs(c, m):
    return m * (2 * c.g - 2 + c.chi_t) + sum((m * f.a) // f.m for f in c.fibers)


def holds(c, m):
    return lhs(c, m) >= 2 * c.g + 1


def search_cap(c):
    """Smallest m0 with m0 * value >= 2g + 1 + lambda; the inequality holds for all m >= m0."""
    value = kodaira_value(c)
    return max(1, ceil(Fraction(2 * c.g + 1 + len(c.fibers)) / value))


def min_m(c):
    if not kodaira_positive(c):
        raise NotKodairaDimOne(f"Kodaira dimension is not 1 for ({c})")
    cap = search_cap(c)
    last_fail = 0
    for m in range(1, cap):
        if not holds(c, m):
            last_fail = m
    return last_fail + 1


def case_classify(c):
    s = c.chi_t
    if c.g >= 2:
        return "I"
    if c.g == 1:
        if s >= 1:
            return "II-1"
        if c.chi == 0 and c.t == 0:
            return "II-2"
    if c.g == 0:
        if s >= 3:
            return "III-1"
        if s == 2:
            return "III-2"
        if c.chi == 1 and c.t == 0:
            return "III-3"
    raise Unclassifiable(f"no case matches ({c})")


@dataclass(frozen=True)
class RuleSet:
    """Realizability rules; each rule is a named predicate rejecting configs."""
    iii2_exclusion: bool = True

    def admissible(self, c):
        return not (self.iii2_exclusion and self.iii2_excluded(c))

    @staticmethod
    def iii2_excluded(c):
        return (c.p == 2 and c.g == 0 and c.chi_t == 2
                and c.n_tame == 0 and c.n_wild == 1)

    def to_json(self):
        return {"iii2_exclusion": self.iii2_exclusion}


@dataclass(frozen=True)
class Caps:
    max_g: int = 3
    max_chi_t: int = 5
    max_fibers: int = 6

    @classmethod
    def parse(cls, text):
        values = {}
        names = {"g": "max_g", "chit": "max_chi_t", "fibers": "max_fibers"}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, sep, val = part.partition("=")
            if not sep or key.strip() not in names:
                raise ValueError(f"bad cap {part!r}; expected g=.., chit=.., fibers=..")
            n = int(val)
            if n < 0:
                raise ValueError("caps must be non-negative")
            values[names[key.strip()]] = n
        return cls(**values)

    def to_json(self):
        return {"g": self.max_g, "chi_t": self.max_chi_t, "fibers": self.max_fibers}


def fiber_types(p):
    return [Fiber(p, p - 1, "tame")] + [Fiber(p, a, "wild") for a in range(p)]


def _configs_for_genus(p, g, rules, caps):
    out = []
    types = fiber_types(p)
    lo = chi_lower_bound(g)
    for chi in range(lo, caps.max_chi_t + 1):
        for t in range(0, caps.max_chi_t - chi + 1):
            for n in range(caps.max_fibers + 1):
                for combo in combinations_with_replacement(types, n):
                    if sum(1 for f in combo if f.kind == "wild") > t:
                        continue
                    c = FibrationConfig(p, g, chi, t, combo)
                    if kodaira_positive(c) and rules.admissible(c):
                        out.append(c)
    return out


def enumerate_configs(p, rules=RuleSet(), caps=Caps()):
    """Admissible Kodaira-dimension-1 configs within the caps, in a fixed order."""
    if p not in (2, 3):
        raise InvalidConfig(f"p = {p} is not 2 or 3")
    out = []
    for g in range(caps.max_g + 1):
        out.extend(_configs_for_genus(p, g, rules, caps))
    return sorted(out, key=FibrationConfig.key)


@dataclass
class CaseResult:
    max_min_m: int
    witness: FibrationConfig
    count: int = 0


@dataclass
class BoundReport:
    p: int
    rules: RuleSet
    caps: Caps
    per_case: dict
    global_M: int
    witness: FibrationConfig
    tail_bounds: list = dc_field(default_factory=list)
    certified: bool = True
    notes: list = dc_field(default_factory=list)

    def to_json(self):
        return {
            "p": self.p,
            "rules": self.rules.to_json(),
            "caps": self.caps.to_json(),
            "per_case": {k: {"max_min_m": v.max_min_m, "witness": v.witness.to_json(),
                             "configs": v.count}
                         for k, v in self.per_case.items()},
            "global_M": self.global_M,
            "witness": self.witness.to_json() if self.witness else None,
            "tail_bounds": self.tail_bounds,
            "certified": self.certified,
            "notes": self.notes,
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def table(self):
        lines = [f"p = {self.p}  caps: g <= {self.caps.max_g}, chi+t <= {self.caps.max_chi_t}, "
                 f"fibers <= {self.caps.max_fibers}  III-2 exclusion: "
                 f"{'on' if self.rules.iii2_exclusion else 'off'}",
                 f"{'case':<7} {'max min_m':>9}  witness"]
        for label in CASES:
            r = self.per_case.get(label)
            if r is None:
                lines.append(f"{label:<7} {'-':>9}  (no admissible config)")
            else:
                lines.append(f"{label:<7} {r.max_min_m:>9}  {r.witness}")
        lines.append(f"global M = {self.global_M}  witness: {self.witness}")
        lines.append("tail: " + ("certified" if self.certified else "NOT certified (cap-limited)"))
        for b in self.tail_bounds:
            bound = "no bound" if b["bound"] is None else f"min_m <= {b['bound']}"
            lines.append(f"  {b['region']}: {bound}")
        lines.extend(self.notes)
        return "\n".join(lines)


def _threads():
    try:
        n = int(os.environ.get("WORKBENCH_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _reduce(results, chunk):
    for c, value in chunk:
        label = case_classify(c)
        cur = results.get(label)
        if cur is None:
            results[label] = CaseResult(value, c, 1)
            continue
        cur.count += 1
        if value > cur.max_min_m or (value == cur.max_min_m and c.key() < cur.witness.key()):
            cur.max_min_m, cur.witness = value, c


def _evaluate_genus(p, g, rules, caps):
    return [(c, min_m(c)) for c in _configs_for_genus(p, g, rules, caps)]


def _threshold_with_tame(p, g, s, k):
    """min_m of a virtual config with k tame fibers, or None if not of Kodaira dimension 1."""
    coeff = 2 * g - 2 + s
    value = Fraction(coeff) + k * Fraction(p - 1, p)
    if value <= 0:
        return None
    cap = max(1, ceil(Fraction(2 * g + 1 + k) / value))
    last_fail = 0
    for m in range(1, cap):
        if m * coeff + k * ((m * (p - 1)) // p) < 2 * g + 1:
            last_fail = m
    return last_fail + 1


def tail_bounds(p, caps):
    """Upper bounds for min_m on every config outside the caps."""
    bounds = []
    G1 = max(caps.max_g + 1, 2)
    # g >= G1: 2g - 2 + chi + t >= 5(g - 1)/3 and fibers contribute >= 0
    bounds.append({"region": f"g >= {G1}",
                   "bound": ceil(Fraction(3 * (2 * G1 + 1), 5 * G1 - 5))})
    S = caps.max_chi_t
    for g in range(caps.max_g + 1):
        denom = 2 * g - 1 + S
        bound = ceil(Fraction(2 * g + 1, denom)) if denom > 0 else None
        bounds.append({"region": f"g = {g}, chi+t > {S}", "bound": bound})
    F = caps.max_fibers
    for g in range(caps.max_g + 1):
        worst = 0
        for s in range(chi_lower_bound(g), S + 1):
            t_max = s - chi_lower_bound(g)
            k = F + 1 - t_max
            b = _threshold_with_tame(p, g, s, k) if k > 0 else None
            if b is None:
                worst = None
                break
            worst = max(worst, b)
        bounds.append({"region": f"g = {g}, chi+t <= {S}, more than {F} fibers", "bound": worst})
    return bounds


EPISTEMIC_NOTE = ("note: the maximum is an upper bound over admissible configurations; "
                  "that it is attained needs a surface realizing the witness.")


def global_bound(p, rules=RuleSet(), caps=Caps(), threads=None):
    if p not in (2, 3):
        raise InvalidConfig(f"p = {p} is not 2 or 3")
    threads = threads or _threads()
    genera = list(range(caps.max_g + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda g: _evaluate_genus(p, g, rules, caps), genera))
    else:
        chunks = [_evaluate_genus(p, g, rules, caps) for g in genera]
    results = {}
    for chunk in chunks:
        _reduce(results, chunk)
    per_case = {label: results[label] for label in CASES if label in results}
    best = None
    for r in per_case.values():
        if best is None or r.max_min_m > best.max_min_m or (
                r.max_min_m == best.max_min_m and r.witness.key() < best.witness.key()):
            best = r
    M = best.max_min_m if best else 0
    witness = best.witness if best else None
    bounds = tail_bounds(p, caps)
    certified = all(b["bound"] is not None and b["bound"] <= M for b in bounds)
    report = BoundReport(p, rules, caps, per_case, M, witness, bounds, certified,
                         [EPISTEMIC_NOTE])
    if not certified:
        bad = [b["region"] for b in bounds if b["bound"] is None or b["bound"] > M]
        raise CapsInsufficient("caps do not certify the tail: " + "; ".join(bad), report)
    return report
