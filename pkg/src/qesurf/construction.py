"""Replayable construction scripts.

A script is a JSON document ``{"format": "qesurf-script", "version": 1,
"steps": [{"op": ..., "args": {...}}, ...]}``.  Steps run in order against a
shared state (atlas, vector field, lattice models); each step either passes,
recording the values it produced, or fails and halts the run.
"""

import json
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path

from . import derivation as dv
from . import lattice as lt
from .atlas import Atlas, SurfacePoint, blow_up
from .errors import WorkbenchError
from .solver import Fiber, FibrationConfig, holds, min_m

SCRIPT_FORMAT = "qesurf-script"


class CheckFailed(WorkbenchError):
    """A scripted expectation did not hold."""


@dataclass
class State:
    base_dir: Path = None
    atlas: Atlas = None
    base_atlas: Atlas = None
    D: dv.Derivation = None
    divisor: dict = None
    integrality: dict = dc_field(default_factory=dict)
    model: lt.SurfaceModel = None
    base_model: lt.SurfaceModel = None
    up_model: lt.SurfaceModel = None
    quotient: lt.SurfaceModel = None
    quotient_spec: lt.QuotientSpec = None
    chi: int = None
    config: FibrationConfig = None


@dataclass
class StepResult:
    index: int
    op: str
    status: str
    values: dict = dc_field(default_factory=dict)
    error: str = None

    def to_json(self):
        out = {"step": self.index, "op": self.op, "status": self.status, "values": self.values}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class Report:
    steps: list
    passed: bool

    def to_json(self):
        return {"passed": self.passed, "steps": [s.to_json() for s in self.steps]}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def text(self):
        lines = []
        for s in self.steps:
            line = f"[{s.index:2d}] {s.op:<26} {s.status.upper()}"
            if s.error:
                line += f"  {s.error}"
            lines.append(line)
            for k, v in s.values.items():
                lines.append(f"       {k}: {_fmt(v)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _expect(label, got, want):
    if got != want:
        raise CheckFailed(f"{label}: expected {want!r}, got {got!r}")


def _point(data):
    return SurfacePoint.from_json(data)


def _elem(state, chart, text):
    return state.atlas.chart(chart).parse(text)


def _D_on(state, chart):
    return state.D if chart == state.D.chart else dv.transport(state.D, state.atlas, chart)


def _resolve(state, name):
    path = Path(name)
    if state.base_dir is not None and (state.base_dir / path).exists():
        return (state.base_dir / path).read_text()
    return resources.files("qesurf.data").joinpath(name).read_text()


# -- ops --------------------------------------------------------------

def op_load_atlas(state, args):
    data = args.get("atlas")
    atlas = Atlas.from_json(data) if data is not None else Atlas.loads(_resolve(state, args["file"]))
    state.atlas = state.base_atlas = atlas
    return {"charts": list(atlas.charts), "curves": list(atlas.curves)}


def op_check_round_trips(state, args):
    bad = []
    names = list(state.atlas.charts)
    for a in names:
        for b in names:
            if a < b:
                tr = state.atlas.transition(a, b)
                if not tr.round_trip_ok(state.atlas.chart(a).field, state.atlas.chart(b).field):
                    bad.append(f"{a}->{b}")
    if bad:
        raise CheckFailed("round trips fail: " + ", ".join(bad))
    return {"pairs": len(names) * (len(names) - 1) // 2}


def op_define_derivation(state, args):
    chart = state.atlas.chart(args["chart"])
    state.D = dv.Derivation.parse(chart.name, chart.field, args["d1"], args["d2"])
    return {"D": str(state.D)}


def op_check_p_closed(state, args):
    gamma = dv.p_closed_witness(state.D)
    if gamma is None:
        raise CheckFailed("the vector field is not p-closed")
    if "expect" in args:
        _expect("witness", gamma, _elem(state, state.D.chart, args["expect"]))
    return {"gamma": str(gamma)}


def op_check_transport(state, args):
    chart = args["chart"]
    Dc = _D_on(state, chart)
    values = {"d1": str(Dc.dx), "d2": str(Dc.dt)}
    for i, form in enumerate(args.get("forms", ())):
        h = _elem(state, chart, form["h"])
        f = _elem(state, chart, form["f"])
        g = _elem(state, chart, form["g"])
        if h * f != Dc.dx or h * g != Dc.dt:
            raise CheckFailed(f"{chart}: display form {i + 1} does not match the transported field "
                              f"(got {Dc})")
    if "factorization" in args:
        fac = dv.factorize(Dc)
        want = args["factorization"]
        for key in ("h", "f", "g"):
            _expect(f"{chart} factor {key}", getattr(fac, key), _elem(state, chart, want[key]))
        values.update(h=str(fac.h), f=str(fac.f), g=str(fac.g), coprime=fac.coprime)
    return values


def op_check_closure_identities(state, args):
    out = {}
    for chart in args["charts"]:
        report = dv.closure_identities_check(_D_on(state, chart), chart)
        for entry in report:
            if entry["status"] == "fail":
                raise CheckFailed(f"{chart}: {entry['check']} fails ({entry['details']})")
        out[chart] = [e["status"] for e in report]
    return out


def op_check_singular_points(state, args):
    atlas = state.atlas
    per_chart = {}
    for chart, pts in args.get("per_chart", {}).items():
        got = dv.isolated_singular_points(state.D, atlas, chart)
        got_pts = sorted(s.point.coords for s in got)
        want = sorted(_point(p).coords for p in pts)
        _expect(f"singular points on {chart}", got_pts, want)
        per_chart[chart] = [str(s.point) for s in got]
    found = dv.isolated_singular_points(state.D, atlas)
    if "distinct" in args:
        _expect("number of distinct singular points", len(found), args["distinct"])
    for a, b in args.get("identified", ()):
        if not atlas.same_point(_point(a), _point(b)):
            raise CheckFailed(f"{_point(a)} and {_point(b)} are not the same point")
    mults = {str(s.point): s.multiplicity for s in found}
    return {"per_chart": per_chart, "multiplicities": mults,
            "total": sum(mults.values())}


def op_check_degree(state, args):
    """Sum of local degrees equals c2 + K.(D) + (D)^2 on the model of the current atlas."""
    m = state.model
    divisor = dv.divisor_of_D(state.D, state.atlas, [b for b in m.basis], check_singular=False)
    v = m.vec(divisor)
    expected = m.c2 + m.dot(m.K, v) + m.dot(v, v)
    found = dv.isolated_singular_points(state.D, state.atlas)
    total = sum(s.multiplicity for s in found)
    _expect("degree of the zero cycle", total, expected)
    if "expect" in args:
        _expect("degree of the zero cycle", total, args["expect"])
    return {"sum_of_local_degrees": total, "c2 + K.(D) + (D)^2": expected}


def op_blow_up(state, args):
    atlas = state.atlas
    if "center" in args:
        center = _point(args["center"])
    else:
        curve = args["singular_point_on"]
        found = [s.point for s in dv.isolated_singular_points(state.D, atlas)
                 if atlas.on_curve(s.point, curve)]
        if len(found) != 1:
            raise CheckFailed(f"expected one singular point on {curve}, found {len(found)}")
        center = found[0]
    state.atlas = blow_up(atlas, center, args["name"])
    record = state.atlas.history[-1]
    incid = {k: v for k, v in record.incidences.items() if v}
    if state.model is not None:
        state.model = lt.blow_up_model(state.model, incid, args["name"])
    return {"center": str(center), "incidences": incid}


def op_check_no_singular_points(state, args):
    found = dv.isolated_singular_points(state.D, state.atlas)
    if found:
        raise CheckFailed("singular points remain: " + "; ".join(str(s.point) for s in found))
    return {"singular_points": 0}


def op_check_integrality(state, args):
    out = {}
    for name in args.get("integral", ()) + args.get("non_integral", ()):
        out[name] = dv.is_integral(state.D, state.atlas, name)
    for name in args.get("integral", ()):
        if not out[name]:
            raise CheckFailed(f"{name} should be integral")
    for name in args.get("non_integral", ()):
        if out[name]:
            raise CheckFailed(f"{name} should be non-integral")
    state.integrality.update(out)
    return {k: ("integral" if v else "non-integral") for k, v in out.items()}


def op_check_cusps(state, args):
    pts = dv.cuspidal_points(state.D, state.atlas, args["curve"])
    if "count" in args:
        _expect(f"cuspidal points on {args['curve']}", len(pts), args["count"])
    for other in args.get("on", ()):
        for pt in pts:
            if not state.atlas.on_curve(pt, other):
                raise CheckFailed(f"cusp {pt} is not on {other}")
    return {"points": [str(p) for p in pts]}


def op_check_fiber(state, args):
    chart = args["chart"]
    f = state.atlas.chart(chart).parse(args["function"])
    orders = {}
    for name, cv in state.atlas.curves.items():
        if cv.kind != "curve":
            continue
        loc_chart = next(iter(cv.loci))
        fc = state.atlas.transition(chart, loc_chart).push(f) if loc_chart != chart else f
        k = state.atlas.vanishing_order(fc, cv, loc_chart)
        if k > 0:
            orders[name] = k
    _expect(f"zeros of {args['function']} along named curves", orders, args["expect"])
    return {"orders": orders}


def op_divisor(state, args):
    d = dv.divisor_of_D(state.D, state.atlas)
    d = {k: v for k, v in d.items() if v or k in args.get("expect", {})}
    if "expect" in args:
        _expect("divisor of D", {k: v for k, v in d.items() if v},
                {k: v for k, v in args["expect"].items() if v})
    state.divisor = d
    return {"divisor": d}


def op_base_model(state, args):
    state.model = state.base_model = lt.product_model(
        args.get("section", "C_inf"), tuple(args.get("fibers", ("F_0", "F_inf"))),
        args.get("base_genus", 1))
    return {"basis": list(state.model.basis), "K": state.model.fmt(state.model.K)}


def _check_model(m, args, label):
    for name, val in args.get("self", {}).items():
        _expect(f"{label}: {name}^2", m.dot(name, name), val)
    for a, b, val in args.get("pairs", ()):
        _expect(f"{label}: ({a}, {b})", m.dot(a, b), val)
    if "K" in args:
        _expect(f"{label}: K", m.as_dict(m.K), {k: v for k, v in args["K"].items() if v})
    if "c2" in args:
        _expect(f"{label}: c2", m.c2, args["c2"])
    if "fiber" in args:
        _expect(f"{label}: fiber class", m.as_dict(m.fibration.fiber),
                {k: v for k, v in args["fiber"].items() if v})


def op_check_model(state, args):
    m = state.model
    _check_model(m, args, "model")
    return {"basis": list(m.basis), "form": [list(r) for r in m.form],
            "K": m.fmt(m.K), "c2": m.c2,
            "fiber": m.fmt(m.fibration.fiber) if m.fibration else None}


def op_quotient(state, args):
    m = state.model
    p = args.get("p", 2)
    flags = {}
    for b in m.basis:
        if b not in state.integrality:
            state.integrality[b] = dv.is_integral(state.D, state.atlas, b)
        flags[b] = "integral" if state.integrality[b] else "non-integral"
    spec = lt.QuotientSpec(p, flags)
    divisor = m.vec({k: v for k, v in (state.divisor or {}).items() if k in m.basis})
    pulled, K = lt.canonical_descent(m, divisor, spec)
    state.up_model = m
    state.quotient_spec = spec
    state.model = state.quotient = lt.quotient_model(m, spec, K)
    if "expect_pullback_K" in args:
        _expect("pi^* K of the quotient", m.as_dict(pulled), args["expect_pullback_K"])
    if "expect_K" in args:
        _expect("K of the quotient", state.model.as_dict(K), args["expect_K"])
    return {"flags": flags, "pullback_K": m.fmt(pulled), "K": state.model.fmt(K)}


def op_check_pullback_identity(state, args):
    """(pi^* A, pi^* B) = p (A, B) for every pair of classes."""
    up, q, spec = state.up_model, state.quotient, state.quotient_spec
    for a in q.basis:
        for b in q.basis:
            pa = lt.pullback_vector(spec, q.basis, q.unit(a))
            pb = lt.pullback_vector(spec, q.basis, q.unit(b))
            if up.dot(pa, pb) != spec.p * q.dot(a, b):
                raise CheckFailed(f"pullback identity fails for ({a}, {b})")
    return {"pairs": len(q.basis) ** 2}


def op_blow_down(state, args):
    m = state.model
    for name in args["classes"]:
        m = lt.blow_down(m, name)
    state.model = m
    return {"basis": list(m.basis), "K": m.fmt(m.K), "c2": m.c2}


def op_check_contraction_pullback(state, args):
    x, q = state.model, state.quotient
    eta_K = lt.pullback_chain(x, x.K, q)
    diff = tuple(a - b for a, b in zip(q.K, eta_K))
    if "expect_eta_K" in args:
        _expect("eta^* K", q.as_dict(eta_K), args["expect_eta_K"])
    if "expect_difference" in args:
        _expect("K - eta^* K", q.as_dict(diff), args["expect_difference"])
    out = {"eta_K": q.fmt(eta_K), "difference": q.fmt(diff)}
    if "expect_pi_eta_K" in args:
        pulled = lt.pullback_vector(state.quotient_spec, q.basis, eta_K)
        _expect("pi^* eta^* K", state.up_model.as_dict(pulled), args["expect_pi_eta_K"])
        out["pi_eta_K"] = state.up_model.fmt(pulled)
    return out


def _vec(m, spec):
    if spec == "K":
        return m.K
    if isinstance(spec, str):
        return m.unit(spec)
    return m.vec(spec)


def op_check_equivalence(state, args):
    m = state.model
    got = lt.check_equivalence(m, _vec(m, args["lhs"]), _vec(m, args["rhs"]))
    _expect(f"{args['lhs']} ~ {args['rhs']}", got, args.get("expect", True))
    return {"numerically_equivalent": got}


def op_check_intersection(state, args):
    m = state.model
    got = m.dot(_vec(m, args["a"]), _vec(m, args["b"]))
    _expect(f"({args['a']}, {args['b']})", got, args["expect"])
    return {"value": got}


def op_noether(state, args):
    r = lt.genus_and_noether(state.model)
    state.chi = r.chi
    for key in ("K2", "c2", "chi"):
        if key in args:
            _expect(key, getattr(r, key), args[key])
    for name, g in args.get("genus", {}).items():
        _expect(f"genus of {name}", state.model.genus(name), g)
    if "fiber_genus" in args:
        _expect("genus of a fiber", state.model.genus(state.model.fibration.fiber), args["fiber_genus"])
    return {"K2": r.K2, "c2": r.c2, "chi": r.chi,
            "genera": {k: str(v) for k, v in r.genera.items()}}


def op_multiple_fiber(state, args):
    m = state.model
    p = args.get("p", 2)
    a, deg = lt.multiple_fiber_coefficient(m, args["component"], args["test_curve"], p)
    if "expect_a" in args:
        _expect("a", a, args["expect_a"])
    if "expect_deg_L" in args:
        _expect("deg L", deg, args["expect_deg_L"])
    g = m.fibration.base_genus
    # K = phi^*(K_B - f) + a F with deg L = 2g - 2 - deg f = 2g - 2 + chi + t
    t = deg - (2 * g - 2) - state.chi
    kind = "tame" if a == p - 1 else "wild"
    state.config = FibrationConfig(p, g, state.chi, t, (Fiber(p, a, kind),))
    return {"a": a, "deg_L": deg, "config": state.config.to_json()}


def op_check_min_m(state, args):
    c = state.config
    value = min_m(c)
    _expect("min_m", value, args["expect"])
    if value > 1 and holds(c, value - 1):
        raise CheckFailed(f"(**) unexpectedly holds at m = {value - 1}")
    return {"min_m": value, "fails_at": value - 1}


OPS = {
    "load_atlas": op_load_atlas,
    "check_round_trips": op_check_round_trips,
    "define_derivation": op_define_derivation,
    "check_p_closed": op_check_p_closed,
    "check_transport": op_check_transport,
    "check_closure_identities": op_check_closure_identities,
    "check_singular_points": op_check_singular_points,
    "check_degree": op_check_degree,
    "blow_up": op_blow_up,
    "check_no_singular_points": op_check_no_singular_points,
    "check_integrality": op_check_integrality,
    "check_cusps": op_check_cusps,
    "check_fiber": op_check_fiber,
    "divisor": op_divisor,
    "base_model": op_base_model,
    "check_model": op_check_model,
    "quotient": op_quotient,
    "check_pullback_identity": op_check_pullback_identity,
    "blow_down": op_blow_down,
    "check_contraction_pullback": op_check_contraction_pullback,
    "check_equivalence": op_check_equivalence,
    "check_intersection": op_check_intersection,
    "noether": op_noether,
    "multiple_fiber": op_multiple_fiber,
    "check_min_m": op_check_min_m,
}


# state each op reads; checked before the op runs
REQUIRES = {
    "check_round_trips": ("atlas",),
    "define_derivation": ("atlas",),
    "check_p_closed": ("D",),
    "check_transport": ("atlas", "D"),
    "check_closure_identities": ("atlas", "D"),
    "check_singular_points": ("atlas", "D"),
    "check_degree": ("atlas", "D", "model"),
    "blow_up": ("atlas",),
    "check_no_singular_points": ("atlas", "D"),
    "check_integrality": ("atlas", "D"),
    "check_cusps": ("atlas", "D"),
    "check_fiber": ("atlas",),
    "divisor": ("atlas", "D"),
    "check_model": ("model",),
    "quotient": ("atlas", "D", "model"),
    "check_pullback_identity": ("quotient",),
    "blow_down": ("model",),
    "check_contraction_pullback": ("quotient", "model"),
    "check_equivalence": ("model",),
    "check_intersection": ("model",),
    "noether": ("model",),
    "multiple_fiber": ("model", "chi"),
    "check_min_m": ("config",),
}


def _check_requirements(state, op):
    missing = [k for k in REQUIRES.get(op, ()) if getattr(state, k) is None]
    if missing:
        raise CheckFailed(f"{op} needs {', '.join(missing)}, which no earlier step produced")


def validate_script(data):
    if not isinstance(data, dict) or data.get("format") != SCRIPT_FORMAT:
        raise ValueError(f"not a {SCRIPT_FORMAT} document")
    if data.get("version") != 1:
        raise ValueError(f"unsupported script version {data.get('version')!r}")
    steps = data.get("steps")
    if not isinstance(steps, list):
        raise ValueError("steps must be a list")
    for i, step in enumerate(steps):
        if not isinstance(step, dict) or step.get("op") not in OPS:
            raise ValueError(f"step {i}: unknown op {step.get('op') if isinstance(step, dict) else step!r}")
    return steps


def run_script(data, base_dir=None):
    steps = validate_script(data)
    state = State(base_dir=Path(base_dir) if base_dir else None)
    results = []
    for i, step in enumerate(steps):
        op = step["op"]
        try:
            _check_requirements(state, op)
            values = OPS[op](state, step.get("args", {}))
            results.append(StepResult(i, op, "pass", values or {}))
        except (WorkbenchError, KeyError, ValueError, ArithmeticError) as exc:
            results.append(StepResult(i, op, "fail", {}, f"{type(exc).__name__}: {exc}"))
            return Report(results, False)
    return Report(results, True)


def default_script():
    return json.loads(resources.files("qesurf.data").joinpath("construction_v1.json").read_text())
