"""Surfaces as glued affine charts with tracked curves and point blow-ups.

Every chart stores two maps to a fixed root chart: ``to_root`` writes the root
variables as functions on the chart and ``from_root`` writes the chart
variables as functions on the root chart.  Transitions between any two charts
are composed from these.

A chart produced by a blow-up covers only part of its affine model: points
with ``gen = gen(center) + 1`` are dropped (they map to the other branch of
the center's fiber), and a chart forgets every point that is later blown up.
"""

import json
from dataclasses import dataclass, field as dc_field, replace
from itertools import product

from .algebra import FunctionField, Poly, parse_poly, substitute
from .errors import (CenterNotVisible, CenterOnInvalidLocus, ChartMismatch,
                     CurveNotVisible, UnsupportedLocalStructure, ZeroFunction)
from .local import LocalPoint, NotRegular, line_roots, line_valuation, other_coord


@dataclass(frozen=True)
class SurfacePoint:
    chart: str
    coords: tuple  # ((name, value), ...) including the generator

    @classmethod
    def make(cls, chart, values):
        return cls(chart, tuple(sorted((k, int(v)) for k, v in values.items())))

    @property
    def values(self):
        return dict(self.coords)

    def to_json(self):
        return {"chart": self.chart, "coords": self.values}

    @classmethod
    def from_json(cls, data):
        return cls.make(data["chart"], data["coords"])

    def __str__(self):
        names = ", ".join(n for n, _ in self.coords)
        vals = ", ".join(str(v) for _, v in self.coords)
        return f"{self.chart}: ({names}) = ({vals})"


@dataclass(frozen=True)
class Chart:
    name: str
    field: FunctionField
    to_root: dict
    from_root: dict
    parent: str = None
    parent_map: dict = None
    center: SurfacePoint = None
    required_nonzero: tuple = ()
    removed: tuple = ()

    @property
    def coords(self):
        return self.field.coords

    @property
    def names(self):
        return self.field.names

    def parse(self, text):
        return self.field.parse(text)

    def satisfies_relation(self, values):
        f = self.field
        if f.gen is None:
            return True
        y = values[f.gen]
        return (y * y + y - f.relation.evaluate(values)) % f.p == 0


@dataclass(frozen=True)
class CurveLocus:
    """The curve inside one chart: the line {coord = value}, on one branch if it splits."""
    coord: str
    value: int
    branch: Poly = None

    def equation(self, chart):
        c = chart.field.var(self.coord)
        return c - self.value if self.value else c


@dataclass(frozen=True)
class NamedCurve:
    name: str
    loci: dict = dc_field(default_factory=dict)
    kind: str = "curve"  # or "generic_fiber"
    provenance: tuple = ()

    def visible_in(self, chart):
        return chart in self.loci


@dataclass(frozen=True)
class Transition:
    """``forward`` carries source functions to the target, ``backward`` the reverse."""
    source: str
    target: str
    forward: dict
    backward: dict

    def push(self, f):
        return substitute(f, self.forward)

    def pull(self, f):
        return substitute(f, self.backward)

    def round_trip_ok(self, source_field, target_field):
        ok = all(self.pull(self.push(source_field.var(n))) == source_field.var(n)
                 for n in source_field.names)
        return ok and all(self.push(self.pull(target_field.var(n))) == target_field.var(n)
                          for n in target_field.names)


@dataclass(frozen=True)
class BlowUpRecord:
    name: str
    center: SurfacePoint
    charts: tuple
    incidences: dict  # curve name -> multiplicity of the curve at the center


class Atlas:
    """Immutable collection of charts and named curves."""

    def __init__(self, charts, curves, history=()):
        self.charts = dict(charts)
        self.curves = dict(curves)
        self.history = tuple(history)
        self.root = next(iter(self.charts))
        self._transitions = {}

    @property
    def p(self):
        return self.charts[self.root].field.p

    def chart(self, name):
        try:
            return self.charts[name]
        except KeyError:
            raise ChartMismatch(f"unknown chart {name!r}") from None

    def curve(self, name):
        try:
            return self.curves[name]
        except KeyError:
            raise CurveNotVisible(f"unknown curve {name!r}") from None

    # -- transitions --------------------------------------------------
    def transition(self, source, target):
        key = (source, target)
        if key not in self._transitions:
            src, dst = self.chart(source), self.chart(target)
            if source == target:
                fwd = src.field.identity_map()
                bwd = dict(fwd)
            else:
                fwd = {n: substitute(src.from_root[n], dst.to_root) for n in src.names}
                bwd = {n: substitute(dst.from_root[n], src.to_root) for n in dst.names}
            self._transitions[key] = Transition(source, target, fwd, bwd)
        return self._transitions[key]

    # -- points -------------------------------------------------------
    def contains(self, point):
        """Whether the point lies in the domain of its chart."""
        chart = self.chart(point.chart)
        values = point.values
        if set(values) != set(chart.names) or not chart.satisfies_relation(values):
            return False
        if any(point == r for r in chart.removed):
            return False
        for g in chart.required_nonzero:
            if g.value_at(values) == 0:
                return False
        if chart.parent is None:
            return True
        image = self._image_in_parent(chart, values)
        return image == chart.center or self.contains(image)

    def _image_in_parent(self, chart, values):
        parent = self.chart(chart.parent)
        return SurfacePoint.make(parent.name, {n: chart.parent_map[n].value_at(values)
                                               for n in parent.names})

    def chart_points(self, chart_name):
        chart = self.chart(chart_name)
        p = chart.field.p
        out = []
        gens = range(p) if chart.field.gen else [None]
        for vals in product(range(p), repeat=2):
            for y in gens:
                d = dict(zip(chart.coords, vals))
                if y is not None:
                    d[chart.field.gen] = y
                pt = SurfacePoint.make(chart_name, d)
                if self.contains(pt):
                    out.append(pt)
        return out

    def locate(self, point, target):
        """The same point in another chart, or None if it lies outside that chart."""
        if point.chart == target:
            return point if self.contains(point) else None
        trans = self.transition(target, point.chart)
        lp = LocalPoint(self.chart(point.chart).field, point.values)
        values = {}
        for n, f in trans.forward.items():
            if not lp.is_regular(f):
                return None
            values[n] = lp.value(f)
        out = SurfacePoint.make(target, values)
        return out if self.contains(out) else None

    def same_point(self, a, b):
        return self.locate(a, b.chart) == b

    def unique_points(self, points):
        kept = []
        for pt in points:
            if not any(self.same_point(pt, k) for k in kept):
                kept.append(pt)
        return kept

    def all_points(self):
        return self.unique_points([pt for name in self.charts for pt in self.chart_points(name)])

    # -- curves -------------------------------------------------------
    def on_curve(self, point, curve):
        curve = self.curve(curve) if isinstance(curve, str) else curve
        for chart_name, locus in curve.loci.items():
            pt = self.locate(point, chart_name)
            if pt is not None and _point_on_locus(pt.values, locus, self.chart(chart_name)):
                return True
        return False

    def curve_points(self, curve):
        curve = self.curve(curve) if isinstance(curve, str) else curve
        pts = [pt for chart_name, locus in curve.loci.items()
               for pt in self.chart_points(chart_name)
               if _point_on_locus(pt.values, locus, self.chart(chart_name))]
        return self.unique_points(pts)

    def vanishing_order(self, f, curve, chart_name):
        curve = self.curve(curve) if isinstance(curve, str) else curve
        if f.is_zero():
            raise ZeroFunction("vanishing order of the zero function")
        if curve.kind == "generic_fiber":
            # only finitely many fibers carry zeros or poles of f
            return 0
        if chart_name not in curve.loci:
            raise CurveNotVisible(f"{curve.name} is not visible in chart {chart_name}")
        chart = self.chart(chart_name)
        if f.field != chart.field:
            raise ChartMismatch("function does not live on the chart")
        loc = curve.loci[chart_name]
        return line_valuation(f, loc.coord, loc.value, loc.branch)

    # -- serialization ------------------------------------------------
    def to_json(self):
        charts = []
        for c in self.charts.values():
            entry = {
                "name": c.name,
                "p": c.field.p,
                "coords": list(c.coords),
                "generator": c.field.gen,
                "relation": str(c.field.relation) if c.field.gen else None,
                "to_root": {n: str(v) for n, v in c.to_root.items()},
                "from_root": {n: str(v) for n, v in c.from_root.items()},
            }
            if c.parent is not None:
                entry["parent"] = c.parent
                entry["parent_map"] = {n: str(v) for n, v in c.parent_map.items()}
                entry["center"] = c.center.to_json()
            if c.required_nonzero:
                entry["required_nonzero"] = [str(g) for g in c.required_nonzero]
            if c.removed:
                entry["removed"] = [pt.to_json() for pt in c.removed]
            charts.append(entry)
        curves = []
        for cv in self.curves.values():
            loci = []
            for chart_name, loc in cv.loci.items():
                loci.append({"chart": chart_name, "coord": loc.coord, "value": loc.value,
                             "branch": None if loc.branch is None else str(loc.branch),
                             "equation": str(loc.equation(self.chart(chart_name)))})
            curves.append({"name": cv.name, "kind": cv.kind,
                           "provenance": list(cv.provenance), "loci": loci})
        history = [{"name": h.name, "center": h.center.to_json(), "charts": list(h.charts),
                    "incidences": dict(h.incidences)} for h in self.history]
        return {"format": "qesurf-atlas", "version": 1, "charts": charts,
                "curves": curves, "history": history}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data):
        if data.get("format") != "qesurf-atlas":
            raise ValueError("not an atlas document")
        fields = {}
        for entry in data["charts"]:
            fields[entry["name"]] = FunctionField(entry["p"], entry["coords"],
                                                  entry.get("generator"), entry.get("relation"))
        root_field = fields[data["charts"][0]["name"]]
        charts = {}
        for entry in data["charts"]:
            name = entry["name"]
            fld = fields[name]
            kwargs = {}
            if entry.get("parent"):
                kwargs["parent"] = entry["parent"]
                kwargs["parent_map"] = {n: fld.parse(s) for n, s in entry["parent_map"].items()}
                kwargs["center"] = SurfacePoint.from_json(entry["center"])
            kwargs["required_nonzero"] = tuple(fld.parse(s) for s in entry.get("required_nonzero", ()))
            kwargs["removed"] = tuple(SurfacePoint.from_json(d) for d in entry.get("removed", ()))
            charts[name] = Chart(name, fld,
                                 {n: fld.parse(s) for n, s in entry["to_root"].items()},
                                 {n: root_field.parse(s) for n, s in entry["from_root"].items()},
                                 **kwargs)
        curves = {}
        for entry in data["curves"]:
            loci = {}
            for loc in entry.get("loci", ()):
                fld = fields[loc["chart"]]
                branch = loc.get("branch")
                if branch is not None:
                    branch = parse_poly(branch, fld.p, [other_coord(fld, loc["coord"])])
                loci[loc["chart"]] = CurveLocus(loc["coord"], int(loc["value"]), branch)
            curves[entry["name"]] = NamedCurve(entry["name"], loci, entry.get("kind", "curve"),
                                               tuple(entry.get("provenance", ())))
        history = tuple(BlowUpRecord(h["name"], SurfacePoint.from_json(h["center"]),
                                     tuple(h["charts"]), dict(h["incidences"]))
                        for h in data.get("history", ()))
        atlas = cls(charts, curves, history)
        atlas.validate()
        return atlas

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))

    def validate(self):
        """Check that every chart's maps respect the relations and invert each other."""
        root = self.chart(self.root)
        for c in self.charts.values():
            root.field.check_map(c.to_root, c.field)
            c.field.check_map(c.from_root, root.field)
            for n in c.names:
                if substitute(c.from_root[n], c.to_root) != c.field.var(n):
                    raise ChartMismatch(f"chart {c.name}: maps to the root chart do not invert")
            if c.parent is not None:
                self.chart(c.parent).field.check_map(c.parent_map, c.field)
            for cv in self.curves.values():
                loc = cv.loci.get(c.name)
                if loc is not None and loc.branch is not None:
                    roots = line_roots(c.field, loc.coord, loc.value)
                    if roots is None or loc.branch not in roots:
                        raise ChartMismatch(f"curve {cv.name}: branch is not a root in {c.name}")


def _point_on_locus(values, locus, chart):
    if values[locus.coord] % chart.field.p != locus.value % chart.field.p:
        return False
    if locus.branch is None:
        return True
    other = other_coord(chart.field, locus.coord)
    return locus.branch.evaluate({other: values[other]}) == values[chart.field.gen]


def _exceptional_power(poly, var):
    """Split poly = var^k * rest with var not dividing rest."""
    k = min(dict(m).get(var, 0) for m in poly.terms)
    if k == 0:
        return 0, poly
    out = {}
    for m, c in poly.terms.items():
        d = dict(m)
        if d[var] == k:
            del d[var]
        else:
            d[var] -= k
        out[tuple(sorted(d.items()))] = c
    return k, Poly(poly.p, out)


def _as_line(poly, coords):
    """(coord, value) if poly is a nonzero multiple of (coord - value), else None."""
    if poly.is_zero() or poly.is_constant():
        return None
    vs = poly.variables
    if len(vs) != 1 or poly.degree() != 1:
        return None
    (v,) = vs
    p = poly.p
    lead = poly.coefficients(v)[1].constant_value()
    const = poly.coefficients(v).get(0)
    c0 = const.constant_value() if const is not None else 0
    value = (-c0 * pow(lead, p - 2, p)) % p
    return v, value


def blow_up(atlas, center, name, coord_names=None):
    """Blow up the surface at an F_p-point; returns a new Atlas."""
    if center.chart not in atlas.charts:
        raise CenterNotVisible(f"no chart named {center.chart!r}")
    chart = atlas.chart(center.chart)
    values = center.values
    if set(values) != set(chart.names):
        raise CenterOnInvalidLocus("center coordinates do not match the chart")
    if not chart.satisfies_relation(values):
        raise CenterOnInvalidLocus(f"{center} does not satisfy the chart relation")
    if not atlas.contains(center):
        raise CenterNotVisible(f"{center} lies outside the domain of its chart")
    if name in atlas.curves:
        raise ValueError(f"curve name {name!r} already used")
    fld = chart.field
    p = fld.p
    c1, c2 = fld.coords
    x0, t0 = values[c1], values[c2]
    gen = fld.gen
    y0 = values[gen] if gen else None
    if coord_names is None:
        coord_names = ((f"u{name}", f"v{name}"), (f"u{name}b", f"v{name}b"))
    (ua, va), (ub, vb) = coord_names

    new_charts = {}
    specs = []
    for suffix, (a, b) in (("a", (ua, va)), ("b", (ub, vb))):
        A, B = Poly.var(p, a), Poly.var(p, b)
        if suffix == "a":
            img = {c1: A + x0, c2: A * B + t0}
            exc = a
        else:
            img = {c1: A * B + x0, c2: B + t0}
            exc = b
        relation = fld.relation.substitute(img) if gen else None
        nf = FunctionField(p, (a, b), gen, relation)
        parent_map = {c: nf.from_poly(img[c]) for c in (c1, c2)}
        if gen:
            parent_map[gen] = nf.var(gen)
        fld.check_map(parent_map, nf)
        # new coordinates written on the parent chart
        dx = fld.var(c1) - x0
        dt = fld.var(c2) - t0
        if suffix == "a":
            inverse = {a: dx, b: dt / dx}
        else:
            inverse = {a: dx / dt, b: dt}
        if gen:
            inverse[gen] = fld.var(gen)
        to_root = {n: substitute(chart.to_root[n], parent_map) for n in chart.to_root}
        from_root = {n: substitute(inverse[n], chart.from_root) for n in nf.names}
        required = ()
        if gen:
            required = (nf.var(gen) - ((-1 - y0) % p),)
        cname = f"{name}_{suffix}"
        if cname in atlas.charts:
            raise ValueError(f"chart name {cname!r} already used")
        new_charts[cname] = Chart(cname, nf, to_root, from_root, chart.name, parent_map,
                                  center, required, ())
        specs.append((cname, nf, img, exc))

    # forget the center in every chart that contains it
    charts = {}
    for cname, c in atlas.charts.items():
        here = atlas.locate(center, cname)
        charts[cname] = replace(c, removed=c.removed + (here,)) if here is not None else c
    charts.update(new_charts)

    curves = {}
    incidences = {}
    for cv in atlas.curves.values():
        if cv.kind != "curve":
            curves[cv.name] = cv
            continue
        through = atlas.on_curve(center, cv)
        loci = dict(cv.loci)
        incidences[cv.name] = 0
        if through:
            loc = cv.loci.get(chart.name)
            if loc is None:
                raise UnsupportedLocalStructure(
                    f"{cv.name} passes through the center but has no local equation in {chart.name}")
            for cname, nf, img, exc in specs:
                eq = img[loc.coord] - loc.value
                k, rest = _exceptional_power(eq, exc)
                incidences[cv.name] = max(incidences[cv.name], k)
                line = _as_line(rest, nf.coords)
                if line is None:
                    continue
                loci[cname] = _transform_locus(fld, nf, loc, line, img)
        curves[cv.name] = NamedCurve(cv.name, loci, cv.kind, cv.provenance)

    exc_loci = {}
    for cname, nf, img, exc in specs:
        branch = Poly.constant(p, y0) if gen else None
        exc_loci[cname] = CurveLocus(exc, 0, branch)
    curves[name] = NamedCurve(name, exc_loci, "curve", (f"exceptional curve over {center}",))

    record = BlowUpRecord(name, center, tuple(new_charts), incidences)
    out = Atlas(charts, curves, atlas.history + (record,))
    return out


def _transform_locus(old_field, new_field, loc, line, img):
    coord, value = line
    if old_field.gen is None or loc.branch is None:
        roots = line_roots(new_field, coord, value)
        if roots is not None:
            raise UnsupportedLocalStructure("proper transform of an inert line splits")
        return CurveLocus(coord, value, None)
    old_other = other_coord(old_field, loc.coord)
    other_img = img[old_other].substitute({coord: Poly.constant(new_field.p, value)})
    branch = loc.branch.substitute({old_other: other_img})
    roots = line_roots(new_field, coord, value)
    if roots is None or branch not in roots:
        raise UnsupportedLocalStructure("branch of the proper transform is not a root")
    return CurveLocus(coord, value, branch)


def transform_equation(atlas, f, source, target):
    """Write a function on one chart as a function on another."""
    return atlas.transition(source, target).push(f)


def evaluate(atlas, f, point):
    """Value of a function of the point's chart at the point (regular functions only)."""
    lp = LocalPoint(atlas.chart(point.chart).field, point.values)
    if not lp.is_regular(f):
        raise NotRegular(f"{f} has a pole at {point}")
    return lp.value(f)
