"""Structured-text descriptors for spaces, points, regions, functionals and families.

A descriptor is a comma-separated list of ``key=value`` pairs. Values that
contain commas are wrapped in brackets, and list values separate their
items with ``;``::

    kind=spider,legs=3
    f=dist_sq,anchor=[1,2],weight=0.5
    f=sum,terms=[[f=abs];[f=indicator,region=[region=interval,lo=0,hi=1]]]

Wherever a descriptor is expected, a bare word may name an object defined
elsewhere (a config section) or a built-in kind with default parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from . import families as fam
from .functionals import (Busemann, Constant, ConvexFunctional, Distance, DistanceSquared,
                          Lifted, Linear, Max, Sum, indicator_of_set, zero)
from .regions import Ball, Interval, ProductRegion, Region, Segment, Star
from .spaces import (Euclidean, HyperbolicHalfPlane, MetricSpider, Point, ProductSpace, Space,
                     _split_top, point_from_text)
from .verdict import UsageError

SPACE_KINDS = ("euclidean", "halfplane", "spider", "product")
REGION_KINDS = ("interval", "segment", "ball", "star", "product")
FUNCTIONAL_KINDS = ("zero", "const", "abs", "dist", "dist_sq", "linear", "busemann",
                    "indicator", "sum", "max", "lift")
FAMILY_KINDS = ("constant", "shifted_abs", "scaled_abs", "oscillating", "steep_quadratic",
                "moving_anchor", "nested_intervals")


class DescriptorError(UsageError):
    pass


def unbracket(text: str) -> str:
    """Remove one pair of outer brackets, if they match each other."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        return text
    depth = 0
    for i, ch in enumerate(text):
        depth += ch == "["
        depth -= ch == "]"
        if depth == 0 and i < len(text) - 1:
            return text
    return text[1:-1].strip()


def parse_descriptor(text: str) -> dict[str, str]:
    """``"a=1,b=[x,y]"`` -> ``{"a": "1", "b": "x,y"}`` (one bracket level removed)."""
    text = unbracket(text)
    out: dict[str, str] = {}
    if not text:
        return out
    for item in _split_top(text, ","):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or not key:
            raise DescriptorError(f"expected key=value, got {item!r}")
        if key in out:
            raise DescriptorError(f"duplicate key {key!r}")
        out[key] = unbracket(value)
    return out


def split_list(text: str) -> list[str]:
    text = unbracket(text)
    return [unbracket(s) for s in _split_top(text, ";") if s.strip()] if text else []


def is_descriptor(text: str) -> bool:
    return "=" in unbracket(text)


def number(text: str, key: str = "value") -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise DescriptorError(f"bad number {text!r} for {key!r}") from None
    if math.isnan(v):
        raise DescriptorError(f"bad number {text!r} for {key!r}")
    return v


def integer(text: str, key: str = "value") -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise DescriptorError(f"bad integer {text!r} for {key!r}") from None


def numbers(text: str, key: str = "value") -> list[float]:
    return [number(s, key) for s in split_list(text)]


def _need(d: Mapping[str, str], key: str, what: str) -> str:
    if key not in d:
        raise DescriptorError(f"{what} needs key {key!r}")
    return d[key]


def _unknown(kind: str, what: str, valid) -> DescriptorError:
    return DescriptorError(f"unknown {what} {kind!r}; valid: {', '.join(valid)}")


def _extra_keys(d: Mapping[str, str], allowed, what: str):
    bad = sorted(set(d) - set(allowed))
    if bad:
        raise DescriptorError(f"{what} does not take key(s) {', '.join(bad)}")


@dataclass
class Registry:
    """Named objects a descriptor may refer to by a bare word.

    Entries are built lazily from their descriptor text on first use.
    """

    space: Space | None = None
    spaces: dict = field(default_factory=dict)
    regions: dict = field(default_factory=dict)
    functionals: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    _built: dict = field(default_factory=dict)
    _busy: set = field(default_factory=set)

    def lookup(self, table: str, name: str, build: Callable[[str], Any]):
        key = (table, name)
        if key not in self._built:
            if key in self._busy:
                raise DescriptorError(f"circular reference to {name!r}")
            self._busy.add(key)
            try:
                self._built[key] = build(getattr(self, table)[name])
            finally:
                self._busy.discard(key)
        return self._built[key]


# ---------------------------------------------------------------- spaces

def build_space(text: str, reg: Registry | None = None) -> Space:
    reg = reg or Registry()
    if not is_descriptor(text):
        name = unbracket(text)
        if name in reg.spaces:
            return reg.lookup("spaces", name, lambda t: build_space(t, reg))
        text = f"kind={name}"
    d = parse_descriptor(text)
    kind = _need(d, "kind", "space")
    if kind == "euclidean":
        _extra_keys(d, ("kind", "dim"), "euclidean space")
        n = integer(d.get("dim", "1"), "dim")
        if n < 1:
            raise DescriptorError("dim must be >= 1")
        return Euclidean(n)
    if kind == "halfplane":
        _extra_keys(d, ("kind",), "halfplane space")
        return HyperbolicHalfPlane()
    if kind == "spider":
        _extra_keys(d, ("kind", "legs"), "spider space")
        k = integer(d.get("legs", "3"), "legs")
        if k < 2:
            raise DescriptorError("legs must be >= 2")
        return MetricSpider(k)
    if kind == "product":
        _extra_keys(d, ("kind", "factors"), "product space")
        items = split_list(_need(d, "factors", "product space"))
        if not items:
            raise DescriptorError("product space needs at least one factor")
        return ProductSpace(tuple(build_space(s, reg) for s in items))
    raise _unknown(kind, "space kind", SPACE_KINDS)


def space_descriptor(space: Space) -> str:
    if isinstance(space, Euclidean):
        return f"kind=euclidean,dim={space.n}"
    if isinstance(space, HyperbolicHalfPlane):
        return "kind=halfplane"
    if isinstance(space, MetricSpider):
        return f"kind=spider,legs={space.legs}"
    return "kind=product,factors=[" + ";".join(f"[{space_descriptor(f)}]"
                                               for f in space.factors) + "]"


# ---------------------------------------------------------------- points

def _wrapped(text: str) -> bool:
    """True when one pair of parentheses encloses the whole text."""
    if not (text.startswith("(") and text.endswith(")")):
        return False
    depth = 0
    for i, c in enumerate(text):
        depth += (c == "(") - (c == ")")
        if depth == 0:
            return i == len(text) - 1
    return False


def parse_point(text: str, space: Space) -> Point:
    """Coordinates as text, optionally tagged (``spider:2,1.5``).

    The whole point may be wrapped in parentheses. Product points list their
    components with ``;``, each wrapped in parentheses or brackets when it
    contains separators.
    """
    text = unbracket(text)
    if _wrapped(text):
        text = text[1:-1]
    try:
        if ":" in text.split(",")[0] and not isinstance(space, ProductSpace):
            return point_from_text(text, space)
        if isinstance(space, ProductSpace):
            if text.startswith("product:"):
                return point_from_text(text, space)
            parts = [s.strip() for s in _split_top(text, ";")]
            if len(parts) != len(space.factors):
                raise DescriptorError(
                    f"product point needs {len(space.factors)} components, got {len(parts)}")
            return Point(space, tuple(parse_point(s, f) for s, f in zip(parts, space.factors)))
        return space.parse_coords_text(text)
    except DescriptorError:
        raise
    except (ValueError, TypeError) as e:
        raise DescriptorError(f"bad point {text!r} for {space.kind}: {e}") from None


def parse_points(text: str, space: Space) -> list[Point]:
    return [parse_point(s, space) for s in _split_top(unbracket(text), ";") if s.strip()]


def point_text(p: Point) -> str:
    """Inverse of :func:`parse_point` (untagged)."""
    if isinstance(p.space, ProductSpace):
        return ";".join(f"({point_text(c)})" for c in p.coords)
    return p.space.point_coords_text(p.coords)


# ---------------------------------------------------------------- regions

def build_region(text: str, space: Space, reg: Registry | None = None) -> Region:
    reg = reg or Registry()
    if not is_descriptor(text):
        name = unbracket(text)
        if name not in reg.regions:
            raise DescriptorError(f"unknown region name {name!r}")
        return reg.lookup("regions", name, lambda t: build_region(t, space, reg))
    d = parse_descriptor(text)
    kind = _need(d, "region", "region")
    if kind == "interval":
        _extra_keys(d, ("region", "lo", "hi"), "interval")
        if not (isinstance(space, Euclidean) and space.n == 1):
            raise DescriptorError("interval regions need euclidean dim=1")
        return Interval(space, number(_need(d, "lo", "interval"), "lo"),
                        number(_need(d, "hi", "interval"), "hi"))
    if kind == "segment":
        _extra_keys(d, ("region", "a", "b"), "segment")
        return Segment(parse_point(_need(d, "a", "segment"), space),
                       parse_point(_need(d, "b", "segment"), space))
    if kind == "ball":
        _extra_keys(d, ("region", "center", "radius"), "ball")
        r = number(_need(d, "radius", "ball"), "radius")
        return Ball(parse_point(_need(d, "center", "ball"), space), r)
    if kind == "star":
        _extra_keys(d, ("region", "caps"), "star")
        if not isinstance(space, MetricSpider):
            raise DescriptorError("star regions need a spider space")
        return Star(space, tuple(numbers(_need(d, "caps", "star"), "caps")))
    if kind == "product":
        _extra_keys(d, ("region", "parts"), "product region")
        if not isinstance(space, ProductSpace):
            raise DescriptorError("product regions need a product space")
        items = split_list(_need(d, "parts", "product region"))
        if len(items) != len(space.factors):
            raise DescriptorError("product region needs one part per factor")
        parts = tuple(None if s in ("whole", "none", "") else build_region(s, f, reg)
                      for s, f in zip(items, space.factors))
        return ProductRegion(space, parts)
    raise _unknown(kind, "region kind", REGION_KINDS)


# ---------------------------------------------------------------- functionals

def build_functional(text: str, space: Space, reg: Registry | None = None) -> ConvexFunctional:
    reg = reg or Registry()
    if not is_descriptor(text):
        name = unbracket(text)
        if name in reg.functionals:
            return reg.lookup("functionals", name, lambda t: build_functional(t, space, reg))
        if name not in FUNCTIONAL_KINDS:
            raise _unknown(name, "functional", FUNCTIONAL_KINDS)
        text = f"f={name}"
    d = parse_descriptor(text)
    kind = _need(d, "f", "functional")
    w = number(d.get("weight", "1"), "weight")
    if kind == "zero":
        _extra_keys(d, ("f",), "zero")
        return zero(space)
    if kind == "const":
        _extra_keys(d, ("f", "value"), "const")
        return Constant(space, number(d.get("value", "0"), "value"))
    if kind == "abs":
        _extra_keys(d, ("f", "center", "weight"), "abs")
        if not (isinstance(space, Euclidean) and space.n == 1):
            raise DescriptorError("abs needs euclidean dim=1; use dist elsewhere")
        return Distance(space.point(number(d.get("center", "0"), "center")), w)
    if kind in ("dist", "dist_sq"):
        _extra_keys(d, ("f", "anchor", "weight"), kind)
        a = parse_point(d["anchor"], space) if "anchor" in d else space.origin()
        return Distance(a, w) if kind == "dist" else DistanceSquared(a, w)
    if kind == "linear":
        _extra_keys(d, ("f", "coef", "offset"), "linear")
        if not isinstance(space, Euclidean):
            raise DescriptorError("linear needs a euclidean space")
        coef = numbers(d.get("coef", ";".join(["1"] * space.n)), "coef")
        return Linear(space, coef, number(d.get("offset", "0"), "offset"))
    if kind == "busemann":
        _extra_keys(d, ("f", "at", "weight"), "busemann")
        at = d.get("at")
        if at is not None:
            if isinstance(space, Euclidean):
                at = numbers(at, "at")
            elif isinstance(space, MetricSpider):
                at = integer(at, "at")
            else:
                at = number(at, "at")
        return Busemann(space, at, w)
    if kind == "indicator":
        _extra_keys(d, ("f", "region"), "indicator")
        return indicator_of_set(build_region(_need(d, "region", "indicator"), space, reg))
    if kind in ("sum", "max"):
        _extra_keys(d, ("f", "terms", "weights"), kind)
        terms = [build_functional(s, space, reg) for s in split_list(_need(d, "terms", kind))]
        if not terms:
            raise DescriptorError(f"{kind} needs at least one term")
        if kind == "max":
            return Max(terms)
        ws = numbers(d["weights"], "weights") if "weights" in d else None
        if ws is not None and len(ws) != len(terms):
            raise DescriptorError("sum needs one weight per term")
        return Sum(terms, ws)
    if kind == "lift":
        _extra_keys(d, ("f", "index", "of"), "lift")
        if not isinstance(space, ProductSpace):
            raise DescriptorError("lift needs a product space")
        i = integer(_need(d, "index", "lift"), "index")
        if not 0 <= i < len(space.factors):
            raise DescriptorError("lift index out of range")
        return Lifted(space, i, build_functional(_need(d, "of", "lift"), space.factors[i], reg))
    raise _unknown(kind, "functional", FUNCTIONAL_KINDS)


# ---------------------------------------------------------------- families

def build_family(text: str, space: Space, reg: Registry | None = None):
    """A :class:`FunctionSequence`, or a :class:`RegionSequence` for
    ``nested_intervals``. ``limit=`` overrides the built-in limit."""
    reg = reg or Registry()
    if not is_descriptor(text):
        name = unbracket(text)
        if name in reg.families:
            return reg.lookup("families", name, lambda t: build_family(t, space, reg))
        if name not in FAMILY_KINDS:
            raise _unknown(name, "family", FAMILY_KINDS)
        text = f"family={name}"
    d = parse_descriptor(text)
    kind = _need(d, "family", "family")
    common = ("family", "limit")
    if kind == "constant":
        _extra_keys(d, common + ("of",), "constant family")
        seq = fam.constant(build_functional(_need(d, "of", "constant family"), space, reg))
    elif kind == "shifted_abs":
        _extra_keys(d, common + ("c",), kind)
        seq = fam.shifted_abs(space, number(d.get("c", "1"), "c"))
    elif kind == "scaled_abs":
        _extra_keys(d, common, kind)
        seq = fam.scaled_abs(space)
    elif kind == "oscillating":
        _extra_keys(d, common + ("low", "high"), kind)
        seq = fam.oscillating(space, number(d.get("low", "0"), "low"),
                              number(d.get("high", "1"), "high"))
    elif kind == "steep_quadratic":
        _extra_keys(d, common, kind)
        seq = fam.steep_quadratic(space)
    elif kind == "moving_anchor":
        _extra_keys(d, common + ("anchor", "start", "weight"), kind)
        seq = fam.moving_anchor(parse_point(_need(d, "anchor", kind), space),
                                parse_point(_need(d, "start", kind), space),
                                number(d.get("weight", "1"), "weight"))
    elif kind == "nested_intervals":
        _extra_keys(d, common + ("lo", "hi", "direction"), kind)
        seq = fam.nested_intervals(space, number(d.get("lo", "0"), "lo"),
                                   number(d.get("hi", "1"), "hi"),
                                   d.get("direction", "shrinking"))
        if "limit" in d:
            seq.limit = build_region(d["limit"], space, reg)
        return seq
    else:
        raise _unknown(kind, "family", FAMILY_KINDS)
    if "limit" in d:
        seq.limit = build_functional(d["limit"], space, reg)
    return seq
