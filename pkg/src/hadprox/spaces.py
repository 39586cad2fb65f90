"""Concrete Hadamard model spaces.

Four kinds are provided: Euclidean space, the hyperbolic upper half-plane,
the metric spider (k half-lines glued at their origins) and finite products
of these with the l2 product metric. Each space knows its metric, its
geodesics, tangent directions at a point and how to walk along a geodesic
line through a point; the solvers in :mod:`hadprox.prox` only use that
interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .minimize import golden_section, polish
from .verdict import UsageError, Verdict

SPIDER_ORIGIN_TOL = 1e-12
TOL_1D = 1e-10
TOL_CMP = 1e-8
HYPERBOLIC_LINE_CAP = 40.0


@dataclass(frozen=True, slots=True)
class Point:
    space: "Space"
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", self.space.canonical(self.coords))

    def __repr__(self) -> str:
        return f"Point({point_to_text(self)})"

    def key(self) -> tuple:
        """Hashable value usable as a cache key."""
        return self.space.coords_key(self.coords)

    @classmethod
    def trusted(cls, space: "Space", coords: tuple) -> "Point":
        """Skip validation for coordinates already in canonical form."""
        p = object.__new__(cls)
        object.__setattr__(p, "space", space)
        object.__setattr__(p, "coords", coords)
        return p


@dataclass
class Line:
    """Unit-speed geodesic line ``s -> at(s)`` defined for ``lo <= s <= hi``."""

    at: Callable[[float], Point]
    lo: float = -math.inf
    hi: float = math.inf

    def __call__(self, s: float) -> Point:
        return self.at(s)


class Space:
    kind = "abstract"
    complete_lines = False

    def canonical(self, coords):
        return coords

    def coords_key(self, coords) -> tuple:
        return coords

    def point(self, *coords) -> Point:
        raise NotImplementedError

    def distance(self, a: Point, b: Point) -> float:
        raise NotImplementedError

    def geodesic_point(self, a: Point, b: Point, t: float) -> Point:
        raise NotImplementedError

    def origin(self) -> Point:
        raise NotImplementedError

    def directions(self, y: Point, rng: np.random.Generator | None = None,
                   extra: int = 0) -> list:
        raise NotImplementedError

    def ray(self, y: Point, direction) -> Callable[[float], Point]:
        raise NotImplementedError

    def lines_through(self, y: Point, rng: np.random.Generator | None = None,
                      extra: int = 0) -> list[Line]:
        raise NotImplementedError

    def line_toward(self, y: Point, a: Point) -> Line | None:
        """Geodesic line through ``y`` with ``line(d(y, a)) == a``."""
        raise NotImplementedError

    def perturb_direction(self, direction, sigma: float, rng: np.random.Generator):
        return direction

    def random_point(self, rng: np.random.Generator, scale: float = 1.0,
                     center: Point | None = None) -> Point:
        raise NotImplementedError

    def make_point(self, value) -> Point:
        """Build a point from a number or (nested) tuple of numbers."""
        raise NotImplementedError

    def point_coords_text(self, coords) -> str:
        raise NotImplementedError

    def parse_coords_text(self, text: str) -> Point:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        raise NotImplementedError


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    return v / n if n > 0 else v


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


# ---------------------------------------------------------------- Euclidean

@dataclass(frozen=True)
class Euclidean(Space):
    n: int = 1
    kind = "euclidean"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise UsageError("euclidean dimension must be >= 1")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def complete_lines(self) -> bool:  # type: ignore[override]
        return self.n == 1

    def canonical(self, coords):
        coords = tuple(float(c) for c in coords)
        if len(coords) != self.n:
            raise UsageError(f"expected {self.n} coordinates, got {len(coords)}")
        if not all(math.isfinite(c) for c in coords):
            raise UsageError("coordinates must be finite")
        return coords

    def point(self, *coords) -> Point:
        return Point(self, coords)

    def distance(self, a, b):
        return math.dist(a.coords, b.coords)

    def geodesic_point(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        return Point(self, tuple(x + t * (y - x) for x, y in zip(a.coords, b.coords)))

    def origin(self):
        return Point(self, (0.0,) * self.n)

    def directions(self, y, rng=None, extra=0):
        out = []
        for i in range(self.n):
            e = [0.0] * self.n
            e[i] = 1.0
            out.append(tuple(e))
            e[i] = -1.0
            out.append(tuple(e))
        for _ in range(extra):
            out.append(tuple(map(float, _unit(rng.standard_normal(self.n)))))
        return out

    def ray(self, y, direction):
        c, u = y.coords, direction
        if self.n == 1:
            c0, u0 = c[0], u[0]
            return lambda s: Point.trusted(self, (c0 + s * u0,))
        return lambda s: Point.trusted(self, tuple(ci + s * ui for ci, ui in zip(c, u)))

    def lines_through(self, y, rng=None, extra=0):
        dirs = self.directions(y, rng, extra)
        # keep one of each +-e_i pair
        dirs = dirs[0:2 * self.n:2] + dirs[2 * self.n:]
        return [Line(self.ray(y, u)) for u in dirs]

    def line_toward(self, y, a):
        d = self.distance(y, a)
        if d == 0.0:
            return None
        u = tuple((ai - yi) / d for ai, yi in zip(a.coords, y.coords))
        return Line(self.ray(y, u))

    def perturb_direction(self, direction, sigma, rng):
        v = np.asarray(direction) + sigma * rng.standard_normal(self.n)
        return tuple(map(float, _unit(v)))

    def random_point(self, rng, scale=1.0, center=None):
        c = np.zeros(self.n) if center is None else np.asarray(center.coords)
        return Point(self, tuple(c + scale * rng.standard_normal(self.n)))

    def make_point(self, value):
        if isinstance(value, (int, float)):
            value = (value,)
        return Point(self, tuple(value))

    def point_coords_text(self, coords):
        return ",".join(repr(c) for c in coords)

    def parse_coords_text(self, text):
        return Point(self, _floats(text))


# ---------------------------------------------------------------- hyperbolic

def _to_hyperboloid(x: float, y: float) -> tuple[float, float, float]:
    r2 = x * x + y * y
    return ((r2 + 1.0) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y))


def _from_hyperboloid(X0: float, X1: float, X2: float) -> tuple[float, float]:
    y = 1.0 / (X0 - X2)
    return (X1 * y, y)


def _mink(a, b) -> float:
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _frame(x: float, y: float):
    e1 = (x, 1.0, x)
    e2 = ((y * y - x * x - 1.0) / (2.0 * y), -x / y, (y * y - x * x + 1.0) / (2.0 * y))
    return e1, e2


@dataclass(frozen=True)
class HyperbolicHalfPlane(Space):
    """Upper half-plane ``{(x, y): y > 0}`` with metric ``|dz| / y``.

    Geodesics are computed in the hyperboloid model, distances with the
    ``2 asinh`` form of the half-plane formula (accurate for short segments).
    Tangent directions at a point are angles in the orthonormal frame
    ``(d/dx, d/dy)`` rescaled by ``y``.
    """

    kind = "halfplane"

    @property
    def dim(self) -> int:
        return 2

    def canonical(self, coords):
        coords = tuple(float(c) for c in coords)
        if len(coords) != 2:
            raise UsageError("half-plane points need two coordinates (x, y)")
        if not (coords[1] > 0.0 and math.isfinite(coords[0]) and math.isfinite(coords[1])):
            raise UsageError("half-plane points need y > 0")
        return coords

    def point(self, x, y) -> Point:
        return Point(self, (x, y))

    def distance(self, a, b):
        (x1, y1), (x2, y2) = a.coords, b.coords
        q = ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (4.0 * y1 * y2)
        return 2.0 * math.asinh(math.sqrt(q))

    def geodesic_point(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        D = self.distance(a, b)
        if D == 0.0:
            return a
        P = _to_hyperboloid(*a.coords)
        Q = _to_hyperboloid(*b.coords)
        wa = math.sinh((1.0 - t) * D) / math.sinh(D)
        wb = math.sinh(t * D) / math.sinh(D)
        X = tuple(wa * p + wb * q for p, q in zip(P, Q))
        return Point(self, _from_hyperboloid(*X))

    def origin(self):
        return Point(self, (0.0, 1.0))

    def directions(self, y, rng=None, extra=0):
        out = [0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi]
        for _ in range(extra):
            out.append(float(rng.uniform(0.0, 2.0 * math.pi)))
        return out

    def _exp(self, y: Point, theta: float) -> Callable[[float], Point]:
        x0, y0 = y.coords
        P = _to_hyperboloid(x0, y0)
        e1, e2 = _frame(x0, y0)
        c, s_ = math.cos(theta), math.sin(theta)
        V = tuple(c * u + s_ * w for u, w in zip(e1, e2))

        def at(s: float) -> Point:
            if s == 0.0:
                return y
            ch, sh = math.cosh(s), math.sinh(s)
            return Point(self, _from_hyperboloid(ch * P[0] + sh * V[0],
                                                 ch * P[1] + sh * V[1],
                                                 ch * P[2] + sh * V[2]))
        return at

    def ray(self, y, direction):
        return self._exp(y, direction)

    def lines_through(self, y, rng=None, extra=0):
        thetas = [0.0, 0.5 * math.pi]
        for _ in range(extra):
            thetas.append(float(rng.uniform(0.0, math.pi)))
        cap = HYPERBOLIC_LINE_CAP
        return [Line(self._exp(y, th), -cap, cap) for th in thetas]

    def angle_toward(self, y: Point, a: Point) -> float | None:
        if self.distance(y, a) == 0.0:
            return None
        P = _to_hyperboloid(*y.coords)
        Q = _to_hyperboloid(*a.coords)
        pq = _mink(P, Q)
        U = tuple(q + pq * p for p, q in zip(P, Q))
        e1, e2 = _frame(*y.coords)
        return math.atan2(_mink(U, e2), _mink(U, e1))

    def line_toward(self, y, a):
        th = self.angle_toward(y, a)
        if th is None:
            return None
        cap = HYPERBOLIC_LINE_CAP
        return Line(self._exp(y, th), -cap, cap)

    def perturb_direction(self, direction, sigma, rng):
        return float(direction + sigma * rng.standard_normal())

    def random_point(self, rng, scale=1.0, center=None):
        c = self.origin() if center is None else center
        th = float(rng.uniform(0.0, 2.0 * math.pi))
        r = float(scale * 2.0 * rng.uniform())
        return self._exp(c, th)(r)

    def make_point(self, value):
        return Point(self, tuple(value))

    def point_coords_text(self, coords):
        return ",".join(repr(c) for c in coords)

    def parse_coords_text(self, text):
        return Point(self, _floats(text))


# ---------------------------------------------------------------- spider

@dataclass(frozen=True)
class MetricSpider(Space):
    """``legs`` copies of ``[0, inf)`` glued at 0; a metric tree.

    Points are ``(leg, r)`` with legs numbered from 1. Radii below
    ``SPIDER_ORIGIN_TOL`` are snapped to the hub, stored as ``(1, 0.0)``.
    A tangent direction at a point is the leg a ray heads into: the point's
    own leg means "outward", any other leg means "through the hub".
    """

    legs: int = 3
    kind = "spider"
    complete_lines = True

    def __post_init__(self):
        if int(self.legs) != self.legs or self.legs < 2:
            raise UsageError("legs must be >= 2")

    @property
    def dim(self) -> int:
        return 1

    def canonical(self, coords):
        if len(coords) != 2:
            raise UsageError("spider points are (leg, radius)")
        leg, r = coords
        if int(leg) != leg or not 1 <= leg <= self.legs:
            raise UsageError(f"leg index must be in 1..{self.legs}")
        r = float(r)
        if not (r >= 0.0 and math.isfinite(r)):
            raise UsageError("spider radius must be finite and >= 0")
        if r < SPIDER_ORIGIN_TOL:
            return (1, 0.0)
        return (int(leg), r)

    def point(self, leg, r) -> Point:
        return Point(self, (leg, r))

    def distance(self, a, b):
        (la, ra), (lb, rb) = a.coords, b.coords
        if la == lb:
            return abs(ra - rb)
        return ra + rb

    def _walk(self, y: Point, target_leg: int, s: float) -> Point:
        leg, r = y.coords
        if s <= 0.0:
            return y
        if r == 0.0:
            return Point(self, (target_leg, s))
        if target_leg == leg:
            return Point(self, (leg, r + s))
        if s <= r:
            return Point(self, (leg, r - s))
        return Point(self, (target_leg, s - r))

    def geodesic_point(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        (la, ra), (lb, rb) = a.coords, b.coords
        if la == lb or ra == 0.0 or rb == 0.0:
            if la == lb:
                return Point(self, (la, ra + t * (rb - ra)))
            if ra == 0.0:
                return Point(self, (lb, t * rb))
            return Point(self, (la, (1.0 - t) * ra))
        return self._walk(a, lb, t * (ra + rb))

    def origin(self):
        return Point(self, (1, 0.0))

    def directions(self, y, rng=None, extra=0):
        return list(range(1, self.legs + 1))

    def ray(self, y, direction):
        return lambda s: self._walk(y, direction, s)

    def _line(self, y: Point, back_leg: int, fwd_leg: int) -> Line:
        """Line through y: positive s follows the ray into ``fwd_leg``,
        negative s the ray into ``back_leg``."""
        fwd = self.ray(y, fwd_leg)
        back = self.ray(y, back_leg)
        return Line(lambda s: fwd(s) if s >= 0.0 else back(-s))

    def lines_through(self, y, rng=None, extra=0):
        leg, r = y.coords
        if r == 0.0:
            return [self._line(y, i, j) for i in range(1, self.legs + 1)
                    for j in range(i + 1, self.legs + 1)]
        return [self._line(y, leg, m) for m in range(1, self.legs + 1) if m != leg]

    def line_toward(self, y, a):
        if self.distance(y, a) == 0.0:
            return None
        (ly, ry), (la, ra) = y.coords, a.coords
        if ry == 0.0:
            other = 1 if la != 1 else 2
            return self._line(y, other, la)
        if ra == 0.0 or la != ly:
            fwd = la if la != ly else (1 if ly != 1 else 2)
            return self._line(y, ly, fwd)
        other = 1 if ly != 1 else 2
        if ra > ry:
            return self._line(y, other, ly)
        return self._line(y, ly, other)

    def random_point(self, rng, scale=1.0, center=None):
        leg = int(rng.integers(1, self.legs + 1))
        return Point(self, (leg, float(scale * 2.0 * rng.uniform())))

    def make_point(self, value):
        leg, r = value
        return Point(self, (int(leg), float(r)))

    def point_coords_text(self, coords):
        return f"{coords[0]},{coords[1]!r}"

    def parse_coords_text(self, text):
        parts = text.split(",")
        if len(parts) != 2:
            raise UsageError("spider point text is 'leg,radius'")
        return Point(self, (int(parts[0]), float(parts[1])))


# ---------------------------------------------------------------- products

@dataclass(frozen=True)
class ProductSpace(Space):
    """l2 product of Hadamard spaces; geodesics move in all factors at once.

    Directions are ``(weights, factor_directions)`` with unit-norm
    nonnegative weights; a zero weight freezes that factor.
    """

    factors: tuple = ()
    kind = "product"

    def __post_init__(self):
        if not self.factors:
            raise UsageError("product factor list must be nonempty")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    def canonical(self, coords):
        coords = tuple(coords)
        if len(coords) != len(self.factors):
            raise UsageError("product point needs one point per factor")
        out = []
        for p, f in zip(coords, self.factors):
            if not isinstance(p, Point):
                p = f.make_point(p)
            if p.space != f:
                raise UsageError("product component in wrong factor space")
            out.append(p)
        return tuple(out)

    def coords_key(self, coords):
        return tuple(p.key() for p in coords)

    def point(self, *components) -> Point:
        return Point(self, components)

    def distance(self, a, b):
        return math.sqrt(sum(f.distance(p, q) ** 2
                             for f, p, q in zip(self.factors, a.coords, b.coords)))

    def geodesic_point(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        return Point(self, tuple(f.geodesic_point(p, q, t)
                                 for f, p, q in zip(self.factors, a.coords, b.coords)))

    def origin(self):
        return Point(self, tuple(f.origin() for f in self.factors))

    def _basis_weights(self, i: int) -> tuple:
        w = [0.0] * len(self.factors)
        w[i] = 1.0
        return tuple(w)

    def _random_direction(self, y, rng):
        w = tuple(np.abs(rng.standard_normal(len(self.factors))))
        nrm = math.sqrt(sum(x * x for x in w))
        w = tuple(x / nrm for x in w)
        dirs = []
        for f, p in zip(self.factors, y.coords):
            cand = f.directions(p, rng, extra=1)
            dirs.append(cand[int(rng.integers(len(cand)))])
        return (w, tuple(dirs))

    def directions(self, y, rng=None, extra=0):
        out = []
        for i, (f, p) in enumerate(zip(self.factors, y.coords)):
            for d in f.directions(p, rng, 0):
                dirs = [None] * len(self.factors)
                dirs[i] = d
                out.append((self._basis_weights(i), tuple(dirs)))
        for _ in range(extra):
            out.append(self._random_direction(y, rng))
        return out

    def ray(self, y, direction):
        w, dirs = direction
        rays = [f.ray(p, d) if wi > 0.0 and d is not None else None
                for f, p, d, wi in zip(self.factors, y.coords, dirs, w)]
        comps = y.coords

        def at(s: float) -> Point:
            return Point(self, tuple(r(wi * s) if r is not None else c
                                     for r, wi, c in zip(rays, w, comps)))
        return at

    def _combine(self, y: Point, lines: Sequence[Line | None], w: Sequence[float]) -> Line:
        comps = y.coords
        lo, hi = -math.inf, math.inf
        for ln, wi in zip(lines, w):
            if ln is not None and wi > 0.0:
                lo = max(lo, ln.lo / wi)
                hi = min(hi, ln.hi / wi)

        def at(s: float) -> Point:
            return Point(self, tuple(ln(wi * s) if ln is not None and wi > 0.0 else c
                                     for ln, wi, c in zip(lines, w, comps)))
        return Line(at, lo, hi)

    def lines_through(self, y, rng=None, extra=0):
        out = []
        k = len(self.factors)
        per_factor = []
        for i, (f, p) in enumerate(zip(self.factors, y.coords)):
            fl = f.lines_through(p, rng, 0)
            per_factor.append(fl)
            for ln in fl:
                lines = [None] * k
                lines[i] = ln
                out.append(self._combine(y, lines, self._basis_weights(i)))
        for _ in range(extra):
            w = np.abs(rng.standard_normal(k))
            w = w / np.linalg.norm(w)
            lines = []
            for f, p, fl in zip(self.factors, y.coords, per_factor):
                cand = f.lines_through(p, rng, 1)
                lines.append(cand[int(rng.integers(len(cand)))])
            out.append(self._combine(y, lines, tuple(float(x) for x in w)))
        return out

    def line_toward(self, y, a):
        D = self.distance(y, a)
        if D == 0.0:
            return None
        lines, w = [], []
        for f, p, q in zip(self.factors, y.coords, a.coords):
            d = f.distance(p, q)
            lines.append(f.line_toward(p, q) if d > 0.0 else None)
            w.append(d / D)
        return self._combine(y, lines, w)

    def perturb_direction(self, direction, sigma, rng):
        w, dirs = direction
        w = np.abs(np.asarray(w) + sigma * rng.standard_normal(len(w)))
        w = w / np.linalg.norm(w)
        new_dirs = []
        for f, d, p in zip(self.factors, dirs, range(len(dirs))):
            if d is None:
                # wake up a frozen factor with one of its directions
                cand = f.directions(f.origin(), rng, 1)
                d = cand[int(rng.integers(len(cand)))]
            new_dirs.append(f.perturb_direction(d, sigma, rng))
        return (tuple(float(x) for x in w), tuple(new_dirs))

    def random_point(self, rng, scale=1.0, center=None):
        cs = center.coords if center is not None else [None] * len(self.factors)
        return Point(self, tuple(f.random_point(rng, scale, c)
                                 for f, c in zip(self.factors, cs)))

    def make_point(self, value):
        return Point(self, tuple(f.make_point(v) if not isinstance(v, Point) else v
                                 for f, v in zip(self.factors, value)))

    def point_coords_text(self, coords):
        return ";".join(point_to_text(p) for p in coords)

    def parse_coords_text(self, text):
        parts = _split_top(text, ";")
        if len(parts) != len(self.factors):
            raise UsageError("product point text needs one component per factor")
        return Point(self, tuple(point_from_text(s, f) for s, f in zip(parts, self.factors)))


def _split_top(text: str, sep: str) -> list[str]:
    depth, cur, out = 0, [], []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


# ---------------------------------------------------------------- serialization

def space_tag(space: Space) -> str:
    return space.kind


def point_to_text(p: Point) -> str:
    """``tag:coords``; floats use ``repr`` so parsing is exact."""
    body = p.space.point_coords_text(p.coords)
    if p.space.kind == "product":
        body = f"({body})"
    return f"{p.space.kind}:{body}"


def point_from_text(text: str, space: Space) -> Point:
    tag, _, body = text.strip().partition(":")
    if tag != space.kind:
        raise UsageError(f"point tag {tag!r} does not match space {space.kind!r}")
    if space.kind == "product":
        body = body.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise UsageError("product point text must be parenthesized")
        body = body[1:-1]
    return space.parse_coords_text(body)


# ---------------------------------------------------------------- operations

def _same_space(a: Point, b: Point) -> Space:
    if a.space != b.space:
        raise UsageError("points live in different spaces")
    return a.space


def distance(a: Point, b: Point) -> float:
    return _same_space(a, b).distance(a, b)


@dataclass(frozen=True)
class GeodesicSegment:
    start: Point
    end: Point

    def __post_init__(self):
        _same_space(self.start, self.end)

    @property
    def space(self) -> Space:
        return self.start.space

    @property
    def length(self) -> float:
        return self.space.distance(self.start, self.end)

    def point(self, t: float) -> Point:
        return geodesic_point(self, t)


def geodesic_point(g: GeodesicSegment, t: float) -> Point:
    if not 0.0 <= t <= 1.0:
        raise UsageError("geodesic parameter must lie in [0, 1]")
    return g.space.geodesic_point(g.start, g.end, float(t))


def project_to_geodesic(x: Point, g: GeodesicSegment,
                        tol: float = TOL_1D) -> tuple[float, Point]:
    """Metric projection onto a segment; ``t -> d(x, x_t)`` is convex."""
    space = _same_space(x, g.start)
    if g.length == 0.0:
        return 0.0, g.start
    def sq(t):
        return space.distance(x, space.geodesic_point(g.start, g.end, t)) ** 2

    res = golden_section(sq, 0.0, 1.0, tol=tol)
    t = min(max(res.s, 0.0), 1.0)
    # value comparisons stall near sqrt(eps); chord roots of the smooth
    # squared distance resolve t further (declines at kinks and endpoints)
    sharp = polish(sq, t, sq(t), 0.0, 1.0, 1e-4)
    if sharp is not None:
        t = sharp
    return t, space.geodesic_point(g.start, g.end, t)


def comparison_triangle(a: float, b: float, c: float) -> tuple[tuple, tuple, tuple]:
    """Euclidean vertices for side lengths d(p,q)=a, d(p,r)=b, d(q,r)=c."""
    rx = (a * a + b * b - c * c) / (2.0 * a)
    ry = math.sqrt(max(b * b - rx * rx, 0.0))
    return (0.0, 0.0), (a, 0.0), (rx, ry)


def cat0_comparison_check(tri: Sequence[Point], samples: int = 100,
                          rng: np.random.Generator | None = None,
                          tol: float = TOL_CMP) -> Verdict:
    """Sample the CAT(0) inequality on one geodesic triangle.

    For each sample, ``x`` is drawn on ``[p, r]`` and ``y`` on ``[p, q]``
    (with every vertex taking the role of ``p``); the slack
    ``|xbar - ybar| - d(x, y)`` must be ``>= -tol``.
    """
    if samples < 1:
        raise UsageError("samples must be >= 1")
    p, q, r = tri
    space = _same_space(p, q)
    _same_space(p, r)
    rng = rng if rng is not None else np.random.default_rng(0)
    a, b, c = space.distance(p, q), space.distance(p, r), space.distance(q, r)
    scale = max(a, b, c)
    if min(a, b, c) <= 1e-12 * max(scale, 1.0):
        return Verdict.unknown("degenerate triangle: coincident vertices")
    _, _, rbar = comparison_triangle(a, b, c)
    if rbar[1] <= 1e-9 * scale:
        return Verdict.unknown("degenerate triangle: collinear vertices")
    slacks = []
    worst, witness = math.inf, {}
    rotations = [(p, q, r), (q, r, p), (r, p, q)]
    for i in range(samples):
        P, Q, R = rotations[i % 3]
        A, B, C = space.distance(P, Q), space.distance(P, R), space.distance(Q, R)
        _, qb, rb = comparison_triangle(A, B, C)
        s, u = float(rng.uniform()), float(rng.uniform())
        x = space.geodesic_point(P, R, s)
        y = space.geodesic_point(P, Q, u)
        xb = (s * rb[0], s * rb[1])
        yb = (u * qb[0], u * qb[1])
        slack = math.dist(xb, yb) - space.distance(x, y)
        slacks.append(slack)
        if slack < worst:
            worst, witness = slack, {"x": x, "y": y, "s": s, "u": u}
    details = {"min_slack": worst, "median_slack": float(np.median(slacks))}
    if worst >= -tol:
        return Verdict.consistent(max(-worst, 0.0), witness=witness, details=details)
    return Verdict.violation(-worst, witness=witness, details=details)


def weak_limit_test(xs: Sequence[Point], x: Point, geodesics: Sequence[GeodesicSegment],
                    tail: tuple[int, int] | None = None, tol_seq: float = 1e-2,
                    radius_bound: float = 1e6) -> Verdict:
    """Necessary-condition test for ``x_n -> x`` weakly.

    ``xs[n-1]`` is the n-th term. For each supplied geodesic starting at
    ``x``, the tail maximum of ``d(x, P_gamma x_n)`` must fall below
    ``tol_seq``. Only finitely many geodesics are inspected, so a
    ConsistentWith verdict cannot certify weak convergence.
    """
    if not geodesics:
        raise UsageError("weak_limit_test needs at least one geodesic")
    for g in geodesics:
        _same_space(g.start, x)
        if g.start.space.distance(g.start, x) > 1e-12:
            raise UsageError("every geodesic must start at the candidate limit")
    space = x.space
    if max(space.distance(x, p) for p in xs) > radius_bound:
        raise UsageError("sequence is not within the radius bound")
    n_min, n_max = tail if tail is not None else ((len(xs) + 1) // 2, len(xs))
    idx = range(max(n_min, 1), min(n_max, len(xs)) + 1)
    worst, witness = 0.0, {}
    for gi, g in enumerate(geodesics):
        for n in idx:
            _, p = project_to_geodesic(xs[n - 1], g)
            d = space.distance(x, p)
            if d > worst:
                worst, witness = d, {"geodesic": gi, "n": n, "projection": p}
    note = "finitely many geodesics: necessary condition only"
    return Verdict.from_residual(worst, tol_seq, witness=witness, notes=note)
