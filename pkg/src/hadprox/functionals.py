"""Extended-real convex functionals on model spaces.

Values are plain floats with ``math.inf`` standing for ``+inf``; ``-inf``
and NaN are rejected as improper. The library covers what the convergence
experiments need: constants, distances and squared distances to an anchor,
affine maps on Euclidean space, Busemann functions, indicators of closed
convex sets, and nonnegative combinations / maxima of those.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .regions import Region, intersect
from .spaces import (Euclidean, GeodesicSegment, HyperbolicHalfPlane, MetricSpider,
                     Point, ProductSpace, Space)
from .verdict import UsageError, Verdict

INF = math.inf


class ConvexFunctional:
    """``f: H -> (-inf, +inf]`` with optional domain metadata.

    Subclasses implement ``_eval``. ``domain`` is a :class:`Region` holding
    ``dom f`` (``None`` means the whole space); ``anchors`` are points where
    the functional has structure (minimizers, kinks) and serve as search
    hints for the prox solver.
    """

    label = "f"

    def __init__(self, space: Space):
        self.space = space

    def _eval(self, y: Point) -> float:
        raise NotImplementedError

    def __call__(self, y: Point) -> float:
        v = self._eval(y)
        if v != v or v == -INF:
            raise UsageError(f"{self.label} returned {v} (improper)")
        return v

    @property
    def domain(self) -> Region | None:
        return None

    @property
    def anchors(self) -> tuple[Point, ...]:
        return ()

    def sample_domain(self, rng: np.random.Generator, count: int,
                      center: Point | None = None, scale: float = 2.0) -> list[Point]:
        dom = self.domain
        if dom is not None:
            return dom.sample(rng, count)
        centers = [center] if center is not None else list(self.anchors) or [self.space.origin()]
        return [self.space.random_point(rng, scale, centers[i % len(centers)])
                for i in range(count)] + list(self.anchors)

    def __add__(self, other: "ConvexFunctional") -> "ConvexFunctional":
        return Sum((self, other))

    def __rmul__(self, w: float) -> "ConvexFunctional":
        return Sum((self,), (float(w),))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


class Constant(ConvexFunctional):
    def __init__(self, space, value: float = 0.0):
        super().__init__(space)
        if not math.isfinite(value):
            raise UsageError("constant functional must be finite")
        self.value = float(value)
        self.label = f"const({value:g})"

    def _eval(self, y):
        return self.value


def zero(space: Space) -> Constant:
    return Constant(space, 0.0)


class DistanceSquared(ConvexFunctional):
    """``weight * d(., anchor)^2 / 2``."""

    def __init__(self, anchor: Point, weight: float = 1.0):
        super().__init__(anchor.space)
        if weight < 0:
            raise UsageError("weight must be >= 0")
        self.anchor, self.weight = anchor, float(weight)
        self.label = f"{weight:g}*dist_sq"

    def _eval(self, y):
        d = self.space.distance(y, self.anchor)
        return 0.5 * self.weight * d * d

    @property
    def anchors(self):
        return (self.anchor,)


class Distance(ConvexFunctional):
    """``weight * d(., anchor)``; ``|x - c|`` on the line."""

    def __init__(self, anchor: Point, weight: float = 1.0):
        super().__init__(anchor.space)
        if weight < 0:
            raise UsageError("weight must be >= 0")
        self.anchor, self.weight = anchor, float(weight)
        self.label = f"{weight:g}*dist"

    def _eval(self, y):
        return self.weight * self.space.distance(y, self.anchor)

    @property
    def anchors(self):
        return (self.anchor,)


class Linear(ConvexFunctional):
    """Affine map ``<coef, y> + offset`` on Euclidean space."""

    def __init__(self, space: Space, coef: Sequence[float], offset: float = 0.0):
        if not isinstance(space, Euclidean):
            raise UsageError("linear functionals need a euclidean space")
        super().__init__(space)
        self.coef = tuple(float(c) for c in coef)
        if len(self.coef) != space.n:
            raise UsageError("coefficient length must match the dimension")
        self.offset = float(offset)
        self.label = "linear"

    def _eval(self, y):
        return sum(c * v for c, v in zip(self.coef, y.coords)) + self.offset


class Busemann(ConvexFunctional):
    """Busemann function of a geodesic ray (convex on any Hadamard space).

    Half-plane: ``at=None`` is the point at infinity (``-log y``), a real
    ``at`` is a boundary point on the real axis. Spider: the ray along leg
    ``leg``. Euclidean: direction vector ``at`` (so it is linear).
    """

    def __init__(self, space: Space, at=None, weight: float = 1.0):
        super().__init__(space)
        if weight < 0:
            raise UsageError("weight must be >= 0")
        self.weight = float(weight)
        if isinstance(space, HyperbolicHalfPlane):
            self.at = None if at is None else float(at)
        elif isinstance(space, MetricSpider):
            if at is None or not 1 <= int(at) <= space.legs:
                raise UsageError("spider busemann needs a leg index")
            self.at = int(at)
        elif isinstance(space, Euclidean):
            u = np.asarray(at if at is not None else [1.0] + [0.0] * (space.n - 1), float)
            self.at = tuple(u / np.linalg.norm(u))
        else:
            raise UsageError("busemann functions are not provided for this space")
        self.label = "busemann"

    def _eval(self, y):
        sp = self.space
        if isinstance(sp, HyperbolicHalfPlane):
            x, h = y.coords
            if self.at is None:
                return -self.weight * math.log(h)
            return self.weight * math.log(((x - self.at) ** 2 + h * h) / h)
        if isinstance(sp, MetricSpider):
            leg, r = y.coords
            return self.weight * (-r if leg == self.at else r)
        return -self.weight * sum(u * v for u, v in zip(self.at, y.coords))


class Indicator(ConvexFunctional):
    def __init__(self, region: Region):
        super().__init__(region.space)
        self.region = region
        self.label = f"indicator({region})"

    def _eval(self, y):
        return 0.0 if self.region.contains(y) else INF

    @property
    def domain(self):
        return self.region

    @property
    def anchors(self):
        return self.region.anchors()


def indicator_of_set(region: Region) -> Indicator:
    if region.empty:
        raise UsageError("indicator of an empty region is not proper")
    return Indicator(region)


class Sum(ConvexFunctional):
    """Nonnegative combination ``sum_i w_i f_i``."""

    def __init__(self, terms: Sequence[ConvexFunctional], weights: Sequence[float] | None = None):
        terms = tuple(terms)
        if not terms:
            raise UsageError("sum of no terms")
        super().__init__(terms[0].space)
        if any(t.space != self.space for t in terms):
            raise UsageError("sum terms live in different spaces")
        self.terms = terms
        self.weights = tuple(float(w) for w in (weights or [1.0] * len(terms)))
        if len(self.weights) != len(terms) or any(w < 0 for w in self.weights):
            raise UsageError("sum weights must be nonnegative, one per term")
        self.label = " + ".join(f"{w:g}*{t.label}" if w != 1 else t.label
                                for w, t in zip(self.weights, terms))
        self._dom = intersect([t.domain for t, w in zip(terms, self.weights) if w > 0])

    def _eval(self, y):
        total = 0.0
        for w, t in zip(self.weights, self.terms):
            if w == 0.0:
                continue
            v = t(y)
            if v == INF:
                return INF
            total += w * v
        return total

    @property
    def domain(self):
        return self._dom

    @property
    def anchors(self):
        return tuple(a for t in self.terms for a in t.anchors)


class Max(ConvexFunctional):
    def __init__(self, terms: Sequence[ConvexFunctional]):
        terms = tuple(terms)
        if not terms:
            raise UsageError("max of no terms")
        super().__init__(terms[0].space)
        if any(t.space != self.space for t in terms):
            raise UsageError("max terms live in different spaces")
        self.terms = terms
        self.label = "max(" + ", ".join(t.label for t in terms) + ")"
        self._dom = intersect([t.domain for t in terms])

    def _eval(self, y):
        return max(t(y) for t in self.terms)

    @property
    def domain(self):
        return self._dom

    @property
    def anchors(self):
        return tuple(a for t in self.terms for a in t.anchors)


class Lifted(ConvexFunctional):
    """``y -> f(y_i)`` on a product space, ``f`` living on factor ``i``."""

    def __init__(self, space: Space, index: int, f: ConvexFunctional):
        if not isinstance(space, ProductSpace):
            raise UsageError("lift needs a product space")
        if not 0 <= index < len(space.factors) or space.factors[index] != f.space:
            raise UsageError("lift index does not match the factor space")
        super().__init__(space)
        self.index, self.f = index, f
        self.label = f"lift[{index}]({f.label})"

    def _eval(self, y):
        return self.f(y.coords[self.index])

    @property
    def domain(self):
        from .regions import ProductRegion
        d = self.f.domain
        if d is None:
            return None
        regions = [None] * len(self.space.factors)
        regions[self.index] = d
        return ProductRegion(self.space, tuple(regions))

    @property
    def anchors(self):
        o = self.space.origin().coords
        out = []
        for a in self.f.anchors:
            comps = list(o)
            comps[self.index] = a
            out.append(Point(self.space, tuple(comps)))
        return tuple(out)


class FunctionalFromCallable(ConvexFunctional):
    """Wrap a user callable; convexity is the caller's responsibility."""

    def __init__(self, space: Space, fn: Callable[[Point], float], label: str = "custom",
                 domain: Region | None = None, anchors: Sequence[Point] = ()):
        super().__init__(space)
        self.fn, self.label = fn, label
        self._dom, self._anchors = domain, tuple(anchors)

    def _eval(self, y):
        return float(self.fn(y))

    @property
    def domain(self):
        return self._dom

    @property
    def anchors(self):
        return self._anchors


# ---------------------------------------------------------------- operations

def evaluate(f: ConvexFunctional, x: Point) -> float:
    if x.space != f.space:
        raise UsageError("point and functional live in different spaces")
    return f(x)


def nearest_domain_point(f: ConvexFunctional, x: Point) -> Point | None:
    """Projection of ``x`` onto ``cl dom f`` when it has a closed form."""
    dom = f.domain
    if dom is None:
        return x
    try:
        return dom.project(x)
    except NotImplementedError:
        return None


def convexity_check(f: ConvexFunctional, mu: float = 0.0, samples: int = 200,
                    rng: np.random.Generator | None = None, scale: float = 2.0) -> Verdict:
    """Sample the (strong) convexity inequality along geodesics.

    Checks ``f(x_t) <= (1-t) f(x0) + t f(x1) - mu/2 t(1-t) d(x0,x1)^2``
    with slack ``1e-9 (1 + |f(x0)| + |f(x1)|)`` on triples with finite
    endpoint values.
    """
    if samples < 1:
        raise UsageError("samples must be >= 1")
    if mu < 0:
        raise UsageError("mu must be >= 0")
    rng = rng if rng is not None else np.random.default_rng(0)
    sp = f.space
    pool = f.sample_domain(rng, 4 * samples, scale=scale)
    finite = [p for p in pool if f(p) < INF]
    if len(finite) < 2:
        return Verdict.unknown("no pair of finite points found")
    worst, witness, used = -INF, {}, 0
    for _ in range(samples):
        i, j = rng.integers(len(finite), size=2)
        x0, x1 = finite[int(i)], finite[int(j)]
        t = float(rng.uniform())
        f0, f1 = f(x0), f(x1)
        ft = f(sp.geodesic_point(x0, x1, t))
        d = sp.distance(x0, x1)
        rhs = (1 - t) * f0 + t * f1 - 0.5 * mu * t * (1 - t) * d * d
        gap = ft - rhs - 1e-9 * (1.0 + abs(f0) + abs(f1))
        used += 1
        if gap > worst:
            worst, witness = gap, {"x0": x0, "x1": x1, "t": t}
    if worst > 0:
        return Verdict.violation(worst, witness=witness)
    return Verdict.consistent(max(worst, 0.0), witness=witness, details={"samples": used})


DEFAULT_STEPS = tuple(2.0 ** -k for k in range(3, 21))


def directional_derivative(f: ConvexFunctional, x: Point, g: GeodesicSegment,
                           side: str = "lower", h_grid: Sequence[float] = DEFAULT_STEPS) -> float:
    """Geodesic one-sided derivative of ``f`` at ``x`` along ``g``.

    Difference quotients ``q(h) = (f(x_h) - f(x)) / (h L)`` are taken over
    the step schedule ``h_grid`` (fractions of the segment length ``L``).
    For convex ``f`` they decrease monotonically as ``h`` shrinks with an
    ``O(h)`` error, which Richardson extrapolation on consecutive steps
    removes. The two smallest-step extrapolations bracket the limit;
    ``side`` picks the smaller ("lower") or larger ("upper").
    """
    if side not in ("lower", "upper"):
        raise UsageError("side must be 'lower' or 'upper'")
    if g.start.space != x.space or x.space.distance(g.start, x) > 1e-12:
        raise UsageError("geodesic must start at x")
    fx = f(x)
    if fx == INF:
        raise UsageError("directional derivative needs f(x) finite")
    L = g.length
    if L == 0.0:
        raise UsageError("degenerate geodesic")
    steps = sorted(h_grid, reverse=True)
    if len(steps) < 3:
        raise UsageError("step schedule needs at least three steps")
    qs = []
    for h in steps:
        v = f(x.space.geodesic_point(g.start, g.end, h))
        qs.append(INF if v == INF else (v - fx) / (h * L))
    if all(q == INF for q in qs):
        return INF
    est = []
    for k in (len(steps) - 1, len(steps) - 2):
        q0, q1 = qs[k - 1], qs[k]
        if q0 == INF or q1 == INF:
            est.append(q1)
            continue
        r = steps[k - 1] / steps[k]
        est.append((r * q1 - q0) / (r - 1.0))
    return min(est) if side == "lower" else max(est)


def check_proper(f: ConvexFunctional, rng: np.random.Generator | None = None,
                 samples: int = 64) -> bool:
    rng = rng if rng is not None else np.random.default_rng(0)
    return any(f(p) < INF for p in f.sample_domain(rng, samples))
