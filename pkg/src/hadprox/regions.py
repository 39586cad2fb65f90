"""Closed convex sets used as domains and indicator supports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spaces import (Euclidean, GeodesicSegment, MetricSpider, Point, ProductSpace,
                     Space, project_to_geodesic)
from .verdict import UsageError


class Region:
    space: Space

    def contains(self, y: Point) -> bool:
        raise NotImplementedError

    def project(self, y: Point) -> Point:
        """Nearest point of the region (closed convex, so unique)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> list[Point]:
        raise NotImplementedError

    def anchors(self) -> tuple[Point, ...]:
        return ()

    @property
    def empty(self) -> bool:
        return False

    def distance_to(self, y: Point) -> float:
        return self.space.distance(y, self.project(y))


@dataclass(frozen=True)
class Interval(Region):
    """``[lo, hi]`` on the real line; endpoints may be infinite."""

    space: Space
    lo: float
    hi: float

    def __post_init__(self):
        if not (isinstance(self.space, Euclidean) and self.space.n == 1):
            raise UsageError("interval regions live on euclidean(dim=1)")

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, y):
        return self.lo <= y.coords[0] <= self.hi

    def project(self, y):
        return Point(self.space, (min(max(y.coords[0], self.lo), self.hi),))

    def sample(self, rng, count):
        lo = self.lo if math.isfinite(self.lo) else min(self.hi, 0.0) - 4.0
        hi = self.hi if math.isfinite(self.hi) else max(self.lo, 0.0) + 4.0
        pts = [Point(self.space, (float(v),)) for v in rng.uniform(lo, hi, count)]
        return pts + [p for p in self.anchors()]

    def anchors(self):
        return tuple(Point(self.space, (v,)) for v in (self.lo, self.hi) if math.isfinite(v))

    def __str__(self):
        return f"[{self.lo:g}, {self.hi:g}]"


@dataclass(frozen=True)
class Segment(Region):
    """Geodesic segment ``[a, b]`` in any space."""

    a: Point
    b: Point

    @property
    def space(self):
        return self.a.space

    def contains(self, y):
        s = self.space
        L = s.distance(self.a, self.b)
        return s.distance(self.a, y) + s.distance(y, self.b) <= L + 1e-12 * (1.0 + L)

    def project(self, y):
        return project_to_geodesic(y, GeodesicSegment(self.a, self.b))[1]

    def sample(self, rng, count):
        s = self.space
        return [s.geodesic_point(self.a, self.b, float(t)) for t in rng.uniform(0, 1, count)] \
            + [self.a, self.b]

    def anchors(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Ball(Region):
    center: Point
    radius: float

    @property
    def space(self):
        return self.center.space

    @property
    def empty(self) -> bool:
        return self.radius < 0.0

    def contains(self, y):
        return self.space.distance(self.center, y) <= self.radius * (1.0 + 1e-12) + 1e-15

    def project(self, y):
        d = self.space.distance(self.center, y)
        if d <= self.radius:
            return y
        return self.space.geodesic_point(self.center, y, self.radius / d)

    def sample(self, rng, count):
        s = self.space
        out = []
        for _ in range(count):
            z = s.random_point(rng, 1.0, self.center)
            d = s.distance(self.center, z)
            if d > 0.0:
                u = float(rng.uniform()) * self.radius
                z = s.geodesic_point(self.center, z, min(u / d, 1.0)) if u < d else \
                    self.project(z)
            out.append(z)
        return out + [self.center]

    def anchors(self):
        return (self.center,)


@dataclass(frozen=True)
class Star(Region):
    """Sub-star of a spider: leg ``i`` truncated at radius ``caps[i-1]``.

    A cap of 0 keeps only the hub on that leg; ``inf`` keeps the whole leg.
    """

    space: Space
    caps: tuple

    def __post_init__(self):
        if not isinstance(self.space, MetricSpider):
            raise UsageError("star regions live on a spider")
        if len(self.caps) != self.space.legs:
            raise UsageError("star needs one cap per leg")
        if any(c < 0 for c in self.caps):
            raise UsageError("star caps must be >= 0")

    def contains(self, y):
        leg, r = y.coords
        return r <= self.caps[leg - 1]

    def project(self, y):
        leg, r = y.coords
        return Point(self.space, (leg, min(r, self.caps[leg - 1])))

    def sample(self, rng, count):
        out = []
        for _ in range(count):
            leg = int(rng.integers(1, self.space.legs + 1))
            cap = self.caps[leg - 1]
            cap = cap if math.isfinite(cap) else 4.0
            out.append(Point(self.space, (leg, float(rng.uniform(0.0, cap)))))
        return out + list(self.anchors())

    def anchors(self):
        return (self.space.origin(),) + tuple(
            Point(self.space, (i + 1, c)) for i, c in enumerate(self.caps)
            if math.isfinite(c) and c > 0)


@dataclass(frozen=True)
class ProductRegion(Region):
    space: Space
    regions: tuple

    def __post_init__(self):
        if not isinstance(self.space, ProductSpace):
            raise UsageError("product regions live on product spaces")
        if len(self.regions) != len(self.space.factors):
            raise UsageError("product region needs one region per factor")
        for r, f in zip(self.regions, self.space.factors):
            if r is not None and r.space != f:
                raise UsageError("product region factor mismatch")

    @property
    def empty(self) -> bool:
        return any(r is not None and r.empty for r in self.regions)

    def contains(self, y):
        return all(r is None or r.contains(p) for r, p in zip(self.regions, y.coords))

    def project(self, y):
        return Point(self.space, tuple(p if r is None else r.project(p)
                                       for r, p in zip(self.regions, y.coords)))

    def sample(self, rng, count):
        cols = []
        for r, f in zip(self.regions, self.space.factors):
            if r is None:
                cols.append([f.random_point(rng) for _ in range(count)])
            else:
                cols.append(r.sample(rng, count)[:count])
        return [Point(self.space, comps) for comps in zip(*cols)]

    def anchors(self):
        return (self.project(self.space.origin()),)


@dataclass(frozen=True)
class Intersection(Region):
    """Intersection of convex regions; projection is left to the prox solver."""

    regions: tuple

    def __post_init__(self):
        if not self.regions:
            raise UsageError("intersection of nothing")
        sp = self.regions[0].space
        if any(r.space != sp for r in self.regions):
            raise UsageError("intersection across different spaces")

    @property
    def space(self):
        return self.regions[0].space

    def contains(self, y):
        return all(r.contains(y) for r in self.regions)

    def project(self, y):
        raise NotImplementedError("no closed-form projection onto an intersection")

    def sample(self, rng, count):
        out = []
        for r in self.regions:
            out += [p for p in r.sample(rng, 4 * count) if self.contains(p)]
        # alternating projections land in the intersection when it is nonempty
        seeds = [r.sample(rng, 1)[0] for r in self.regions]
        for z in seeds:
            for _ in range(200):
                for r in self.regions:
                    try:
                        z = r.project(z)
                    except NotImplementedError:
                        pass
                if self.contains(z):
                    out.append(z)
                    break
        return out[: count + len(seeds)]

    def anchors(self):
        return tuple(a for r in self.regions for a in r.anchors() if self.contains(a))


def intersect(regions: Sequence[Region | None]) -> Region | None:
    rs = [r for r in regions if r is not None]
    if not rs:
        return None
    if len(rs) == 1:
        return rs[0]
    return Intersection(tuple(rs))


def hausdorff(a: Region, b: Region, probes: Sequence[Point]) -> float:
    """``sup_z |d(z, A) - d(z, B)|`` over probe points.

    For closed convex sets this supremum over the whole space equals the
    Hausdorff distance; over probes it is a lower estimate.
    """
    return max(abs(a.distance_to(z) - b.distance_to(z)) for z in probes)
