"""Random draws from the functional library, paired with oracle terms."""

from __future__ import annotations

import numpy as np

from hadprox import (Distance, DistanceSquared, Euclidean, Indicator, MetricSpider, Sum, zero)
from hadprox.regions import Interval, Star

from oracles import Term

KINDS = ("zero", "abs", "dist_sq", "indicator")


def draw_terms(rng: np.random.Generator, space) -> list[Term]:
    """A single term or a sum of two or three, at most one indicator."""
    spider = isinstance(space, MetricSpider)
    count = 1 if rng.random() < 0.5 else int(rng.integers(2, 4))
    terms, have_ind = [], False
    for _ in range(count):
        kind = KINDS[int(rng.integers(0, 4))]
        if kind == "indicator" and have_ind:
            kind = "dist_sq"
        have_ind |= kind == "indicator"
        w = float(rng.uniform(0.2, 3.0))
        if spider:
            a = (int(rng.integers(1, space.legs + 1)), float(rng.uniform(0.0, 3.0)))
            lo, hi = sorted(rng.uniform(0.0, 3.0, 2))
        else:
            a = (float(rng.uniform(-3.0, 3.0)),)
            lo, hi = sorted(rng.uniform(-3.0, 3.0, 2))
        terms.append(Term(kind, a, w, float(lo), float(hi)))
    return terms


def build(terms, space):
    """Package functional for a list of oracle terms."""
    parts = []
    for t in terms:
        if t.kind == "zero":
            parts.append(zero(space))
            continue
        if t.kind == "indicator":
            if isinstance(space, MetricSpider):
                caps = tuple(t.lo if leg == t.a[0] else t.hi for leg in range(1, space.legs + 1))
                parts.append(Indicator(Star(space, caps)))
            else:
                parts.append(Indicator(Interval(space, t.lo, t.hi)))
            continue
        a = space.point(*t.a)
        parts.append(Distance(a, t.w) if t.kind == "abs" else DistanceSquared(a, t.w))
    return parts[0] if len(parts) == 1 else Sum(parts)


def draw_point(rng: np.random.Generator, space):
    if isinstance(space, MetricSpider):
        return space.point(int(rng.integers(1, space.legs + 1)), float(rng.uniform(0.0, 4.0)))
    assert isinstance(space, Euclidean) and space.n == 1
    return space.point(float(rng.uniform(-4.0, 4.0)))


def draw_lambda(rng: np.random.Generator) -> float:
    return float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
