"""Indexed families ``n -> f^n`` of convex functionals with their limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .functionals import (Constant, ConvexFunctional, Distance, DistanceSquared, Indicator, Sum,
                          zero)
from .regions import Interval, Region
from .spaces import Euclidean, Point, Space
from .verdict import UsageError


@dataclass(eq=False)
class FunctionSequence:
    """``(f^n)_{n >= 1}`` given by a rule; members are built once and cached.

    ``limit`` is the functional the family is expected to converge to (or,
    for families without a limit, the candidate used in demonstrations).
    """

    space: Space
    rule: Callable[[int], ConvexFunctional]
    label: str = "f^n"
    limit: ConvexFunctional | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self._cached = lru_cache(maxsize=4096)(self._build)

    def _build(self, n: int) -> ConvexFunctional:
        f = self.rule(n)
        if f.space != self.space:
            raise UsageError(f"{self.label}: member {n} lives in another space")
        return f

    def at(self, n: int) -> ConvexFunctional:
        if n < 1:
            raise UsageError("sequence index starts at 1")
        return self._cached(int(n))

    def __getitem__(self, n: int) -> ConvexFunctional:
        return self.at(n)

    def combine(self, other: "FunctionSequence", alpha: float, beta: float) -> "FunctionSequence":
        """``alpha f^n + beta g^n``."""
        if other.space != self.space:
            raise UsageError("sequences live in different spaces")
        if alpha < 0 or beta < 0:
            raise UsageError("cone combinations need nonnegative weights")
        lim = None
        if self.limit is not None and other.limit is not None:
            lim = Sum((self.limit, other.limit), (alpha, beta))
        return FunctionSequence(self.space, lambda n: Sum((self.at(n), other.at(n)), (alpha, beta)),
                                f"{alpha:g}*({self.label}) + {beta:g}*({other.label})", lim)


@dataclass(eq=False)
class RegionSequence:
    space: Space
    rule: Callable[[int], Region]
    label: str = "C_n"
    limit: Region | None = None

    def at(self, n: int) -> Region:
        return self.rule(int(n))

    def indicators(self) -> FunctionSequence:
        lim = Indicator(self.limit) if self.limit is not None else None
        return FunctionSequence(self.space, lambda n: Indicator(self.at(n)),
                                f"indicator({self.label})", lim)


def _line(space: Space | None) -> Euclidean:
    space = space or Euclidean(1)
    if not (isinstance(space, Euclidean) and space.n == 1):
        raise UsageError("this family lives on euclidean(dim=1)")
    return space


def constant(f: ConvexFunctional) -> FunctionSequence:
    return FunctionSequence(f.space, lambda n: f, f"const({f.label})", f)


def shifted_abs(space: Space | None = None, c: float = 1.0) -> FunctionSequence:
    """``|x - c/n|``, converging to ``|x|`` in every sense."""
    E = _line(space)
    return FunctionSequence(E, lambda n: Distance(E.point(c / n)), f"|x - {c:g}/n|",
                            Distance(E.point(0.0)), {"c": c})


def scaled_abs(space: Space | None = None) -> FunctionSequence:
    """``(1 + 1/n) |x|``."""
    E = _line(space)
    return FunctionSequence(E, lambda n: Distance(E.point(0.0), 1.0 + 1.0 / n), "(1 + 1/n)|x|",
                            Distance(E.point(0.0)))


def oscillating(space: Space | None = None, low: float = 0.0,
                high: float = 1.0) -> FunctionSequence:
    """Constants ``low, high, low, high, ...``; no Mosco limit exists.

    The candidate limit is the constant ``low``.
    """
    space = space or Euclidean(1)
    lo, hi = Constant(space, low), Constant(space, high)
    return FunctionSequence(space, lambda n: lo if n % 2 == 1 else hi,
                            f"{low:g},{high:g},{low:g},{high:g},...", lo,
                            {"low": low, "high": high})


def steep_quadratic(space: Space | None = None) -> FunctionSequence:
    """``n x^2``; Mosco limit is the indicator of ``{0}``, slopes blow up."""
    E = _line(space)
    o = E.point(0.0)
    return FunctionSequence(E, lambda n: DistanceSquared(o, 2.0 * n), "n x^2",
                            Indicator(Interval(E, 0.0, 0.0)))


def nested_intervals(space: Space | None = None, lo: float = 0.0, hi: float = 1.0,
                     direction: str = "shrinking") -> RegionSequence:
    """``[lo, hi + 1/n]`` (shrinking) or ``[lo, hi - 1/n]`` (growing).

    Members that would be empty are clamped to ``{lo}``.
    """
    E = _line(space)
    if direction not in ("shrinking", "growing"):
        raise UsageError("direction must be 'shrinking' or 'growing'")
    sign = 1.0 if direction == "shrinking" else -1.0
    return RegionSequence(E, lambda n: Interval(E, lo, max(lo, hi + sign / n)),
                          f"[{lo:g}, {hi:g} {'+' if sign > 0 else '-'} 1/n]",
                          Interval(E, lo, hi))


def moving_anchor(anchor: Point, start: Point, weight: float = 1.0) -> FunctionSequence:
    """``weight d(., a_n)^2 / 2`` with ``a_n`` the point ``1/n`` of the way
    from ``anchor`` to ``start``; works in every model space."""
    sp = anchor.space
    if start.space != sp:
        raise UsageError("anchor and start live in different spaces")
    return FunctionSequence(
        sp, lambda n: DistanceSquared(sp.geodesic_point(anchor, start, 1.0 / n), weight),
        "dist_sq(., a_n)", DistanceSquared(anchor, weight))


def zeros(space: Space) -> FunctionSequence:
    return constant(zero(space))
