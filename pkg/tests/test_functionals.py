import math

import numpy as np
import pytest

from hadprox import (Busemann, Constant, Distance, DistanceSquared, Euclidean, GeodesicSegment,
                     HyperbolicHalfPlane, Linear, Max, MetricSpider, ProductSpace, Sum,
                     UsageError, convexity_check, directional_derivative, evaluate,
                     indicator_of_set, zero)
from hadprox.functionals import FunctionalFromCallable, Lifted
from hadprox.regions import Ball, Interval, ProductRegion, Segment, Star

E1, E2, H, S = Euclidean(1), Euclidean(2), HyperbolicHalfPlane(), MetricSpider(3)
RNG = np.random.default_rng


# ---------------------------------------------------------------- evaluate

def test_zero_is_zero():
    """[TRIVIAL]"""
    assert evaluate(zero(H), H.point(3.0, 0.2)) == 0.0


def test_indicator_outside_is_infinite():
    """[TRIVIAL]"""
    box = indicator_of_set(Interval(E1, 0.0, 1.0))
    assert evaluate(box, E1.point(2.0)) == math.inf
    assert evaluate(box, E1.point(0.5)) == 0.0


def test_distance_squared_by_definition():
    """[TRIVIAL] d(x, a) = 3 gives 9/2."""
    assert evaluate(DistanceSquared(S.point(1, 1.0)), S.point(2, 2.0)) == 4.5


def test_ball_indicator_in_halfplane():
    """[TRIVIAL] the centre belongs to the ball."""
    f = indicator_of_set(Ball(H.point(0.0, 2.0), 1.0))
    assert evaluate(f, H.point(0.0, 2.0)) == 0.0
    assert evaluate(f, H.point(0.0, 2.0 * math.e ** 1.01)) == math.inf


def test_empty_region_is_not_proper():
    with pytest.raises(UsageError):
        indicator_of_set(Interval(E1, 1.0, 0.0))


def test_evaluate_rejects_foreign_point():
    with pytest.raises(UsageError):
        evaluate(zero(E1), E2.origin())


def test_improper_values_are_reported():
    nan = FunctionalFromCallable(E1, lambda y: math.nan)
    with pytest.raises(UsageError):
        nan(E1.origin())


def test_sum_and_max_combine_values():
    a, b = Distance(E1.point(0.0)), Linear(E1, [2.0], 1.0)
    x = E1.point(-1.5)
    assert Sum([a, b], [2.0, 0.5])(x) == pytest.approx(2 * 1.5 + 0.5 * (-3.0 + 1.0))
    assert Max([a, b])(x) == 1.5
    assert (a + b)(x) == pytest.approx(1.5 - 2.0)
    assert Sum([a, indicator_of_set(Interval(E1, 0.0, 1.0))])(x) == math.inf


def test_busemann_values():
    """[TRIVIAL] closed forms on each space."""
    assert Busemann(H)(H.point(5.0, math.e)) == pytest.approx(-1.0)
    assert Busemann(H, 0.0)(H.point(0.0, 1.0)) == pytest.approx(0.0)
    assert Busemann(S, 2)(S.point(2, 3.0)) == -3.0
    assert Busemann(S, 2)(S.point(1, 3.0)) == 3.0
    assert Busemann(E2, [3.0, 4.0])(E2.point(1.0, 1.0)) == pytest.approx(-1.4)


def test_lifted_reads_one_factor():
    P = ProductSpace((E1, S))
    f = Lifted(P, 1, Distance(S.origin()))
    assert f(P.point((9.0,), (2, 1.5))) == 1.5
    g = Lifted(P, 0, indicator_of_set(Interval(E1, 0.0, 1.0)))
    assert isinstance(g.domain, ProductRegion)
    assert g(P.point((2.0,), (1, 0.0))) == math.inf


# ---------------------------------------------------------------- regions

@pytest.mark.parametrize("region, inside, outside", [
    (Interval(E1, 0.0, 1.0), (0.0,), (1.5,)),
    (Ball(E2.point(0, 0), 1.0), (0.6, 0.6), (1.0, 1.0)),
    (Segment(E2.point(0, 0), E2.point(2, 0)), (1.0, 0.0), (1.0, 0.1)),
    (Star(S, (1.0, 2.0, 0.0)), (2, 1.5), (3, 0.5)),
])
def test_indicator_zero_exactly_on_region(region, inside, outside):
    f = indicator_of_set(region)
    sp = region.space
    assert f(sp.point(*inside)) == 0.0 and region.contains(sp.point(*inside))
    assert f(sp.point(*outside)) == math.inf and not region.contains(sp.point(*outside))
    for p in region.sample(RNG(0), 20):
        assert f(p) == 0.0


def test_projection_onto_regions():
    assert Interval(E1, 0.0, 1.0).project(E1.point(3.0)) == E1.point(1.0)
    p = Ball(E2.point(0, 0), 1.0).project(E2.point(3.0, 4.0))
    assert p.coords == pytest.approx((0.6, 0.8))
    q = Star(S, (1.0, 2.0, 0.0)).project(S.point(3, 0.5))
    assert q == S.origin()


# ---------------------------------------------------------------- convexity

def test_convexity_of_zero():
    """[TRIVIAL]"""
    assert convexity_check(zero(E1)).ok


@pytest.mark.parametrize("space", [E2, H, S])
def test_distance_squared_is_one_strongly_convex(space):
    """[DERIVED] d(., a)^2 / 2 is 1-strongly convex on CAT(0) spaces."""
    f = DistanceSquared(space.random_point(RNG(3), 1.0))
    assert convexity_check(f, mu=1.0, samples=300, rng=RNG(1)).ok


def test_abs_is_not_strongly_convex():
    """[DERIVED] linear pieces leave no room for the quadratic term."""
    v = convexity_check(Distance(E1.point(0.0)), mu=0.1)
    assert v.violated
    w = v.witness
    same_side = (w["x0"].coords[0] >= 0) == (w["x1"].coords[0] >= 0)
    assert same_side


def test_nonconvex_callable_is_caught():
    wave = FunctionalFromCallable(E1, lambda y: math.sin(3.0 * y.coords[0]))
    assert convexity_check(wave).violated


def test_convexity_check_usage():
    with pytest.raises(UsageError):
        convexity_check(zero(E1), samples=0)
    with pytest.raises(UsageError):
        convexity_check(zero(E1), mu=-1.0)


# ---------------------------------------------------------------- derivatives

def _seg(x, y):
    return GeodesicSegment(x, y)


def test_directional_derivative_of_constant():
    """[TRIVIAL]"""
    x = H.point(0.0, 1.0)
    assert directional_derivative(Constant(H, 3.0), x, _seg(x, H.point(1.0, 2.0))) == 0.0


def test_directional_derivative_of_abs_at_kink():
    """[DERIVED] the quotient equals 1 for every step."""
    o = E1.point(0.0)
    for side in ("lower", "upper"):
        d = directional_derivative(Distance(o), o, _seg(o, E1.point(1.0)), side)
        assert d == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("space", [E2, H, S])
def test_directional_derivative_at_minimizer(space):
    """[TRIVIAL] d(., a)^2 / 2 is flat at a in every direction."""
    rng = RNG(5)
    a = space.random_point(rng, 1.0)
    d = directional_derivative(DistanceSquared(a), a, _seg(a, space.random_point(rng, 1.0)))
    assert abs(d) < 1e-9


def test_directional_derivative_smooth_value():
    """[DERIVED] d/dt of (1 + t)^2 / 2 at t = 0 along a unit segment is 1."""
    f = DistanceSquared(E1.point(-1.0))
    o = E1.point(0.0)
    assert directional_derivative(f, o, _seg(o, E1.point(1.0))) == pytest.approx(1.0, abs=1e-9)


def test_directional_derivative_errors():
    o, one = E1.point(0.0), E1.point(1.0)
    box = indicator_of_set(Interval(E1, 0.0, 0.5))
    with pytest.raises(UsageError):
        directional_derivative(box, E1.point(2.0), _seg(E1.point(2.0), one))
    with pytest.raises(UsageError):
        directional_derivative(zero(E1), o, _seg(one, o))
    with pytest.raises(UsageError):
        directional_derivative(zero(E1), o, _seg(o, one), side="middle")
    point_box = indicator_of_set(Interval(E1, 0.0, 0.0))
    assert directional_derivative(point_box, o, _seg(o, one)) == math.inf


def test_linear_needs_matching_coefficients():
    with pytest.raises(UsageError):
        Linear(E2, [1.0])
    with pytest.raises(UsageError):
        Linear(H, [1.0, 0.0])
    with pytest.raises(UsageError):
        Sum([zero(E1), zero(E2)])
