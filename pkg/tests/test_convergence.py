import pytest

from hadprox import (Constant, Distance, DistanceSquared, Euclidean, HyperbolicHalfPlane,
                     MetricSpider, Outcome, UsageError)
from hadprox.convergence import (ModeSpec, TailWindow, asymptotic_slope_check, cone_closure_check,
                                 equi_lipschitz_check, gamma_check, integral_identity_check,
                                 limit_mode_check, mosco_check, normalization_check,
                                 set_mosco_check, sufficient_condition_check, theorem_verify)
from hadprox.families import (RegionSequence, constant, moving_anchor, nested_intervals,
                              oscillating, scaled_abs, shifted_abs, steep_quadratic, zeros)
from hadprox.regions import Interval

E1 = Euclidean(1)
ABS = Distance(E1.point(0.0))
GRID = tuple(E1.point(v) for v in (-2.0, -1.0, 0.0, 0.5, 2.0))
UNIT_GRID = tuple(E1.point(v) for v in (-1.0, 0.0, 0.5, 1.0))
WINDOW = TailWindow(32, 64, 0.05)


def spec(mode, points=GRID, lambdas=(1.0, 0.1)):
    return ModeSpec(mode, points, lambdas, WINDOW)


# ---------------------------------------------------------------- specs

def test_spec_validation():
    with pytest.raises(UsageError):
        ModeSpec("sideways", GRID)
    with pytest.raises(UsageError):
        ModeSpec("envelope", ())
    with pytest.raises(UsageError):
        ModeSpec("envelope", GRID, (1.0, 0.0))
    with pytest.raises(UsageError):
        TailWindow(10, 10)


def test_window_indices():
    assert TailWindow(4, 10, stride=4).indices() == [4, 8, 10]
    assert TailWindow(128, 256).sparse(3) == [128, 192, 256]


# ---------------------------------------------------------------- limit modes

@pytest.mark.parametrize("mode", ["pointwise", "envelope", "prox"])
def test_constant_sequence_converges_in_every_mode(mode):
    """[TRIVIAL]"""
    v = limit_mode_check(constant(ABS), None, spec(mode))
    assert v.ok and v.residual == 0.0


@pytest.mark.parametrize("mode", ["pointwise", "envelope", "prox"])
def test_shifted_abs_converges_in_every_mode(mode):
    """[DERIVED] every gap is at most the shift 1/n."""
    v = limit_mode_check(shifted_abs(E1), None, spec(mode))
    assert v.ok and v.residual <= 1.0 / 32 + 1e-12


def test_oscillating_constants():
    """[PAPER] identity resolvents, envelopes alternating between 0 and 1."""
    seq = oscillating(E1)
    assert limit_mode_check(seq, None, spec("prox")).residual == 0.0
    env = limit_mode_check(seq, None, spec("envelope"))
    assert env.violated and env.details["oscillation_min"] >= 0.9


# ---------------------------------------------------------------- Mosco

def test_mosco_constant_sequence():
    """[TRIVIAL]"""
    assert mosco_check(constant(ABS), None, spec("mosco")).ok


def test_mosco_oscillating_has_no_limit():
    """[PAPER] against 0 the recovery condition fails (even members are 1);
    against 1 the lower bound fails on the constant probe at odd n."""
    v = mosco_check(oscillating(E1), None, spec("mosco"))
    assert v.violated and v.parts["condition_i"].ok and v.parts["condition_ii"].violated
    w = mosco_check(oscillating(E1), Constant(E1, 1.0), spec("mosco"))
    assert w.violated and w.parts["condition_i"].violated
    assert w.parts["condition_i"].witness["probe"] == "constant"
    assert w.parts["condition_i"].witness["n"] % 2 == 1


def test_mosco_shifted_abs():
    """[DERIVED] recovery y_n = J^n x; probes see shifts of 1/n."""
    assert mosco_check(shifted_abs(E1), None, spec("mosco")).ok


def test_mosco_implies_gamma_on_same_probes():
    for seq in (shifted_abs(E1), scaled_abs(E1), constant(ABS)):
        m = mosco_check(seq, None, spec("mosco", UNIT_GRID))
        if m.ok:
            assert gamma_check(seq, None, spec("gamma", UNIT_GRID)).ok


@pytest.mark.parametrize("direction", ["shrinking", "growing"])
def test_set_mosco_nested_intervals(direction):
    """[PAPER] intersection of nonincreasing sets, closure of the union of
    nondecreasing ones."""
    regions = nested_intervals(E1, 0.0, 1.0, direction)
    v = set_mosco_check(regions, Interval(E1, 0.0, 1.0), spec("mosco", lambdas=(1.0,)))
    assert v.ok


def test_set_mosco_small_lambda_is_inconclusive():
    """[DERIVED] at x = 2 the shrinking-interval envelope gap is
    (2/n - 1/n^2) / (2 lam): above tol_seq for small lam on a finite window,
    but decaying like 1/n, so not a violation."""
    regions = nested_intervals(E1, 0.0, 1.0, "shrinking")
    v = set_mosco_check(regions, Interval(E1, 0.0, 1.0), spec("mosco", lambdas=(0.01,)))
    n = WINDOW.n_min
    assert v.parts["envelope"].residual == pytest.approx((2 / n - 1 / n**2) / 0.02, rel=1e-9)
    assert v.outcome is Outcome.INCONCLUSIVE


def test_set_mosco_constant_sets():
    """[TRIVIAL]"""
    C = Interval(E1, 0.0, 1.0)
    regions = RegionSequence(E1, lambda n: C, "C", C)
    assert set_mosco_check(regions, C, spec("mosco")).ok


def test_set_mosco_wrong_limit():
    regions = nested_intervals(E1, 0.0, 1.0, "shrinking")
    v = set_mosco_check(regions, Interval(E1, 0.0, 2.0), spec("mosco", lambdas=(1.0,)))
    assert v.violated


# ---------------------------------------------------------------- slopes

def test_slope_profile_of_zeros():
    """[TRIVIAL]"""
    p = asymptotic_slope_check(zeros(E1), GRID, spec("pointwise"))
    assert p.in_A0 is Outcome.CONSISTENT and p.C == 0.0


def test_slope_profile_of_shifted_abs():
    """[DERIVED] translates of |x| have slope at most 1."""
    p = asymptotic_slope_check(shifted_abs(E1), GRID, spec("pointwise"))
    assert p.in_A0 is Outcome.CONSISTENT
    assert p.C == pytest.approx(1.0, abs=1e-9)


def test_slope_profile_of_steep_quadratic():
    """[DERIVED] slope 2 n |x| diverges at x = 1."""
    p = asymptotic_slope_check(steep_quadratic(E1), (E1.point(1.0),), spec("pointwise"))
    assert p.in_A is Outcome.VIOLATED and p.verdict.violated


def test_cone_closure_with_zero():
    """[TRIVIAL]"""
    assert cone_closure_check(shifted_abs(E1), zeros(E1), 1.0, 1.0, GRID, spec("pointwise")).ok


def test_cone_closure_abs_plus_quadratic():
    """[DERIVED] bound 1 + |x| from the calculus of each term."""
    q = constant(DistanceSquared(E1.point(0.0)))
    v = cone_closure_check(shifted_abs(E1), q, 1.0, 1.0, GRID, spec("pointwise"))
    assert v.ok
    for x, slope_h, rhs in v.details["table"]:
        assert rhs == pytest.approx(1.0 + abs(x.coords[0]), abs=1e-6)


def test_cone_closure_positive_homogeneity():
    """[DERIVED] 2|x| + 3|x| has slope 5 away from 0."""
    v = cone_closure_check(constant(ABS), constant(ABS), 2.0, 3.0, GRID, spec("pointwise"))
    assert v.ok
    assert max(rhs for _, _, rhs in v.details["table"]) == pytest.approx(5.0, abs=1e-6)
    with pytest.raises(UsageError):
        cone_closure_check(constant(ABS), constant(ABS), 0.0, 1.0, GRID, spec("pointwise"))


def test_sufficient_condition_constant():
    """[TRIVIAL]"""
    assert sufficient_condition_check(constant(ABS), None, GRID, spec("pointwise")).outcome \
        is Outcome.CONSISTENT


def test_sufficient_condition_scaled_abs():
    """[DERIVED] ratio differences are at most 1/n; slopes tend to 1."""
    r = sufficient_condition_check(scaled_abs(E1), None, UNIT_GRID, spec("pointwise"))
    assert r.outcome is Outcome.CONSISTENT and not r.falsified


def test_sufficient_condition_shifted_abs_hypothesis_fails():
    """[DERIVED] near x the ratio flips side, so the uniform hypothesis fails
    and the conclusion is not asserted."""
    r = sufficient_condition_check(shifted_abs(E1), None, GRID, spec("pointwise"))
    assert r.hypothesis_verdicts["uniform_ratio"].violated
    assert r.outcome is Outcome.INCONCLUSIVE and not r.falsified


# ---------------------------------------------------------------- normalization

def test_normalization_constant_sequence():
    """[TRIVIAL]"""
    v = normalization_check(constant(ABS), None, E1.point(2.0), 1.0, spec("mosco"))
    assert v.ok and v.residual == 0.0


def test_normalization_shifted_abs():
    """[DERIVED] x_n = 1 + 1/n -> 1 = J_1 2, f^n(x_n) = 1 = f(1)."""
    v = normalization_check(shifted_abs(E1), None, E1.point(2.0), 1.0, spec("mosco"))
    assert v.ok and v.residual <= 1.0 / 32 + 1e-9


def test_normalization_refuses_without_mosco():
    """[PAPER]"""
    with pytest.raises(UsageError):
        normalization_check(oscillating(E1), None, E1.point(2.0), 1.0, spec("mosco"))


# ---------------------------------------------------------------- equi-Lipschitz

def test_equi_lipschitz_zero():
    """[TRIVIAL]"""
    v = equi_lipschitz_check(zeros(E1), 1.0, E1.point(0.0), Interval(E1, -2.0, 2.0),
                             spec=spec("envelope"))
    assert v.ok and v.details["C_K"] == 0.0


def test_equi_lipschitz_shifted_abs():
    """[DERIVED] envelopes of translates of |x| are 1-Lipschitz."""
    v = equi_lipschitz_check(shifted_abs(E1), 1.0, E1.point(0.0), Interval(E1, -2.0, 2.0),
                             spec=spec("envelope"))
    assert v.ok and v.details["C_K"] <= 1.0 + 1e-9


def test_equi_lipschitz_steep_quadratic():
    """[DERIVED] f^n_lam(x) = n x^2 / (1 + 2 lam n) has slope below 2|x|/(2 lam) <= 2."""
    v = equi_lipschitz_check(steep_quadratic(E1), 1.0, E1.point(0.0), Interval(E1, -2.0, 2.0),
                             spec=spec("envelope"))
    assert v.ok and v.details["C_K"] <= 2.0 + 1e-9


# ---------------------------------------------------------------- theorems

def test_thm1_on_shifted_abs():
    """[DERIVED]"""
    r = theorem_verify("thm1", shifted_abs(E1), None, spec("envelope"))
    assert r.outcome is Outcome.CONSISTENT and not r.falsified
    assert all(v.ok for v in r.hypothesis_verdicts.values())


def test_thm1_on_oscillating_is_not_applicable():
    """[PAPER] the pointwise hypothesis fails, so the conclusion is not asserted."""
    r = theorem_verify("thm1", oscillating(E1), None, spec("envelope"))
    assert r.hypothesis_verdicts["pointwise"].violated
    assert r.outcome is Outcome.INCONCLUSIVE and not r.falsified


def test_mainthm_on_constant_family():
    """[TRIVIAL]"""
    r = theorem_verify("mainthm", constant(ABS), None, spec("envelope"))
    assert r.outcome is Outcome.CONSISTENT
    assert r.conclusion_checks["forward"].ok and r.conclusion_checks["backward"].ok


def test_theorem_reports_never_claim_violated():
    for tid in ("thm1", "thm2", "mainthm", "bacak_fwd", "bacak2_bwd"):
        r = theorem_verify(tid, oscillating(E1), None, spec("envelope"))
        assert r.outcome is not Outcome.VIOLATED and not r.falsified


def test_unknown_theorem():
    with pytest.raises(UsageError):
        theorem_verify("fermat", constant(ABS), None, spec("envelope"))


def test_attouch_on_shifted_abs():
    r = theorem_verify("attouch_hadamard", shifted_abs(E1), None,
                       ModeSpec("envelope", (E1.point(0.0), E1.point(2.0)), (1.0,),
                                TailWindow(16, 32, 0.1)))
    assert r.outcome is Outcome.CONSISTENT
    assert all(v.ok for k, v in r.auxiliary.items() if k.startswith("integral_identity"))


# ---------------------------------------------------------------- integral identity

@pytest.mark.parametrize("space, a, x0, x", [
    (Euclidean(2), (1.0, -1.0), (0.0, 0.0), (2.0, 1.0)),
    (HyperbolicHalfPlane(), (0.0, 1.0), (1.0, 2.0), (-1.0, 0.5)),
    (MetricSpider(3), (2, 1.0), (1, 1.0), (1, 2.5)),
])
def test_integral_identity_distance_squared(space, a, x0, x):
    """[DERIVED] against the closed-form envelope D^2 / (2 (1 + lam))."""
    A = space.point(*a)
    f = DistanceSquared(A)
    closed = lambda p: space.distance(p, A) ** 2 / 4.0
    v = integral_identity_check(f, space.point(*x0), space.point(*x), 1.0, nodes=64,
                                envelope=closed)
    assert v.ok and v.residual < 1e-6


def test_moving_anchor_family_converges():
    S = MetricSpider(3)
    seq = moving_anchor(S.point(1, 1.0), S.point(2, 1.0))
    pts = (S.point(1, 0.5), S.point(3, 1.0))
    v = limit_mode_check(seq, None, ModeSpec("envelope", pts, (1.0,), TailWindow(32, 64, 0.1)))
    assert v.ok
