"""Proximal mappings, Moreau envelopes and slopes on model spaces.

The prox objective ``y -> f(y) + d(y, x)^2 / (2 lam)`` is (1/lam)-strongly
convex along geodesics, so it has a unique minimizer and the inequality

    f_lam(x) + d(J x, y)^2 / (2 lam) <= f(y) + d(y, x)^2 / (2 lam)

holds for every ``y``. The solver is derivative free: it picks the best of
a few candidate starts, then performs exact line minimizations along
geodesic lines through the current iterate until nothing improves, and
finally audits the inequality above on sample points around the result.
On the real line and on spiders one sweep over the lines through a point
covers the whole space, so the result is the global minimizer up to the
line-search tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .functionals import INF, ConvexFunctional, Indicator, convexity_check, nearest_domain_point
from .minimize import minimize_on_line
from .spaces import Point
from .verdict import UsageError, Verdict, implication

EPS = float(np.finfo(float).eps)
SLOPE_RADII = tuple(2.0 ** -k for k in range(0, 27))


@dataclass(frozen=True)
class ProxParams:
    lam: float = 1.0
    tol_min: float = 1e-10
    tol_point: float = 1e-8
    max_iter: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise UsageError("lambda must be > 0")
        if not (self.tol_min > 0 and self.tol_point > 0):
            raise UsageError("tolerances must be > 0")

    def with_lam(self, lam: float) -> "ProxParams":
        return ProxParams(lam, self.tol_min, self.tol_point, self.max_iter, self.seed)


@dataclass(frozen=True)
class ProxResult:
    minimizer: Point
    envelope: float
    objective_residual: float
    iterations: int
    converged: bool
    evaluations: int = 0


def _objective(f: ConvexFunctional, x: Point, lam: float):
    sp = x.space
    c = 0.5 / lam
    counter = [0]

    def phi(y: Point) -> float:
        counter[0] += 1
        v = f(y)
        if v == INF:
            return INF
        d = sp.distance(y, x)
        return v + c * d * d
    return phi, counter


def prox(f: ConvexFunctional, x: Point, p: ProxParams = ProxParams()) -> ProxResult:
    """Minimizer ``J_lam x`` and value ``f_lam(x)`` of the prox objective."""
    if x.space != f.space:
        raise UsageError("point and functional live in different spaces")
    sp = x.space
    lam = p.lam
    rng = np.random.default_rng(p.seed)
    phi, counter = _objective(f, x, lam)

    hints = [x, *f.anchors]
    nd = nearest_domain_point(f, x)
    if nd is not None:
        hints.append(nd)
    cands = hints + f.sample_domain(rng, 8, center=x)
    vals = [phi(y) for y in cands]
    i0 = min(range(len(vals)), key=vals.__getitem__)
    if vals[i0] == INF:
        if any(f(y) < INF for y in f.sample_domain(rng, 64)):
            pass
        else:
            raise UsageError(f"{f.label} looks improper: no finite value found")
        cands = f.sample_domain(rng, 64)
        vals = [phi(y) for y in cands]
        i0 = min(range(len(vals)), key=vals.__getitem__)
    y, val = cands[i0], vals[i0]
    scale = max(1.0, max(sp.distance(x, h) for h in hints), sp.distance(x, y))
    line_tol = min(1e-12, p.tol_point * 1e-4)

    extra = 0  # random lines are added only when the certificate fails
    iterations, all_ok = 0, True

    def step(ln):
        nonlocal y, val, iterations, all_ok
        r = minimize_on_line(lambda s: phi(ln(s)), ln.lo, ln.hi, scale=scale, tol=line_tol,
                             smooth_h=1e-4 * scale)
        iterations += 1
        # value comparisons are only meaningful above rounding noise;
        # polished steps are sharper than that, so they are taken unless
        # they are worse beyond it
        noise = 8.0 * EPS * (1.0 + abs(val))
        if r.value < val - noise or (r.polished and r.value <= val + noise):
            y, val = ln(r.s), r.value
        all_ok = all_ok and r.ok

    if not sp.complete_lines:
        # geodesics from x through the hints (exact for distance terms)
        for h in hints[1:]:
            ln = sp.line_toward(x, h)
            if ln is not None:
                step(ln)
    sweep_start = None
    residual = INF
    while iterations < p.max_iter:
        start_val, start_y = val, y
        # lines run through the current iterate (coordinate-descent order);
        # a per-sweep seed keeps any random directions fixed within a sweep
        sweep_seed = int(rng.integers(2**63))
        # where the lines through a point cover the space, lines toward the
        # hints add nothing
        targets = [] if sp.complete_lines else hints + [sweep_start] * (sweep_start is not None)
        i = n_lines = 0
        while True:
            # the set of lines can change with y (spider hub vs leg)
            # lines toward the hints go first: they often contain the answer
            lines = sp.lines_through(y, np.random.default_rng(sweep_seed), extra)
            n_lines = max(n_lines, len(lines))
            if i < len(targets):
                ln = sp.line_toward(y, targets[i])
            elif i - len(targets) < len(lines):
                ln = lines[i - len(targets)]
            else:
                break
            i += 1
            if ln is None:
                continue
            step(ln)
        sweep_start = start_y
        moved = sp.distance(start_y, y)
        stalled = (start_val - val <= 1e-14 * (1.0 + abs(val))
                   and moved <= 1e-2 * p.tol_point * scale)
        if sp.complete_lines or stalled:
            residual = _certificate(phi, f, x, y, val, lam, rng, scale, hints)
            if residual <= p.tol_min * (1.0 + abs(val)):
                break
            if sp.complete_lines and iterations > 4 * (n_lines + len(targets)):
                break
            extra += max(sp.dim, 2)
    converged = all_ok and residual <= p.tol_min * (1.0 + abs(val))
    return ProxResult(y, val, max(residual, 0.0), iterations, converged, counter[0])


def _certificate(phi, f, x, y, val, lam, rng, scale, hints) -> float:
    """Worst violation of the strong-convexity inequality on audit points.

    Near its minimum the objective is flat to second order, so comparing
    values in double precision locates the minimizer only to about
    ``rho = sqrt(2 lam eps |val|)``. A point error ``delta`` moves the
    inequality by ``delta r / lam`` at audit radius ``r``; that much slack
    (with ``delta = rho`` plus the line-search resolution) is allowed.
    """
    sp = y.space
    c = 0.5 / lam
    rho = math.sqrt(2.0 * lam * 8.0 * EPS * (1.0 + abs(val)))
    delta = rho + 1e-11 * (1.0 + scale)
    worst = -INF
    dirs = sp.directions(y, rng, 0 if sp.complete_lines else 2)
    audit = []
    for k in (1, 2, 3, 4, 6):
        r = scale * 10.0 ** -k
        audit += [(sp.ray(y, v)(r), r) for v in dirs]
    audit += [(h, sp.distance(h, y)) for h in hints]
    for z, r in audit:
        fz = phi(z)
        if fz == INF:
            continue
        d = sp.distance(y, z)
        gap = val + c * d * d - fz - delta * r / lam
        worst = max(worst, gap)
    return worst if worst > -INF else 0.0


def moreau_envelope(f: ConvexFunctional, x: Point, p: ProxParams = ProxParams()) -> float:
    return prox(f, x, p).envelope


def projection_onto_domain(f: ConvexFunctional, x: Point, p: ProxParams = ProxParams()) -> Point:
    """Nearest point of ``cl dom f``: closed form when available, otherwise
    the prox of the domain's indicator (which is the metric projection)."""
    nd = nearest_domain_point(f, x)
    if nd is not None:
        return nd
    return prox(Indicator(f.domain), x, p).minimizer


# ---------------------------------------------------------------- slope

@dataclass(frozen=True)
class SlopeBudget:
    directions: int = 8
    radii: tuple = SLOPE_RADII
    global_samples: int = 16
    refine_steps: int = 60
    scale: float = 1.0
    tol_slope: float = 1e-6
    seed: int = 0


@dataclass(frozen=True)
class SlopeEstimate:
    value: float
    witness: Point
    samples_used: int
    certified: bool = True
    notes: str = ""


def _ratio(f: ConvexFunctional, x: Point, fx: float, y: Point) -> float:
    d = x.space.distance(x, y)
    if d == 0.0:
        return 0.0
    fy = f(y)
    if fy == INF:
        return 0.0
    # discount the rounding error of the difference so the ratio stays a
    # lower bound on short steps, where cancellation dominates
    return max(fx - fy - 2.0 * EPS * (abs(fx) + abs(fy)), 0.0) / d


def slope(f: ConvexFunctional, x: Point, budget: SlopeBudget = SlopeBudget()) -> SlopeEstimate:
    """Lower estimate of ``sup_{y != x} max(f(x) - f(y), 0) / d(x, y)``.

    For convex ``f`` the ratio along a ray from ``x`` grows as the point
    approaches ``x``, so rays are probed on a shrinking radius schedule;
    global samples from the domain are added, and in spaces with a
    continuum of directions the best ray is refined by a shrinking random
    search over directions.
    """
    sp = x.space
    fx = f(x)
    if fx == INF:
        return SlopeEstimate(INF, x, 0)
    rng = np.random.default_rng(budget.seed)
    used = 0
    best, witness, best_dir = 0.0, x, None
    dirs = sp.directions(x, rng, 0 if sp.complete_lines else budget.directions)
    rmin = budget.scale * budget.radii[-1]
    for v in dirs:
        ray = sp.ray(x, v)
        for r in budget.radii:
            y = ray(budget.scale * r)
            q = _ratio(f, x, fx, y)
            used += 1
            if q > best:
                best, witness, best_dir = q, y, v
    for y in f.sample_domain(rng, budget.global_samples, center=x, scale=2.0 * budget.scale):
        q = _ratio(f, x, fx, y)
        used += 1
        if q > best:
            best, witness = q, y
    certified = True
    if best_dir is not None and not sp.complete_lines and budget.refine_steps > 0:
        sigma, last_gain = 0.5, 0.0
        qdir = _ratio(f, x, fx, sp.ray(x, best_dir)(rmin))
        for _ in range(budget.refine_steps):
            v = sp.perturb_direction(best_dir, sigma, rng)
            y = sp.ray(x, v)(rmin)
            q = _ratio(f, x, fx, y)
            used += 1
            if q > qdir:
                last_gain = q - qdir
                qdir, best_dir = q, v
                if q > best:
                    best, witness = q, y
            else:
                sigma *= 0.8
        certified = last_gain <= budget.tol_slope or sigma < 1e-3
    return SlopeEstimate(best, witness, used, certified)


# ---------------------------------------------------------------- lemma checks

def ubound_residual(f: ConvexFunctional, x: Point, p: ProxParams,
                    res: ProxResult | None = None,
                    budget: SlopeBudget = SlopeBudget()) -> float:
    """``|df|(J x) - d(J x, x) / lam``; nonpositive when the bound holds."""
    res = res or prox(f, x, p)
    s = slope(f, res.minimizer, budget).value
    return s - x.space.distance(res.minimizer, x) / p.lam


def id2_residual(f: ConvexFunctional, x: Point, p: ProxParams,
                 res: ProxResult | None = None,
                 budget: SlopeBudget = SlopeBudget()) -> float:
    """``(f(x) - f_lam(x)) / lam - |df|(x)^2 / 2``; nonpositive when it holds."""
    fx = f(x)
    if fx == INF:
        return -INF
    res = res or prox(f, x, p)
    s = slope(f, x, budget).value
    return (fx - res.envelope) / p.lam - 0.5 * s * s


def _lambda_tail(lambdas: Sequence[float], floor: float) -> list[float]:
    lams = sorted(set(float(l) for l in lambdas), reverse=True)
    lam = lams[-1]
    while lam * 0.1 >= floor * (1 - 1e-12):
        lam *= 0.1
        lams.append(lam)
    return lams


def verify_prox_lemmas(f: ConvexFunctional, x: Point, lambdas: Sequence[float],
                       p: ProxParams = ProxParams(), tol: float = 1e-6,
                       id1_lambda: float = 1e-6, id1_tol: float = 1e-3,
                       budget: SlopeBudget = SlopeBudget(), convexity_samples: int = 200):
    """Check the slope bound at ``J x``, the envelope gap bound, the
    resolvent path limit and envelope monotonicity for one ``(f, x)``.

    The lambda list is extended geometrically down to ``id1_lambda`` for the
    limit checks; the path limit is compared against the nearest point of
    the closure of the domain, computed independently of the solver when a
    closed form exists.
    """
    if not lambdas or any(l <= 0 for l in lambdas):
        raise UsageError("lambdas must be positive")
    sp = x.space
    rng = np.random.default_rng(p.seed)
    hyps = {"convexity": convexity_check(f, 0.0, convexity_samples, rng)}

    lams = _lambda_tail(lambdas, id1_lambda)
    results = {lam: prox(f, x, p.with_lam(lam)) for lam in lams}
    failed = [lam for lam, r in results.items() if not r.converged]
    series_env = tuple((lam, results[lam].envelope) for lam in lams)
    fx = f(x)

    def guard(name: str, build):
        if failed:
            return Verdict.unknown(f"prox solver did not converge at lambda={failed}")
        return build()

    def ubound():
        worst, wit = -INF, {}
        for lam in lambdas:
            r = ubound_residual(f, x, p.with_lam(lam), results[float(lam)], budget)
            if r > worst:
                worst, wit = r, {"lambda": lam, "J": results[float(lam)].minimizer}
        return Verdict.from_residual(worst, tol, witness=wit)

    def id2():
        if fx == INF:
            return Verdict.consistent(notes="f(x) = +inf: bound is vacuous")
        s = slope(f, x, budget).value
        worst, wit = -INF, {}
        for lam in lambdas:
            r = (fx - results[float(lam)].envelope) / lam - 0.5 * s * s
            if r > worst:
                worst, wit = r, {"lambda": lam}
        return Verdict.from_residual(worst, tol, witness=wit, details={"slope": s})

    def id1():
        target = projection_onto_domain(f, x, p)
        worst, wit = -INF, {}
        for a, b in zip(lams, lams[1:]):
            Ja, Jb = results[a].minimizer, results[b].minimizer
            bound = (1.0 - b / a) * sp.distance(x, Ja)
            gap = sp.distance(Ja, Jb) - bound
            if gap > worst:
                worst, wit = gap, {"lambda": b}
        path = Verdict.from_residual(worst, tol, witness=wit)
        lim_gap = sp.distance(results[lams[-1]].minimizer, target)
        limit = Verdict.from_residual(lim_gap, id1_tol,
                                      witness={"lambda": lams[-1], "target": target})
        series = tuple((lam, sp.distance(results[lam].minimizer, target)) for lam in lams)
        out = _merge(path, limit)
        return Verdict(out.outcome, out.residual, out.witness, parts={"path": path, "limit": limit},
                       series={"lambda_vs_distance_to_projection": series})

    def monotone():
        worst, wit = -INF, {}
        for a, b in zip(lams, lams[1:]):
            ea, eb = results[a].envelope, results[b].envelope
            gap = ea - eb - p.tol_min * (1.0 + abs(ea))
            if gap > worst:
                worst, wit = gap, {"lambda": b}
        mono = Verdict.from_residual(max(worst, 0.0), 0.0, witness=wit)
        if fx == INF:
            return Verdict(mono.outcome, mono.residual, mono.witness,
                           notes="x outside dom f: envelopes must grow without bound",
                           series={"lambda_vs_envelope": series_env})
        lim = abs(results[lams[-1]].envelope - fx)
        limit = Verdict.from_residual(lim, id1_tol, witness={"lambda": lams[-1]})
        out = _merge(mono, limit)
        return Verdict(out.outcome, out.residual, out.witness,
                       parts={"monotone": mono, "limit": limit},
                       series={"lambda_vs_envelope": series_env})

    conclusions = {
        "ubound": guard("ubound", ubound),
        "id2": guard("id2", id2),
        "id1": guard("id1", id1),
        "envelope_monotone": guard("envelope_monotone", monotone),
    }
    return implication("prox_lemmas", hyps, conclusions)


def _merge(a: Verdict, b: Verdict) -> Verdict:
    from .verdict import all_of
    return all_of({"a": a, "b": b})
