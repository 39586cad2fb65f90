"""Numerical checks of convergence notions for sequences of convex functionals.

Limits are read off tail windows ``n_min <= n <= n_max``: ``lim sup`` is
the window maximum and ``lim inf`` the window minimum. Every check is a
necessary-condition test on a finite grid of points, lambdas and probe
sequences, so a ConsistentWith verdict supports a statement without
proving it, while a Violated verdict comes with the witness that broke it.

Values of ``+inf`` are compared through ``1 / v``: a sequence is taken to
diverge to ``+inf`` when its tail stays above ``1 / tol_seq``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .families import FunctionSequence, RegionSequence
from .functionals import (INF, ConvexFunctional, FunctionalFromCallable, Indicator,
                          directional_derivative)
from .prox import ProxParams, ProxResult, SlopeBudget, _ratio, prox, slope
from .regions import Region, hausdorff
from .spaces import GeodesicSegment, Point, weak_limit_test
from .verdict import Outcome, TheoremReport, UsageError, Verdict, all_of, implication

DEFAULT_LAMBDAS = (1.0, 0.5, 0.1, 0.01)
MODES = ("pointwise", "envelope", "prox", "gamma", "mosco")
THEOREMS = ("thm1", "thm2", "mainthm", "bacak_fwd", "bacak2_bwd", "attouch_hadamard")
ONE_SIDED = "finite probe families: condition (i) is checked as a necessary condition only"


@dataclass(frozen=True)
class TailWindow:
    n_min: int = 128
    n_max: int = 256
    tol_seq: float = 1e-2
    stride: int = 1

    def __post_init__(self):
        if not 1 <= self.n_min < self.n_max:
            raise UsageError("tail window needs 1 <= n_min < n_max")
        if not self.tol_seq > 0:
            raise UsageError("tol_seq must be > 0")
        if self.stride < 1:
            raise UsageError("stride must be >= 1")

    def indices(self) -> list[int]:
        ns = list(range(self.n_min, self.n_max + 1, self.stride))
        if ns[-1] != self.n_max:
            ns.append(self.n_max)
        return ns

    def sparse(self, count: int = 9) -> list[int]:
        """About ``count`` indices spread evenly over the window, ends included."""
        ns = np.linspace(self.n_min, self.n_max, max(count, 2)).round().astype(int)
        return sorted(set(int(n) for n in ns))

    def doubled(self) -> "TailWindow":
        return TailWindow(self.n_min, 2 * self.n_max, self.tol_seq, self.stride)


@dataclass(frozen=True)
class ModeSpec:
    mode: str = "envelope"
    points: tuple = ()
    lambdas: tuple = DEFAULT_LAMBDAS
    tail: TailWindow = TailWindow()

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}; valid modes: {', '.join(MODES)}")
        if not self.points:
            raise UsageError("point grid is empty")
        if not self.lambdas or any(not l > 0 for l in self.lambdas):
            raise UsageError("lambda grid must be nonempty and positive")

    def with_mode(self, mode: str) -> "ModeSpec":
        return ModeSpec(mode, self.points, self.lambdas, self.tail)

    @property
    def tol(self) -> float:
        return self.tail.tol_seq


class Lab:
    """Cached evaluations of a sequence and its limit.

    Index ``n = 0`` stands for the limit ``f``. Prox results, values and
    slopes are memoized per ``(n, point, lambda)``, so theorem suites that
    share sub-checks pay for each solve once.
    """

    def __init__(self, seq: FunctionSequence, f: ConvexFunctional | None = None,
                 params: ProxParams = ProxParams(), budget: SlopeBudget = SlopeBudget()):
        self.seq = seq
        self.f = f if f is not None else seq.limit
        if self.f is None:
            raise UsageError(f"{seq.label}: no limit functional given")
        if self.f.space != seq.space:
            raise UsageError("limit and sequence live in different spaces")
        self.params, self.budget = params, budget
        self._prox: dict = {}
        self._val: dict = {}
        self._slope: dict = {}

    @property
    def space(self):
        return self.seq.space

    def member(self, n: int) -> ConvexFunctional:
        return self.f if n == 0 else self.seq.at(n)

    def value(self, n: int, x: Point) -> float:
        key = (n, x.key())
        if key not in self._val:
            self._val[key] = self.member(n)(x)
        return self._val[key]

    def prox(self, n: int, x: Point, lam: float) -> ProxResult:
        key = (n, x.key(), float(lam))
        if key not in self._prox:
            self._prox[key] = prox(self.member(n), x, self.params.with_lam(lam))
        return self._prox[key]

    def slope(self, n: int, x: Point) -> float:
        key = (n, x.key())
        if key not in self._slope:
            self._slope[key] = slope(self.member(n), x, self.budget).value
        return self._slope[key]

    def envelope_functional(self, n: int, lam: float) -> ConvexFunctional:
        return FunctionalFromCallable(self.space, lambda y: self.prox(n, y, lam).envelope,
                                      f"envelope[{n}]")


def _gap(v: float, target: float) -> float:
    """``|v - target|`` with ``+inf`` handled through ``1 / v``."""
    if target == INF:
        if v == INF:
            return 0.0
        return 1.0 / v if v > 0 else INF
    if v == INF:
        return INF
    return abs(v - target)


def _range(vals: Sequence[float]) -> float:
    finite = [v for v in vals if v != INF]
    if len(finite) != len(vals):
        return INF if finite else 0.0
    return max(vals) - min(vals)


def _tail_verdict(table: Mapping[tuple, Mapping[int, float]], tol: float, name: str,
                  labels: Sequence[str], notes: str = "") -> Verdict:
    """Worst tail residual over a table ``case -> {n: residual}``.

    ``labels`` name the components of each case tuple for the witness.
    """
    worst, wit = -INF, {}
    per_n: dict[int, float] = {}
    for case, row in table.items():
        for n, r in row.items():
            per_n[n] = max(per_n.get(n, 0.0), r)
            if r > worst:
                worst, wit = r, dict(zip(labels, case), n=n)
    series = {f"n_vs_{name}_residual": tuple(sorted(per_n.items()))}
    v = Verdict.from_residual(max(worst, 0.0), tol, witness=wit, series=series, notes=notes)
    if v.violated:
        rates = [_decay_rate(row) for row in table.values() if max(row.values()) > tol]
        if rates and min(rates) >= DECAY_EXPONENT:
            return Verdict.unknown(
                f"residual above tol_seq but decaying like n^-{min(rates):.2g}; "
                "the window ends before it settles", v.residual, witness=wit, series=series,
                details={"decay_exponent": min(rates)})
    return v


DECAY_EXPONENT = 0.5


def _decay_rate(row: Mapping[int, float]) -> float:
    """Fitted ``a`` in ``r ~ n^-a`` between the first and last quarters of
    a tail (maxima over each quarter, so oscillation reads as no decay)."""
    ns = sorted(row)
    q = max(len(ns) // 4, 1)
    first = max(row[n] for n in ns[:q])
    last = max(row[n] for n in ns[-q:])
    if last == 0.0:
        return INF
    if first == INF or last == INF or first <= last:
        return 0.0
    return math.log(first / last) / math.log(ns[-1] / ns[0])


# ---------------------------------------------------------------- limit modes

def limit_mode_check(seq: FunctionSequence, f: ConvexFunctional | None, spec: ModeSpec,
                     lab: Lab | None = None) -> Verdict:
    """Pointwise, envelope or prox convergence of ``f^n`` to ``f`` on the grid."""
    if spec.mode not in ("pointwise", "envelope", "prox"):
        raise UsageError("limit_mode_check handles pointwise, envelope and prox modes")
    lab = lab or Lab(seq, f)
    ns = spec.tail.indices()
    table: dict[tuple, dict[int, float]] = {}
    raw: dict[tuple, list[float]] = {}
    failed = []
    per_lambda: dict[float, dict[int, float]] = {}
    if spec.mode == "pointwise":
        for x in spec.points:
            fx = lab.value(0, x)
            vals = [lab.value(n, x) for n in ns]
            table[(x, None)] = {n: _gap(v, fx) for n, v in zip(ns, vals)}
            raw[(x, None)] = vals
    else:
        for lam in spec.lambdas:
            for x in spec.points:
                lim = lab.prox(0, x, lam)
                if not lim.converged:
                    failed.append((x, lam, 0))
                row, vals = {}, []
                for n in ns:
                    r = lab.prox(n, x, lam)
                    if not r.converged:
                        failed.append((x, lam, n))
                    if spec.mode == "envelope":
                        row[n] = abs(r.envelope - lim.envelope)
                        vals.append(r.envelope)
                    else:
                        row[n] = lab.space.distance(r.minimizer, lim.minimizer)
                        vals.append(row[n])
                    per_lambda.setdefault(lam, {})
                    per_lambda[lam][n] = max(per_lambda[lam].get(n, 0.0), row[n])
                table[(x, lam)] = row
                raw[(x, lam)] = vals
    v = _tail_verdict(table, spec.tol, spec.mode, ("x", "lambda"))
    ranges = [_range(vals) for vals in raw.values()]
    series = dict(v.series)
    for lam, row in per_lambda.items():
        series[f"lambda={lam:g}_n_vs_{spec.mode}_residual"] = tuple(sorted(row.items()))
    details = {"oscillation_max": max(ranges), "oscillation_min": min(ranges),
               "n_min": spec.tail.n_min, "n_max": spec.tail.n_max}
    if failed:
        return Verdict.unknown(f"prox solver did not certify {len(failed)} solves",
                               residual=v.residual, witness=v.witness, series=series,
                               details=details)
    return Verdict(v.outcome, v.residual, v.witness, v.notes, series=series, details=details)


# ---------------------------------------------------------------- Mosco

ProbeFactory = Callable[[int], Point]


def _probe_sequences(x: Point, rng: np.random.Generator) -> dict[str, ProbeFactory]:
    """Strongly convergent probes ``x_n -> x``: constant, rays shrinking
    like ``n^-2``, and a sequence alternating between two directions."""
    sp = x.space
    dirs = sp.directions(x, rng, 0 if sp.complete_lines else 2)
    probes: dict[str, ProbeFactory] = {"constant": lambda n: x}
    rays = [sp.ray(x, v) for v in dirs]
    for i, ray in enumerate(rays):
        probes[f"ray{i}"] = (lambda ray: lambda n: ray(1.0 / (n * n)))(ray)
    if len(rays) >= 2:
        a, b = rays[0], rays[1]
        probes["alternating"] = lambda n: (a if n % 2 else b)(1.0 / (n * n))
    return probes


def _weak_bundle(x: Point, rng: np.random.Generator) -> list[GeodesicSegment]:
    sp = x.space
    dirs = sp.directions(x, rng, 2)
    return [GeodesicSegment(x, sp.ray(x, v)(1.0)) for v in dirs]


def _condition_i(lab: Lab, x: Point, ns: list[int], probes: Mapping[str, ProbeFactory],
                 tol: float):
    fx = lab.value(0, x)
    worst, wit = -INF, {}
    for name, make in probes.items():
        vals = [lab.member(n)(make(n)) for n in ns]
        lo = min(vals)
        r = _gap(lo, INF) if fx == INF else (fx - lo if lo != INF else -INF)
        if r > worst:
            worst, wit = r, {"x": x, "probe": name, "n": ns[int(np.argmin(vals))]}
    return max(worst, 0.0), wit


def _condition_ii(lab: Lab, x: Point, ns: list[int], recovery: str):
    """Best of the recovery strategies; returns ``(residual, witness)``."""
    fx = lab.value(0, x)
    if fx == INF:
        return 0.0, {"x": x, "strategy": "any"}
    sp = lab.space
    best, best_wit = INF, {}
    strategies = ["prox", "constant"] if recovery == "prox" else ["constant"]
    for strat in strategies:
        worst, wit = 0.0, {}
        for n in ns:
            if strat == "prox":
                y = lab.prox(n, x, 1.0 / n).minimizer
            else:
                y = x
            fy = lab.member(n)(y)
            r = max(sp.distance(y, x), (fy - fx) if fy != INF else INF)
            if r > worst:
                worst, wit = r, {"x": x, "n": n, "strategy": strat}
        if worst < best:
            best, best_wit = worst, wit
    return best, best_wit


def mosco_check(seq: FunctionSequence, f: ConvexFunctional | None, spec: ModeSpec,
                probes: Mapping[str, Callable[[int], Point]] | None = None,
                recovery: str = "prox", lab: Lab | None = None,
                strong_only: bool = False, seed: int = 0) -> Verdict:
    """Conditions (i) and (ii) of Mosco convergence on the point grid.

    (ii) looks for a recovery sequence ``y_n -> x`` with
    ``lim sup f^n(y_n) <= f(x)``; the default strategy is
    ``y_n = J^n_{1/n} x`` with the constant sequence as fallback.
    (i) checks ``f(x) <= lim inf f^n(x_n)`` along built-in strongly
    convergent probes plus user probes ``{name: (x, n) -> x_n}``. User
    probes must first pass :func:`weak_limit_test`; rejected ones are listed
    in the notes. ``strong_only`` drops user probes, giving the Gamma
    variant.
    """
    if recovery not in ("prox", "constant"):
        raise UsageError("recovery strategy must be 'prox' or 'constant'")
    lab = lab or Lab(seq, f)
    rng = np.random.default_rng(seed)
    ns = spec.tail.indices()
    tol = spec.tol
    rows_i, rows_ii, rejected = {}, {}, []
    worst_i, wit_i, worst_ii, wit_ii = 0.0, {}, 0.0, {}
    for x in spec.points:
        pr = _probe_sequences(x, rng)
        if probes and not strong_only:
            for name, make in probes.items():
                seq_pts = [make(x, n) for n in range(1, spec.tail.n_max + 1)]
                wv = weak_limit_test(seq_pts, x, _weak_bundle(x, rng),
                                     (spec.tail.n_min, spec.tail.n_max), tol)
                if wv.ok:
                    pr[f"user:{name}"] = (lambda pts: lambda n: pts[n - 1])(seq_pts)
                else:
                    rejected.append(name)
        r1, w1 = _condition_i(lab, x, ns, pr, tol)
        r2, w2 = _condition_ii(lab, x, ns, recovery)
        rows_i[x.key()], rows_ii[x.key()] = r1, r2
        if r1 >= worst_i:
            worst_i, wit_i = r1, w1
        if r2 >= worst_ii:
            worst_ii, wit_ii = r2, w2
    notes = [ONE_SIDED]
    if lab.space.dim == 1 or lab.space.kind == "spider":
        notes.append("weak and strong convergence coincide in this space")
    if rejected:
        notes.append("probes rejected by the weak-limit test: " + ", ".join(sorted(set(rejected))))
    v_i = Verdict.from_residual(worst_i, tol, witness=wit_i)
    v_ii = Verdict.from_residual(worst_ii, tol, witness=wit_ii)
    name = "gamma" if strong_only else "mosco"
    return all_of({"condition_i": v_i, "condition_ii": v_ii}, notes="; ".join(notes),
                  details={"mode": name})


def gamma_check(seq: FunctionSequence, f: ConvexFunctional | None, spec: ModeSpec,
                lab: Lab | None = None, seed: int = 0) -> Verdict:
    return mosco_check(seq, f, spec, None, "prox", lab, strong_only=True, seed=seed)


def _monotonicity(regions: RegionSequence, ns: list[int], rng) -> str | None:
    def inside(a: Region, b: Region) -> bool:
        pts = list(a.anchors()) + a.sample(rng, 16)
        return all(b.contains(p) for p in pts)
    pairs = list(zip(ns, ns[1:]))
    if all(inside(regions.at(m), regions.at(n)) for n, m in pairs):
        return "nonincreasing"
    if all(inside(regions.at(n), regions.at(m)) for n, m in pairs):
        return "nondecreasing"
    return None


def set_mosco_check(regions: RegionSequence, limit_region: Region | None, spec: ModeSpec,
                    seed: int = 0) -> Verdict:
    """Mosco convergence of ``C_n`` to ``C`` through their indicators.

    Monotone inputs get a predicted limit (the intersection when
    nonincreasing, the closure of the union when nondecreasing), read off
    the last member of the window and compared with ``limit_region`` in
    Hausdorff distance over probe points. The envelope residual of the
    indicators is reported as a separate part.
    """
    rng = np.random.default_rng(seed)
    ns = spec.tail.indices()
    mono = _monotonicity(regions, ns, rng)
    if limit_region is None:
        if mono is None:
            raise UsageError("non-monotone region sequence needs an explicit limit region")
        limit_region = regions.at(spec.tail.n_max)
    seq = regions.indicators()
    f = Indicator(limit_region)
    lab = Lab(seq, f)
    parts = {"mosco": mosco_check(seq, f, spec.with_mode("mosco"), lab=lab, seed=seed),
             "envelope": limit_mode_check(seq, f, spec.with_mode("envelope"), lab)}
    if mono is not None:
        predicted = regions.at(spec.tail.n_max)
        probes = list(spec.points) + list(limit_region.anchors()) + list(predicted.anchors())
        h = hausdorff(predicted, limit_region, probes)
        parts["predicted_limit"] = Verdict.from_residual(
            h, spec.tol, witness={"monotone": mono}, notes=f"{mono} sequence")
    return all_of(parts, notes=f"monotonicity: {mono or 'none detected'}")


# ---------------------------------------------------------------- slopes

@dataclass
class SlopeEnvelopeProfile:
    """Tail estimates of ``lim sup_n |df^n|(x)`` on a grid.

    ``in_A`` says every estimate is finite and not growing with ``n``;
    ``in_A0`` additionally asks for one bound ``C`` over the grid, which on
    a finite grid is the maximum of the per-point bounds.
    """

    points: tuple
    bounds: dict            # point key -> C(x)
    growth: dict            # point key -> fitted exponent of n
    in_A: Outcome
    in_A0: Outcome
    C: float
    series: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    def bound(self, x: Point) -> float:
        return self.bounds[x.key()]

    @property
    def verdict(self) -> Verdict:
        notes = "uniform bound C=%.6g" % self.C if self.in_A is Outcome.CONSISTENT else ""
        # residual: fastest fitted growth of a slope tail (divergent above 0.5)
        rate = max((max(a, 0.0) for a in self.growth.values()), default=0.0)
        return Verdict(self.in_A, rate, self.witness, notes,
                       details={"C": self.C, "in_A0": self.in_A0.value},
                       series=self.series)


GROWTH_EXPONENT = 0.5


def asymptotic_slope_check(seq: FunctionSequence, points: Sequence[Point], spec: ModeSpec,
                           lab: Lab | None = None) -> SlopeEnvelopeProfile:
    """Per-point tail maxima of slopes and membership in ``A`` / ``A_0``.

    A tail is called divergent when it is infinite or grows like ``n^a``
    with ``a > 0.5`` between the window ends (and exceeds 1).
    """
    if not points:
        raise UsageError("point grid is empty")
    lab = lab or Lab(seq, seq.limit if seq.limit is not None else seq.at(1))
    ns = spec.tail.indices()
    bounds, growth, series = {}, {}, {}
    out = Outcome.CONSISTENT
    witness = {}
    worst = 0.0
    for x in points:
        s = [lab.slope(n, x) for n in ns]
        C = max(s)
        if C == INF:
            a = INF
        elif s[0] > 0 and s[-1] > 0:
            a = math.log(s[-1] / s[0]) / math.log(ns[-1] / ns[0])
        else:
            a = 0.0 if s[-1] <= s[0] else INF
        divergent = C == INF or (a > GROWTH_EXPONENT and s[-1] > 1.0)
        bounds[x.key()], growth[x.key()] = C, a
        series[f"x={x.space.point_coords_text(x.coords)}_n_vs_slope"] = tuple(zip(ns, s))
        if divergent:
            out = Outcome.VIOLATED
            witness = {"x": x, "n": ns[-1], "slope": s[-1], "growth_exponent": a}
        elif C > worst and out is Outcome.CONSISTENT:
            worst, witness = C, {"x": x, "n": ns[int(np.argmax(s))]}
    C = max(bounds.values())
    return SlopeEnvelopeProfile(tuple(points), bounds, growth, out, out,
                                C if out is Outcome.CONSISTENT else INF, series, witness)


def cone_closure_check(seqA: FunctionSequence, seqB: FunctionSequence, alpha: float,
                       beta: float, points: Sequence[Point], spec: ModeSpec,
                       tol_slope: float = 1e-6) -> Verdict:
    """``h^n = alpha f^n + beta g^n`` has slope tails bounded by the weighted
    sum of those of ``f^n`` and ``g^n``, so it stays in ``A``."""
    if not (alpha > 0 and beta > 0):
        raise UsageError("alpha and beta must be > 0")
    pA = asymptotic_slope_check(seqA, points, spec)
    pB = asymptotic_slope_check(seqB, points, spec)
    if not (pA.in_A is Outcome.CONSISTENT and pB.in_A is Outcome.CONSISTENT):
        return Verdict.unknown("an input sequence is not in A on this grid")
    h = seqA.combine(seqB, alpha, beta)
    pH = asymptotic_slope_check(h, points, spec)
    worst, wit = -INF, {}
    table = []
    for x in points:
        rhs = alpha * pA.bound(x) + beta * pB.bound(x)
        gap = pH.bound(x) - rhs
        table.append((x, pH.bound(x), rhs))
        if gap > worst:
            worst, wit = gap, {"x": x, "bound": rhs, "slope": pH.bound(x)}
    bound = Verdict.from_residual(max(worst, 0.0), tol_slope, witness=wit)
    return all_of({"bound": bound, "membership": pH.verdict},
                  details={"table": table})


def sufficient_condition_check(seq: FunctionSequence, f: ConvexFunctional | None,
                               points: Sequence[Point], spec: ModeSpec,
                               y_samples: int = 64, seed: int = 0,
                               lab: Lab | None = None) -> TheoremReport:
    """Uniform convergence of the slope ratios ``g^n(.; x) -> g(.; x)``
    implies ``|df^n|(x) -> |df|(x)`` on ``dom |df|``.

    The sup over ``y`` runs over global samples plus shrinking rays; it is
    recomputed with twice the global samples and called unstable (hence
    Inconclusive) when the two estimates differ by more than ``tol_seq / 2``.
    """
    lab = lab or Lab(seq, f)
    rng = np.random.default_rng(seed)
    ns = spec.tail.indices()
    tol = spec.tol
    sp = lab.space
    pointwise = limit_mode_check(seq, lab.f, ModeSpec("pointwise", tuple(points),
                                                      spec.lambdas, spec.tail), lab)
    dom = [x for x in points if lab.value(0, x) < INF and lab.slope(0, x) < INF]
    if not dom:
        return implication("sufficient_condition", {"pointwise": pointwise},
                           {"slope_limit": Verdict.unknown("no grid point in dom |df|")})

    def sup_diff(x, ys, n):
        fxn, fx = lab.value(n, x), lab.value(0, x)
        best = 0.0
        for y in ys:
            if sp.distance(x, y) == 0.0:
                continue
            a = INF if fxn == INF else _ratio(lab.member(n), x, fxn, y)
            b = _ratio(lab.f, x, fx, y)
            best = max(best, abs(a - b) if a != INF else INF)
        return best

    worst, wit, unstable = 0.0, {}, []
    for x in dom:
        local = [sp.ray(x, v)(2.0 ** -k) for v in sp.directions(x, rng, 2) for k in range(0, 27)]
        glob = lab.f.sample_domain(rng, 2 * y_samples, center=x, scale=2.0)
        est_small = max(sup_diff(x, local + glob[:y_samples], n) for n in ns)
        est_full = max(sup_diff(x, local + glob, n) for n in ns)
        if abs(est_full - est_small) > tol / 2 and est_full != INF:
            unstable.append(x)
        if est_full >= worst:
            worst, wit = est_full, {"x": x}
    hyp = Verdict.from_residual(worst, tol, witness=wit)
    if unstable:
        hyp = Verdict.unknown("sup estimate unstable under sample doubling",
                              residual=worst, witness={"x": unstable[0]})
    table = {(x, None): {n: abs(lab.slope(n, x) - lab.slope(0, x)) for n in ns} for x in dom}
    concl = _tail_verdict(table, tol, "slope", ("x", "lambda"))
    profile = asymptotic_slope_check(seq, dom, spec, lab)
    return implication("sufficient_condition", {"pointwise": pointwise, "uniform_ratio": hyp},
                       {"slope_limit": concl, "membership_A": profile.verdict})


# ---------------------------------------------------------------- normalization

def _normalization_tails(lab: Lab, xs: Callable[[int], Point], x: Point, ns: list[int],
                         tol: float) -> Verdict:
    sp = lab.space
    fx, sx = lab.value(0, x), lab.slope(0, x)
    rows = {"distance": {}, "value": {}, "slope": {}}
    for n in ns:
        xn = xs(n)
        rows["distance"][n] = sp.distance(xn, x)
        rows["value"][n] = _gap(lab.value(n, xn), fx)
        rows["slope"][n] = _gap(lab.slope(n, xn), sx) if sx != INF else _gap(lab.slope(n, xn), INF)
    parts = {k: _tail_verdict({(x,): row}, tol, k, ("x",)) for k, row in rows.items()}
    return all_of(parts)


def normalization_check(seq: FunctionSequence, f: ConvexFunctional | None, x0: Point,
                        lam: float, spec: ModeSpec, lab: Lab | None = None,
                        mosco: Verdict | None = None) -> Verdict:
    """``x_n = J^n_lam x0`` and ``x = J_lam x0`` satisfy ``x_n -> x``,
    ``f^n(x_n) -> f(x)`` and ``|df^n|(x_n) -> |df|(x)``.

    Requires a ConsistentWith Mosco verdict (computed on the grid plus
    ``x0`` unless supplied); raises :class:`UsageError` otherwise.
    """
    lab = lab or Lab(seq, f)
    if mosco is None:
        pts = tuple(spec.points) + (x0,)
        mosco = mosco_check(seq, lab.f, ModeSpec("mosco", pts, spec.lambdas, spec.tail), lab=lab)
    if not mosco.ok:
        raise UsageError("normalization_check needs Mosco convergence, which was not established")
    x = lab.prox(0, x0, lam).minimizer
    return _normalization_tails(lab, lambda n: lab.prox(n, x0, lam).minimizer, x,
                                spec.tail.indices(), spec.tol)


def equi_lipschitz_check(seq: FunctionSequence, lam: float, x0: Point, region: Region,
                         samples: int = 12, spec: ModeSpec | None = None, seed: int = 0,
                         lab: Lab | None = None) -> Verdict:
    """Envelopes ``f^n_lam`` share one Lipschitz constant on ``region``.

    Precondition: ``f^n_lam(x0)`` converges (tail range below ``tol_seq``).
    (a) checks ``f^n(x) + r (d(x, x0)^2 + 1) >= 0`` with
    ``r = max(1, 1 - 2 lam min_n f^n_lam(x0)) / (2 lam)`` on samples;
    (b) takes Lipschitz quotients of ``f^n_lam`` over sample pairs on a
    sparse set of ``n`` and asks the later half of the window not to
    exceed the earlier half by more than 10 percent.
    """
    if spec is None:
        spec = ModeSpec("envelope", (x0,))
    lab = lab or Lab(seq, seq.limit)
    rng = np.random.default_rng(seed)
    ns = spec.tail.indices()
    sp = lab.space
    env0 = [lab.prox(n, x0, lam).envelope for n in ns]
    spread = max(env0) - min(env0)
    pre = Verdict.from_residual(spread, spec.tol, witness={"x0": x0, "lambda": lam},
                                notes="tail range of f^n_lam(x0)")
    if not pre.ok:
        return all_of({"precondition": pre}, notes="envelopes at x0 do not converge")
    r = max(1.0, 1.0 - 2.0 * lam * min(env0)) / (2.0 * lam)
    probes = region.sample(rng, samples) + [sp.random_point(rng, 4.0, x0) for _ in range(samples)]
    worst_a, wit_a = -INF, {}
    for n in ns:
        fn = lab.member(n)
        for z in probes:
            v = fn(z)
            if v == INF:
                continue
            d = sp.distance(z, x0)
            gap = -(v + r * (d * d + 1.0))
            if gap > worst_a:
                worst_a, wit_a = gap, {"x": z, "n": n}
    cert = Verdict.from_residual(max(worst_a, 0.0), 0.0, witness=wit_a,
                                 details={"r": r})
    pts = (list(region.anchors()) + region.sample(rng, samples))[:samples]
    sparse = spec.tail.sparse(9)
    L = {}
    for n in sparse:
        env = [lab.prox(n, z, lam).envelope for z in pts]
        best = 0.0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = sp.distance(pts[i], pts[j])
                if d > 1e-9:
                    best = max(best, abs(env[i] - env[j]) / d)
        L[n] = best
    half = len(sparse) // 2
    early = max(L[n] for n in sparse[:half + 1])
    late = max(L[n] for n in sparse[half:])
    growth = max(late - 1.1 * early, 0.0)
    lip = Verdict.from_residual(growth, spec.tol, witness={"C_K": max(L.values())},
                                series={"n_vs_lipschitz": tuple(sorted(L.items()))},
                                details={"C_K": max(L.values())})
    return all_of({"precondition": pre, "lower_bound": cert, "lipschitz": lip},
                  details={"C_K": max(L.values()), "r": r})


# ---------------------------------------------------------------- integral identity

def integral_identity_check(f: ConvexFunctional, x0: Point, x: Point, lam: float,
                            nodes: int = 1024, tol: float = 1e-6,
                            params: ProxParams = ProxParams(),
                            envelope: Callable[[Point], float] | None = None) -> Verdict:
    """Rebuild ``f_lam(x) - f_lam(x0)`` as ``int_0^1 g'(t) dt`` with
    ``g(t) = f_lam(x_t)`` along the geodesic from ``x0`` to ``x``.

    ``g'(t)`` is the average of the forward derivative and the negated
    backward derivative at each midpoint node (one-sided averaging keeps
    kinks harmless); the composite midpoint rule does the integral.
    """
    sp = x.space
    L = sp.distance(x0, x)
    if L == 0.0:
        return Verdict.consistent(0.0, notes="x equals x0")
    if envelope is None:
        cache: dict = {}

        def envelope(y):
            k = y.key()
            if k not in cache:
                cache[k] = prox(f, y, params.with_lam(lam)).envelope
            return cache[k]
    env = FunctionalFromCallable(sp, envelope, "envelope")
    steps = (2.0 ** -8, 2.0 ** -9, 2.0 ** -10)
    total = 0.0
    for i in range(nodes):
        t = (i + 0.5) / nodes
        xt = sp.geodesic_point(x0, x, t)
        fwd = directional_derivative(env, xt, GeodesicSegment(xt, x), "lower", steps)
        bwd = directional_derivative(env, xt, GeodesicSegment(xt, x0), "lower", steps)
        total += 0.5 * (fwd - bwd) * L / nodes
    direct = envelope(x) - envelope(x0)
    err = abs(total - direct)
    return Verdict.from_residual(err, tol, witness={"x0": x0, "x": x, "lambda": lam},
                                 details={"quadrature": total, "direct": direct, "nodes": nodes})


# ---------------------------------------------------------------- theorem suites

class _Suite:
    """Sub-checks shared between theorem suites, computed on demand."""

    def __init__(self, seq, f, spec: ModeSpec, lab: Lab, seed: int):
        self.seq, self.spec, self.lab, self.seed = seq, spec, lab, seed
        self._memo: dict[str, Verdict] = {}

    def get(self, name: str) -> Verdict:
        if name not in self._memo:
            self._memo[name] = getattr(self, "_" + name)()
        return self._memo[name]

    def _pointwise(self):
        return limit_mode_check(self.seq, self.lab.f, self.spec.with_mode("pointwise"), self.lab)

    def _envelope(self):
        return limit_mode_check(self.seq, self.lab.f, self.spec.with_mode("envelope"), self.lab)

    def _prox(self):
        return limit_mode_check(self.seq, self.lab.f, self.spec.with_mode("prox"), self.lab)

    def _mosco(self):
        return mosco_check(self.seq, self.lab.f, self.spec.with_mode("mosco"), lab=self.lab,
                           seed=self.seed)

    def _A(self):
        pts = list(self.spec.points)
        seen = {p.key() for p in pts}
        for lam in self.spec.lambdas:
            for x in self.spec.points:
                r = self.lab.prox(0, x, lam)
                if r.converged and r.minimizer.key() not in seen:
                    seen.add(r.minimizer.key())
                    pts.append(r.minimizer)
        return asymptotic_slope_check(self.seq, pts, self.spec, self.lab).verdict

    def _diagonal(self):
        """``lim sup f^n(J^n_{lam(n)} x) <= f(x)`` with ``lam(n) = 1/sqrt(n)``."""
        lab, ns = self.lab, self.spec.tail.indices()
        table = {}
        for x in self.spec.points:
            fx = lab.value(0, x)
            row = {}
            for n in ns:
                r = lab.prox(n, x, 1.0 / math.sqrt(n))
                v = lab.value(n, r.minimizer)
                row[n] = 0.0 if fx == INF else max(v - fx, 0.0) if v != INF else INF
            table[(x,)] = row
        return _tail_verdict(table, self.spec.tol, "diagonal", ("x",),
                             notes="lambda(n) = 1/sqrt(n); informational")


def _iff(a: Verdict, b: Verdict, notes: str) -> Verdict:
    """``a <=> b``: consistent when both hold or both fail."""
    if a.inconclusive or b.inconclusive:
        return Verdict.unknown("a side of the equivalence is inconclusive",
                               parts={"left": a, "right": b})
    if a.ok == b.ok:
        return Verdict.consistent(0.0 if a.ok else max(a.residual, b.residual), notes=notes,
                                  parts={"left": a, "right": b})
    bad = b if a.ok else a
    return Verdict.violation(bad.residual, witness=dict(bad.witness), notes=notes,
                             parts={"left": a, "right": b})


def _direction(premise: Verdict, conclusion: Verdict, notes: str) -> Verdict:
    """One direction of an equivalence: vacuous when the premise fails."""
    if premise.ok:
        return Verdict(conclusion.outcome, conclusion.residual, conclusion.witness, notes,
                       parts={"premise": premise, "conclusion": conclusion})
    if premise.violated:
        return Verdict.consistent(0.0, notes=notes + " (premise fails; holds vacuously)",
                                  parts={"premise": premise, "conclusion": conclusion})
    return Verdict.unknown(notes + " (premise inconclusive)",
                           parts={"premise": premise, "conclusion": conclusion})


def theorem_verify(theorem_id: str, seq: FunctionSequence, f: ConvexFunctional | None,
                   spec: ModeSpec, extras: Mapping | None = None, lab: Lab | None = None,
                   seed: int = 0) -> TheoremReport:
    """Check one theorem of the convergence web on a family.

    Hypotheses and conclusions are evaluated as sub-checks; the conclusion
    is only asserted when every hypothesis holds (see
    :func:`~hadprox.verdict.implication`).
    """
    if theorem_id not in THEOREMS:
        raise UsageError(f"unknown theorem {theorem_id!r}; valid: {', '.join(THEOREMS)}")
    lab = lab or Lab(seq, f)
    extras = dict(extras or {})
    S = _Suite(seq, lab.f, spec, lab, seed)
    g = S.get
    if theorem_id == "thm1":
        return implication("thm1", {"pointwise": g("pointwise"), "A(H)": g("A"),
                                    "prox": g("prox")},
                           {"envelope": g("envelope")})
    if theorem_id == "thm2":
        return implication("thm2", {"A(H)": g("A"), "envelope": g("envelope")},
                           {"prox": g("prox"), "pointwise": g("pointwise")},
                           notes="diagonal lambda(n) = 1/sqrt(n) reported as auxiliary",
                           auxiliary={"diagonal": g("diagonal")})
    if theorem_id == "bacak_fwd":
        return implication("bacak_fwd", {"mosco": g("mosco")},
                           {"envelope": g("envelope"), "prox": g("prox")})
    if theorem_id == "bacak2_bwd":
        return implication("bacak2_bwd", {"envelope": g("envelope")}, {"mosco": g("mosco")})
    if theorem_id == "mainthm":
        right = all_of({"pointwise": g("pointwise"), "prox": g("prox")})
        fwd = _direction(g("mosco"), right, "mosco => pointwise and prox")
        bwd = _direction(right, g("mosco"), "pointwise and prox => mosco")
        return implication("mainthm", {"A(H)": g("A")}, {"forward": fwd, "backward": bwd},
                           auxiliary={"equivalence": _iff(g("mosco"), right, "mosco <=> both")})
    return _attouch(S, spec, extras)


def _attouch(S: _Suite, spec: ModeSpec, extras: dict) -> TheoremReport:
    lab = S.lab
    sp = lab.space
    x0 = extras.get("x0", spec.points[0])
    ends = extras.get("bundle") or [p for p in spec.points if sp.distance(p, x0) > 0]
    if not ends:
        raise UsageError("attouch_hadamard needs geodesics: supply a bundle or a wider grid")
    ts = tuple(extras.get("t_samples", (0.0, 0.25, 0.5, 0.75)))
    lam_d = float(extras.get("lambda", spec.lambdas[0]))
    nodes = int(extras.get("nodes", 1024))
    ns = spec.tail.indices()

    # normalization at x0: the recovery sequence J^n_{1/n} x0, or x0 itself
    cands = {"recovery": lambda n: lab.prox(n, x0, 1.0 / n).minimizer, "constant": lambda n: x0}
    norm_parts = {k: _normalization_tails(lab, xs, x0, ns, spec.tol) for k, xs in cands.items()}
    best = min(norm_parts, key=lambda k: (not norm_parts[k].ok, norm_parts[k].residual))
    norm = norm_parts[best]
    norm = Verdict(norm.outcome, norm.residual, dict(norm.witness, sequence=best), norm.notes,
                   parts=norm.parts)

    # directional derivatives of envelopes along the bundle
    steps = tuple(2.0 ** -k for k in range(14, 21))
    table = {}
    failures = 0
    for e in ends:
        for t in ts:
            xt = sp.geodesic_point(x0, e, t)
            seg = GeodesicSegment(xt, e)
            try:
                d0 = directional_derivative(lab.envelope_functional(0, lam_d), xt, seg, "lower", steps)
                row = {}
                for n in spec.tail.sparse(9):
                    dn = directional_derivative(lab.envelope_functional(n, lam_d), xt, seg,
                                                "lower", steps)
                    row[n] = abs(dn - d0)
                table[(xt, e)] = row
            except UsageError:
                failures += 1
    deriv = _tail_verdict(table, spec.tol, "derivative", ("x_t", "end"),
                          notes=f"lambda={lam_d:g}, sparse n")
    hyps = {"prox": S.get("prox"), "normalization": norm, "derivatives": deriv}

    far = max(ends, key=lambda e: sp.distance(x0, e))
    aux = {}
    for n in (0, ns[-1]):
        aux[f"integral_identity[n={n or 'limit'}]"] = integral_identity_check(
            lab.member(n), x0, far, lam_d, nodes,
            envelope=lambda y, n=n: lab.prox(n, y, lam_d).envelope)
    return implication("attouch_hadamard", hyps, {"envelope": S.get("envelope")},
                       auxiliary=aux)
