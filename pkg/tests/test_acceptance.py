"""Acceptance criteria, each at its stated tolerance.

Every test reports one pass/fail line (collected into the pytest summary).
Run directly with ``python3 tests/test_acceptance.py`` for the lines alone.
"""

import math
import re
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from hadprox import (DistanceSquared, Euclidean, HyperbolicHalfPlane, Indicator, Linear,
                     MetricSpider, ProductSpace, Sum, distance)
from hadprox.config import parse_config
from hadprox.convergence import (DEFAULT_LAMBDAS, ModeSpec, TailWindow, integral_identity_check,
                                 set_mosco_check, theorem_verify)
from hadprox.families import (nested_intervals, oscillating, scaled_abs, shifted_abs,
                              steep_quadratic)
from hadprox.prox import ProxParams, id2_residual, prox, ubound_residual
from hadprox.regions import Interval
from hadprox.runner import csv_text, run_suite
from hadprox.spaces import cat0_comparison_check

from acceptance_log import report
from corpus import build, draw_lambda, draw_point, draw_terms
from oracles import brute_prox_line, brute_prox_spider, spider_distance

ROOT = Path(__file__).resolve().parents[1]
LINE = Euclidean(1)
GRID = tuple(LINE.point(v) for v in (-2.0, -1.0, 0.0, 0.5, 2.0))


def test_c01_prox_matches_brute_force():
    """[DERIVED] dense-grid brute force on the line and on a 3-leg spider."""
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    worst_p = worst_v = 0.0
    unconverged = 0
    for space in (LINE, MetricSpider(3)):
        for _ in range(100):
            terms = draw_terms(rng, space)
            f, x, lam = build(terms, space), draw_point(rng, space), draw_lambda(rng)
            r = prox(f, x, ProxParams(lam))
            unconverged += not r.converged
            if isinstance(space, MetricSpider):
                p, v = brute_prox_spider(terms, x.coords, lam, space.legs)
                err = spider_distance(p, r.minimizer.coords)
            else:
                p, v = brute_prox_line(terms, x.coords[0], lam)
                err = abs(p - r.minimizer.coords[0])
            worst_p, worst_v = max(worst_p, err), max(worst_v, abs(v - r.envelope))
    dt = time.perf_counter() - t0
    ok = worst_p <= 1e-6 and worst_v <= 1e-8 and dt < 60.0 and unconverged == 0
    assert report(1, "prox oracle equivalence", ok,
                  f"200 draws, max point err {worst_p:.2e} (<=1e-6), max value err "
                  f"{worst_v:.2e} (<=1e-8), {unconverged} uncertified, {dt:.1f}s (<60s)")


def test_c02_distance_squared_closed_form():
    """[DERIVED] J x = x_t with t = lam/(1+lam), f_lam(x) = D^2/(2(1+lam))."""
    rng = np.random.default_rng(7)
    spaces = {"euclidean": Euclidean(2), "halfplane": HyperbolicHalfPlane(),
              "spider": MetricSpider(3),
              "product": ProductSpace((HyperbolicHalfPlane(), MetricSpider(3)))}
    worst = {}
    for name, sp in spaces.items():
        wp = wv = 0.0
        for _ in range(50):
            x, a = sp.random_point(rng, 2.0), sp.random_point(rng, 2.0)
            lam = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
            r = prox(DistanceSquared(a), x, ProxParams(lam))
            D = distance(x, a)
            wp = max(wp, distance(r.minimizer, sp.geodesic_point(x, a, lam / (1.0 + lam))))
            wv = max(wv, abs(r.envelope - D * D / (2.0 * (1.0 + lam))))
        worst[name] = (wp, wv)
    ok = all(p <= 1e-8 and v <= 1e-8 for p, v in worst.values())
    detail = ", ".join(f"{k} {p:.1e}/{v:.1e}" for k, (p, v) in worst.items())
    assert report(2, "distance-squared closed form", ok,
                  f"50 draws per space, max point/value err: {detail} (<=1e-8)")


def test_c03_slope_lemmas():
    """[DERIVED] residuals are <= 0 when the inequalities hold; [PAPER] the
    |x| instance at x=2, lam=1 is an equality: (2 - 1.5)/1 = 1^2/2."""
    rng = np.random.default_rng(11)
    worst_u = worst_2 = -math.inf
    for space in (LINE, MetricSpider(3)):
        for _ in range(50):
            f = build(draw_terms(rng, space), space)
            x, lam = draw_point(rng, space), draw_lambda(rng)
            p = ProxParams(lam)
            res = prox(f, x, p)
            worst_u = max(worst_u, ubound_residual(f, x, p, res))
            worst_2 = max(worst_2, id2_residual(f, x, p, res))
    from hadprox import Distance
    eq = id2_residual(Distance(LINE.point(0.0)), LINE.point(2.0), ProxParams(1.0))
    ok = worst_u <= 1e-6 and worst_2 <= 1e-6 and abs(eq) <= 1e-6
    assert report(3, "slope lemmas", ok,
                  f"100 draws, max ubound residual {worst_u:.2e}, max id2 residual "
                  f"{worst_2:.2e} (<=1e-6); |x| at 2 equality gap {abs(eq):.1e} (<=1e-6)")


def test_c04_resolvent_limit():
    """[TRIVIAL] the projection onto [0, 1] is clipping."""
    box = Indicator(Interval(LINE, 0.0, 1.0))
    worst = 0.0
    for c in (-3.0, -1.0, 0.5, 2.0):
        f = Sum([box, Linear(LINE, [c], 0.25)])
        for xv in (-2.0, 0.3, 0.9, 1.5, 3.0):
            J = prox(f, LINE.point(xv), ProxParams(1e-4)).minimizer
            worst = max(worst, abs(J.coords[0] - float(np.clip(xv, 0.0, 1.0))))
    assert report(4, "resolvent limit at lam=1e-4", worst <= 1e-3,
                  f"20 instances, max d(J x, P x) {worst:.2e} (<=1e-3)")


def test_c05_counterexample_demo(tmp_path):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "hadprox", "demo", "counterexample"],
                          capture_output=True, text=True, cwd=tmp_path)
    dt = time.perf_counter() - t0
    out = proc.stdout
    sections = re.split(r"^## ", out, flags=re.M)[1:]
    prox_ok = (sections[0].startswith("1. limit_mode_check: ConsistentWith")
               and "| result | ConsistentWith | 0 |" in sections[0])
    env_ok = sections[1].startswith("2. limit_mode_check: Violated")
    osc = float(re.search(r"oscillation_min: (\S+)", sections[1]).group(1))
    mosco_ok = sections[2].startswith("3. mosco_check: Violated")
    ok = prox_ok and env_ok and osc >= 0.9 and mosco_ok and proc.returncode == 1 and dt < 5.0
    assert report(5, "counterexample demo", ok,
                  f"prox {'ConsistentWith/0' if prox_ok else 'WRONG'}, envelope "
                  f"{'Violated' if env_ok else 'WRONG'} (oscillation {osc:g} >= 0.9), mosco "
                  f"{'Violated' if mosco_ok else 'WRONG'}, exit {proc.returncode}, {dt:.2f}s (<5s)")


SUITE_THEOREMS = ("bacak_fwd", "bacak2_bwd", "thm1", "thm2", "mainthm")


def _spec(points=GRID, lambdas=DEFAULT_LAMBDAS):
    return ModeSpec("envelope", points, lambdas, TailWindow(128, 256, 1e-2))


def test_c06_theorem_suites():
    t0 = time.perf_counter()
    seq = shifted_abs(LINE)
    failures, worst = [], 0.0
    for tid in SUITE_THEOREMS:
        r = theorem_verify(tid, seq, None, _spec())
        for name, v in r.sub_checks():
            if name.startswith("auxiliary:"):
                continue
            worst = max(worst, v.residual)
            if not v.ok or v.residual > 1e-2:
                failures.append(f"{tid}/{name}")
        if r.falsified:
            failures.append(f"{tid} falsified")
    # the falsification flag must stay down on the other corpus families too
    others = {"oscillating": (oscillating(LINE), GRID),
              "steep_quadratic": (steep_quadratic(LINE), GRID),
              "scaled_abs": (scaled_abs(LINE), tuple(LINE.point(v) for v in (-1, 0, 0.5, 1))),
              "nested_intervals": (nested_intervals(LINE).indicators(), GRID)}
    for name, (s, pts) in others.items():
        for tid in SUITE_THEOREMS:
            if theorem_verify(tid, s, None, _spec(pts)).falsified:
                failures.append(f"{name}/{tid} falsified")
    dt = time.perf_counter() - t0
    ok = not failures and dt < 300.0
    assert report(6, "theorem suites on |x - 1/n|", ok,
                  f"5 theorems, max hypothesis/conclusion residual {worst:.2e} (<=1e-2), "
                  f"falsification checked over 5 families, {dt:.1f}s (<300s); "
                  + (f"failures: {failures}" if failures else "all ConsistentWith, none falsified"))


def test_c07_set_mosco_nested_intervals():
    """Envelope residual at lam=1 (see the decisions ledger for smaller lam)."""
    res = {}
    for direction in ("shrinking", "growing"):
        regions = nested_intervals(LINE, 0.0, 1.0, direction)
        v = set_mosco_check(regions, Interval(LINE, 0.0, 1.0), _spec(lambdas=(1.0,)))
        res[direction] = v
    ok = all(v.ok and v.parts["envelope"].residual <= 1e-2 for v in res.values())
    detail = ", ".join(f"{k}: {v.outcome.value}, envelope residual "
                       f"{v.parts['envelope'].residual:.2e}" for k, v in res.items())
    assert report(7, "set Mosco for [0, 1 +- 1/n]", ok, detail + " (<=1e-2 at lam=1)")


def test_c08_cat0_geometry():
    rng = np.random.default_rng(3)
    spaces = {"euclidean": Euclidean(2), "halfplane": HyperbolicHalfPlane(),
              "spider": MetricSpider(3), "product": ProductSpace((Euclidean(1), MetricSpider(3)))}
    mins, hyp_medians = {}, []
    for name, sp in spaces.items():
        lo, kept = math.inf, 0
        while kept < 100:
            tri = [sp.random_point(rng, 1.0) for _ in range(3)]
            v = cat0_comparison_check(tri, 100, rng)
            if "min_slack" not in v.details:  # degenerate triangle, draw again
                continue
            kept += 1
            lo = min(lo, v.details["min_slack"])
            if name == "halfplane":
                hyp_medians.append(v.details["median_slack"])
        mins[name] = lo
    med = float(np.median(hyp_medians))
    ok = all(m >= -1e-8 for m in mins.values()) and med >= 1e-4
    detail = ", ".join(f"{k} {m:.1e}" for k, m in mins.items())
    assert report(8, "CAT(0) comparison", ok,
                  f"100 non-degenerate triangles per space, min slack: {detail} (>=-1e-8); hyperbolic median "
                  f"slack {med:.2e} (>=1e-4)")


def test_c09_integral_identity():
    E2, H, S = Euclidean(2), HyperbolicHalfPlane(), MetricSpider(3)
    cases = {
        "line": (DistanceSquared(LINE.point(0.5)), LINE.point(-1.0), LINE.point(2.0), 1.0),
        "line sum": (Sum([DistanceSquared(LINE.point(0.5)),
                          DistanceSquared(LINE.point(-1.0), 2.0)]),
                     LINE.point(-2.0), LINE.point(1.5), 0.5),
        "spider": (DistanceSquared(S.point(3, 1.0)), S.point(1, 1.0), S.point(3, 2.5), 1.0),
        "plane": (DistanceSquared(E2.point(1.0, 0.0)), E2.point(-1.0, 1.0), E2.point(1.0, 2.0),
                  1.0),
        "halfplane": (DistanceSquared(H.point(0.0, 1.0)), H.point(-1.0, 1.0), H.point(1.0, 2.0),
                      1.0),
    }
    errs = {}
    for name, (f, x0, x, lam) in cases.items():
        v = integral_identity_check(f, x0, x, lam, nodes=1024)
        errs[name] = v.residual
    ok = all(e <= 1e-6 for e in errs.values())
    assert report(9, "integral identity, 1024 nodes", ok,
                  ", ".join(f"{k} {e:.1e}" for k, e in errs.items()) + " (<=1e-6)")


def test_c10_determinism():
    configs = sorted((ROOT / "configs").glob("*.cfg"))
    assert configs
    differing = []
    for path in configs:
        text = path.read_text()
        a = csv_text(run_suite(parse_config(text), text))
        b = csv_text(run_suite(parse_config(text), text))
        if a != b:
            differing.append(path.name)
    assert report(10, "byte-identical CSV", not differing,
                  f"{len(configs)} golden configs run twice, "
                  + (f"differing: {differing}" if differing else "all identical"))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
