"""Suite execution and report emission for experiment configs."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import ExperimentConfig, SuiteEntry, print_config
from .convergence import (DEFAULT_LAMBDAS, THEOREMS, Lab, ModeSpec, SlopeEnvelopeProfile,
                          TailWindow, asymptotic_slope_check, cone_closure_check,
                          equi_lipschitz_check, gamma_check, limit_mode_check, mosco_check,
                          normalization_check, set_mosco_check, sufficient_condition_check,
                          theorem_verify)
from .descriptors import (DescriptorError, Registry, build_family, build_functional,
                          build_region, integer, number, numbers, parse_point, parse_points,
                          point_text)
from .families import FunctionSequence, RegionSequence
from .functionals import convexity_check, directional_derivative, evaluate
from .prox import ProxParams, SlopeEstimate, prox, slope, verify_prox_lemmas
from .spaces import Euclidean, GeodesicSegment, Point, cat0_comparison_check
from .verdict import Outcome, TheoremReport, UsageError, Verdict, combine

CSV_COLUMNS = ("suite_entry", "operation", "theorem_id", "sub_check", "verdict", "witness_x",
               "witness_lambda", "witness_n", "residual", "runtime_ms")
DEFAULT_LINE_GRID = (-2.0, -1.0, 0.0, 0.5, 2.0)


# ---------------------------------------------------------------- context

class Context:
    """Resolved objects for one run: space, named objects, tolerances, caches."""

    def __init__(self, cfg: ExperimentConfig, reg: Registry | None = None):
        self.cfg = cfg
        self.reg = reg if reg is not None else cfg.registry()
        self.space = self.reg.space
        self.seed = cfg.seed
        self.tol = cfg.tolerances()
        self._labs: dict = {}
        self._families: dict = {}

    # parameter decoders ------------------------------------------------
    def functional(self, text: str):
        return build_functional(text, self.space, self.reg)

    def family(self, text: str):
        if text not in self._families:
            self._families[text] = build_family(text, self.space, self.reg)
        return self._families[text]

    def point(self, text: str) -> Point:
        return parse_point(text, self.space)

    def points(self, text: str | None) -> tuple:
        if text is not None:
            pts = tuple(parse_points(text, self.space))
            if not pts:
                raise DescriptorError("point list is empty")
            return pts
        if isinstance(self.space, Euclidean) and self.space.n == 1:
            return tuple(self.space.point(v) for v in DEFAULT_LINE_GRID)
        rng = np.random.default_rng(self.seed)
        return (self.space.origin(),) + tuple(self.space.random_point(rng, 1.0) for _ in range(4))

    def lambdas(self, text: str | None) -> tuple:
        if text is None:
            return DEFAULT_LAMBDAS
        lams = tuple(numbers(text, "lambdas"))
        if not lams or any(l <= 0 for l in lams):
            raise DescriptorError("lambdas must be positive")
        return lams

    def region(self, text: str):
        return build_region(text, self.space, self.reg)

    def prox_params(self, lam: float = 1.0) -> ProxParams:
        return ProxParams(lam, self.tol.get("tol_min", 1e-10), self.tol.get("tol_point", 1e-8),
                          self.tol.get("max_iter", 10_000), self.seed)

    def tail(self, e: SuiteEntry) -> TailWindow:
        get = lambda k, d, conv: conv(e.param(k)) if e.param(k) is not None else self.tol.get(k, d)
        return TailWindow(get("n_min", 128, int), get("n_max", 256, int),
                          get("tol_seq", 1e-2, float), get("stride", 1, int))

    def spec(self, e: SuiteEntry, mode: str = "envelope") -> ModeSpec:
        return ModeSpec(mode, self.points(e.param("points")), self.lambdas(e.param("lambdas")),
                        self.tail(e))

    def sequence(self, e: SuiteEntry) -> FunctionSequence:
        seq = self.family(_need(e, "family"))
        if isinstance(seq, RegionSequence):
            seq = seq.indicators()
        return seq

    def limit(self, e: SuiteEntry):
        text = e.param("limit", e.param("candidate"))
        return self.functional(text) if text is not None else None

    def lab(self, e: SuiteEntry) -> Lab:
        key = (e.param("family"), e.param("limit", e.param("candidate")))
        if key not in self._labs:
            seq = self.sequence(e)
            self._labs[key] = Lab(seq, self.limit(e), self.prox_params())
        return self._labs[key]


def _need(e: SuiteEntry, key: str) -> str:
    v = e.param(key)
    if v is None:
        raise DescriptorError(f"{e.op} needs parameter {key!r}")
    return v


def _num(e: SuiteEntry, key: str, default: float) -> float:
    v = e.param(key)
    return default if v is None else number(v, key)


# ---------------------------------------------------------------- operations

@dataclass(frozen=True)
class OpSpec:
    run: Callable[[Context, SuiteEntry], Any]
    params: tuple
    args: int = 0


SEQ = ("family", "points", "lambdas", "limit", "candidate", "n_min", "n_max", "tol_seq",
       "stride")


def _op_prox(ctx, e):
    f, x = ctx.functional(_need(e, "f")), ctx.point(_need(e, "x"))
    lams = numbers(e.param("lambda", "1"), "lambda")
    if not lams or any(l <= 0 for l in lams):
        raise DescriptorError("lambda must be > 0")
    return [(lam, prox(f, x, ctx.prox_params(lam))) for lam in lams], x


def _op_slope(ctx, e):
    return slope(ctx.functional(_need(e, "f")), ctx.point(_need(e, "x")))


def _op_evaluate(ctx, e):
    return evaluate(ctx.functional(_need(e, "f")), ctx.point(_need(e, "x")))


def _op_convexity(ctx, e):
    return convexity_check(ctx.functional(_need(e, "f")), _num(e, "mu", 0.0),
                           integer(e.param("samples", "200"), "samples"),
                           np.random.default_rng(ctx.seed))


def _op_dirderiv(ctx, e):
    x = ctx.point(_need(e, "x"))
    g = GeodesicSegment(x, ctx.point(_need(e, "toward")))
    return directional_derivative(ctx.functional(_need(e, "f")), x, g, e.param("side", "lower"))


def _op_cat0(ctx, e):
    pts = ctx.points(_need(e, "points"))
    if len(pts) != 3:
        raise DescriptorError("cat0_comparison_check needs exactly three points")
    return cat0_comparison_check(pts, integer(e.param("samples", "100"), "samples"),
                                 np.random.default_rng(ctx.seed))


def _op_lemmas(ctx, e):
    return verify_prox_lemmas(ctx.functional(_need(e, "f")), ctx.point(_need(e, "x")),
                              ctx.lambdas(e.param("lambdas")), ctx.prox_params())


def _op_limit_mode(ctx, e):
    mode = _need(e, "mode")
    return limit_mode_check(ctx.sequence(e), None, ctx.spec(e, mode), ctx.lab(e))


def _op_mosco(ctx, e):
    return mosco_check(ctx.sequence(e), None, ctx.spec(e, "mosco"), lab=ctx.lab(e), seed=ctx.seed)


def _op_gamma(ctx, e):
    return gamma_check(ctx.sequence(e), None, ctx.spec(e, "gamma"), ctx.lab(e), ctx.seed)


def _op_set_mosco(ctx, e):
    regions = ctx.family(_need(e, "family"))
    if not isinstance(regions, RegionSequence):
        raise DescriptorError("set_mosco_check needs a region family (nested_intervals)")
    lim = ctx.region(e.param("limit")) if e.param("limit") else regions.limit
    return set_mosco_check(regions, lim, ctx.spec(e, "mosco"), ctx.seed)


def _op_slopes(ctx, e):
    spec = ctx.spec(e)
    return asymptotic_slope_check(ctx.sequence(e), spec.points, spec, ctx.lab(e))


def _op_cone(ctx, e):
    spec = ctx.spec(e)
    other = ctx.family(_need(e, "other"))
    return cone_closure_check(ctx.sequence(e), other, _num(e, "alpha", 1.0),
                              _num(e, "beta", 1.0), spec.points, spec)


def _op_sufficient(ctx, e):
    spec = ctx.spec(e)
    return sufficient_condition_check(ctx.sequence(e), None, spec.points, spec,
                                      integer(e.param("samples", "64"), "samples"), ctx.seed,
                                      ctx.lab(e))


def _op_normalization(ctx, e):
    return normalization_check(ctx.sequence(e), None, ctx.point(_need(e, "x0")),
                               _num(e, "lambda", 1.0), ctx.spec(e, "mosco"), ctx.lab(e))


def _op_equi(ctx, e):
    spec = ctx.spec(e)
    return equi_lipschitz_check(ctx.sequence(e), _num(e, "lambda", 1.0),
                                ctx.point(_need(e, "x0")), ctx.region(_need(e, "region")),
                                integer(e.param("samples", "12"), "samples"), spec, ctx.seed,
                                ctx.lab(e))


def _op_theorem(ctx, e):
    tid = e.args[0]
    if tid not in THEOREMS:
        raise DescriptorError(f"unknown theorem {tid!r}; valid: {', '.join(THEOREMS)}")
    extras = {}
    if e.param("x0") is not None:
        extras["x0"] = ctx.point(e.param("x0"))
    if e.param("lambda") is not None:
        extras["lambda"] = number(e.param("lambda"), "lambda")
    if e.param("nodes") is not None:
        extras["nodes"] = integer(e.param("nodes"), "nodes")
    if e.param("bundle") is not None:
        extras["bundle"] = list(parse_points(e.param("bundle"), ctx.space))
    return theorem_verify(tid, ctx.sequence(e), None, ctx.spec(e), extras, ctx.lab(e), ctx.seed)


OPS: dict[str, OpSpec] = {
    "prox": OpSpec(_op_prox, ("f", "x", "lambda")),
    "envelope": OpSpec(_op_prox, ("f", "x", "lambda")),
    "slope": OpSpec(_op_slope, ("f", "x")),
    "evaluate": OpSpec(_op_evaluate, ("f", "x")),
    "convexity_check": OpSpec(_op_convexity, ("f", "mu", "samples")),
    "directional_derivative": OpSpec(_op_dirderiv, ("f", "x", "toward", "side")),
    "cat0_comparison_check": OpSpec(_op_cat0, ("points", "samples")),
    "verify_prox_lemmas": OpSpec(_op_lemmas, ("f", "x", "lambdas")),
    "limit_mode_check": OpSpec(_op_limit_mode, SEQ + ("mode",)),
    "mosco_check": OpSpec(_op_mosco, SEQ),
    "gamma_check": OpSpec(_op_gamma, SEQ),
    "set_mosco_check": OpSpec(_op_set_mosco, SEQ),
    "asymptotic_slope_check": OpSpec(_op_slopes, SEQ),
    "cone_closure_check": OpSpec(_op_cone, SEQ + ("other", "alpha", "beta")),
    "sufficient_condition_check": OpSpec(_op_sufficient, SEQ + ("samples",)),
    "normalization_check": OpSpec(_op_normalization, SEQ + ("x0", "lambda")),
    "equi_lipschitz_check": OpSpec(_op_equi, SEQ + ("x0", "lambda", "region", "samples")),
    "theorem_verify": OpSpec(_op_theorem, SEQ + ("x0", "lambda", "nodes", "bundle"), args=1),
}


def _decode_check(ctx: Context, e: SuiteEntry):
    """Build every object an entry refers to, without running it."""
    for k, v in e.params:
        if k in ("f", "limit", "candidate"):
            ctx.functional(v)
        elif k in ("family", "other"):
            ctx.family(v)
        elif k in ("x", "x0", "toward"):
            ctx.point(v)
        elif k in ("points", "bundle"):
            ctx.points(v)
        elif k == "lambdas":
            ctx.lambdas(v)
        elif k == "region":
            ctx.region(v)
        elif k == "lambda":
            if any(not lam > 0 for lam in numbers(v, k)):
                raise DescriptorError("lambda must be > 0")
        elif k in ("mu", "alpha", "beta", "tol_seq"):
            number(v, k)
        elif k in ("samples", "nodes", "n_min", "n_max", "stride"):
            integer(v, k)
    if e.op == "limit_mode_check" and e.param("mode") not in ("pointwise", "envelope", "prox"):
        raise DescriptorError("mode must be one of pointwise, envelope, prox")
    if e.op == "theorem_verify" and e.args and e.args[0] not in THEOREMS:
        raise DescriptorError(f"unknown theorem {e.args[0]!r}; valid: {', '.join(THEOREMS)}")
    ctx.tail(e)


def validate_entries(cfg: ExperimentConfig, reg: Registry) -> list[tuple[int, str]]:
    errors = []
    ctx = Context(cfg, reg)
    for e in cfg.suite:
        spec = OPS.get(e.op)
        if spec is None:
            errors.append((e.line, f"unknown operation {e.op!r}; valid operations: "
                           + ", ".join(OPS)))
            continue
        if len(e.args) != spec.args:
            errors.append((e.line, f"{e.op} takes {spec.args} positional argument(s), "
                           f"got {len(e.args)}"))
            continue
        bad = [k for k, _ in e.params if k not in spec.params]
        if bad:
            errors.append((e.line, f"{e.op} does not take {', '.join(bad)}; valid: "
                           + ", ".join(spec.params)))
            continue
        try:
            _decode_check(ctx, e)
        except (UsageError, ValueError) as err:
            errors.append((e.line, str(err)))
    return errors


# ---------------------------------------------------------------- reports

@dataclass
class EntryResult:
    index: int
    op: str
    theorem_id: str
    text: str
    outcome: Outcome
    rows: list = field(default_factory=list)       # (sub_check, Verdict)
    values: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)     # name -> ((a, b), ...)
    notes: str = ""
    error: str = ""
    runtime_ms: float = 0.0
    falsified: bool = False


@dataclass
class RunReport:
    entries: list
    version: str
    digest: str
    seed: int
    name: str = ""

    @property
    def exit_code(self) -> int:
        outs = [e.outcome for e in self.entries]
        if Outcome.VIOLATED in outs:
            return 1
        if Outcome.INCONCLUSIVE in outs:
            return 2
        return 0


def config_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _scalar_details(v: Verdict) -> dict:
    return {k: d for k, d in v.details.items() if isinstance(d, (int, float, str))}


def _verdict_rows(v: Verdict, name: str = "result") -> list:
    rows = [(name, v)]
    for k, p in v.parts.items():
        rows += _verdict_rows(p, f"{name}/{k}" if name != "result" else k)
    return rows


def _collect_series(rows) -> dict:
    out = {}
    for name, v in rows:
        for s, pts in v.series.items():
            out[f"{name}/{s}"] = pts
    return out


def _to_entry(index: int, e: SuiteEntry, result) -> EntryResult:
    tid = e.args[0] if e.op == "theorem_verify" else ""
    r = EntryResult(index, e.op, tid, e.text(), Outcome.CONSISTENT)
    if e.op in ("prox", "envelope"):
        pairs, x = result
        series = []
        for lam, pr in pairs:
            v = (Verdict.consistent(pr.objective_residual, witness={"x": x, "lambda": lam})
                 if pr.converged else
                 Verdict.unknown("prox certificate not reached", pr.objective_residual,
                                 witness={"x": x, "lambda": lam}))
            r.rows.append((f"lambda={lam:g}" if len(pairs) > 1 else e.op, v))
            r.values[f"lambda={lam:g}"] = {"minimizer": point_text(pr.minimizer),
                                           "envelope": pr.envelope,
                                           "iterations": pr.iterations}
            series.append((lam, pr.envelope))
        r.series["lambda_vs_envelope"] = tuple(series)
        r.outcome = combine(v for _, v in r.rows)
    elif isinstance(result, SlopeEstimate):
        v = Verdict.consistent(0.0) if result.certified else Verdict.unknown("not certified")
        r.rows.append(("slope", v))
        r.values["slope"] = result.value
        r.values["witness"] = point_text(result.witness)
        r.outcome = v.outcome
    elif isinstance(result, float):
        r.rows.append((e.op, Verdict.consistent(0.0)))
        r.values["value"] = result
    elif isinstance(result, SlopeEnvelopeProfile):
        v = result.verdict
        r.rows = [("membership_A", v)]
        r.values.update({"C": result.C, "in_A": result.in_A.value, "in_A0": result.in_A0.value})
        r.series = _collect_series(r.rows)
        r.outcome = v.outcome
    elif isinstance(result, TheoremReport):
        concl = Verdict(result.conclusion_verdict, max(
            (v.residual for v in result.conclusion_checks.values()), default=0.0))
        top = result.sub_checks() + [("conclusion", concl)]
        r.rows = top + [row for name, v in top for row in _verdict_rows(v, name)[1:]]
        r.series = _collect_series(r.rows)
        r.outcome = result.outcome
        r.notes = result.notes
        r.falsified = result.falsified
        r.values["falsified"] = result.falsified
    elif isinstance(result, Verdict):
        r.rows = _verdict_rows(result)
        r.series = _collect_series(r.rows)
        r.outcome = result.outcome
        r.notes = result.notes
        for name, v in r.rows:
            for k, d in _scalar_details(v).items():
                r.values[k if name == "result" else f"{name}/{k}"] = d
    else:
        raise TypeError(f"unexpected result type {type(result).__name__}")
    return r


def run_suite(cfg: ExperimentConfig, config_text: str | None = None) -> RunReport:
    """Execute entries in order; failures are recorded per entry."""
    text = config_text if config_text is not None else print_config(cfg)
    ctx = Context(cfg)
    entries = []
    for i, e in enumerate(cfg.suite, start=1):
        t0 = time.perf_counter()
        try:
            r = _to_entry(i, e, OPS[e.op].run(ctx, e))
        except Exception as err:  # recorded, the run continues
            r = EntryResult(i, e.op, e.args[0] if e.args else "", e.text(), Outcome.INCONCLUSIVE,
                            [("error", Verdict.unknown(str(err)))],
                            error=f"{type(err).__name__}: {err}")
        r.runtime_ms = 1000.0 * (time.perf_counter() - t0)
        entries.append(r)
    return RunReport(entries, __version__, config_digest(text), cfg.seed, cfg.name)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if isinstance(v, Point):
        return point_text(v)
    return str(v)


def _witness_x(w) -> str:
    for k in ("x", "x_t", "x0", "J"):
        if k in w and isinstance(w[k], Point):
            return point_text(w[k])
    return ""


def csv_text(report: RunReport) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for e in report.entries:
        for sub, v in e.rows:
            w = v.witness
            wr.writerow([e.index, e.op, e.theorem_id, sub, v.outcome.value, _witness_x(w),
                         _fmt(w.get("lambda")), _fmt(w.get("n")), _fmt(v.residual), ""])
    return buf.getvalue()


def markdown_text(report: RunReport) -> str:
    out = [f"# Run report{': ' + report.name if report.name else ''}", ""]
    if not report.entries:
        return "\n".join(out)
    out += [f"version {report.version}, config sha256 `{report.digest[:16]}`, seed {report.seed}",
            ""]
    for e in report.entries:
        title = f"{e.op} {e.theorem_id}".strip()
        out.append(f"## {e.index}. {title}: {e.outcome.value}")
        out.append("")
        out.append(f"`{e.text}`")
        out.append("")
        if e.falsified:
            out += ["**FALSIFICATION FLAG: hypotheses hold but the conclusion fails**", ""]
        if e.error:
            out += [f"error: {e.error}", ""]
        out += ["| sub-check | verdict | residual | witness |", "|---|---|---|---|"]
        for sub, v in e.rows:
            wit = ", ".join(f"{k}={_fmt(x)}" for k, x in v.witness.items()
                            if isinstance(x, (int, float, str, Point)))
            out.append(f"| {sub} | {v.outcome.value} | {_fmt(v.residual)} | {wit} |")
        out.append("")
        for k, val in e.values.items():
            if isinstance(val, dict):
                val = ", ".join(f"{a}={_fmt(b)}" for a, b in val.items())
            out.append(f"- {k}: {_fmt(val)}")
        if e.notes:
            out.append(f"- notes: {e.notes}")
        out.append("")
    return "\n".join(out)


def _slug(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9.=_-]+", "_", s).strip("_")


def emit_report(report: RunReport, out_dir: str | Path, formats=("csv", "markdown", "plotdata"),
                config_text: str | None = None) -> list[Path]:
    """Write the requested formats plus ``metadata.json`` (timings live
    there so the CSV stays byte-identical across runs)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out / "report.csv"
        p.write_text(csv_text(report))
        written.append(p)
    if "markdown" in formats:
        p = out / "report.md"
        p.write_text(markdown_text(report))
        written.append(p)
    if "plotdata" in formats:
        d = out / "plotdata"
        d.mkdir(exist_ok=True)
        for e in report.entries:
            for name, pts in e.series.items():
                p = d / f"entry{e.index:02d}_{_slug(name)}.tsv"
                lines = [f"# {name}"] + [f"{_fmt(float(a))}\t{_fmt(float(b))}" for a, b in pts]
                p.write_text("\n".join(lines) + "\n")
                written.append(p)
    meta = {"version": report.version, "config_sha256": report.digest, "seed": report.seed,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "exit_code": report.exit_code,
            "runtime_ms": {str(e.index): round(e.runtime_ms, 3) for e in report.entries}}
    p = out / "metadata.json"
    p.write_text(json.dumps(meta, indent=2) + "\n")
    written.append(p)
    if config_text is not None:
        (out / "config.txt").write_text(config_text)
    return written
