"""Experiment config documents: parsing, validation and printing.

A config is a line-oriented document of sections::

    [experiment]
    seed = 0
    formats = csv,markdown

    [space]
    kind = euclidean
    dim = 1

    [functional box]
    f = indicator
    region = [region=interval,lo=0,hi=1]

    [family shifted]
    family = shifted_abs

    [suite]
    prox f=abs x=2 lambda=1
    theorem_verify mainthm family=shifted

``[space NAME]``, ``[region NAME]``, ``[functional NAME]`` and
``[family NAME]`` sections define objects other descriptors refer to by
name. Suite lines are an operation, positional arguments and
``key=value`` parameters; values holding spaces go in brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .descriptors import DescriptorError, Registry, build_space, unbracket

SECTION_KINDS = ("experiment", "tolerances", "space", "region", "functional", "family", "suite")
NAMED_KINDS = ("space", "region", "functional", "family")
EXPERIMENT_KEYS = ("name", "seed", "output", "formats")
TOLERANCE_KEYS = {"tol_seq": float, "n_min": int, "n_max": int, "stride": int,
                  "tol_min": float, "tol_point": float, "max_iter": int, "tol": float}
FORMATS = ("csv", "markdown", "plotdata")


class ConfigError(ValueError):
    """Parse or validation failure; ``errors`` holds ``(line, message)``."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = sorted(errors)
        super().__init__("\n".join(f"line {ln}: {msg}" for ln, msg in self.errors))


@dataclass(frozen=True)
class Section:
    kind: str
    name: str = ""
    items: tuple = ()
    line: int = field(default=0, compare=False)
    item_lines: tuple = field(default=(), compare=False)

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.items:
            if k == key:
                return v
        return default

    def descriptor(self) -> str:
        return ",".join(f"{k}=[{v}]" for k, v in self.items)

    def line_of(self, key: str) -> int:
        for (k, _), ln in zip(self.items, self.item_lines):
            if k == key:
                return ln
        return self.line


@dataclass(frozen=True)
class SuiteEntry:
    op: str
    args: tuple = ()
    params: tuple = ()
    line: int = field(default=0, compare=False)

    def param(self, key: str, default: str | None = None) -> str | None:
        return dict(self.params).get(key, default)

    def text(self) -> str:
        toks = [self.op, *self.args]
        for k, v in self.params:
            toks.append(f"{k}={_quote(v)}")
        return " ".join(toks)


def _quote(v: str) -> str:
    return f"[{v}]" if (v == "" or any(c.isspace() or c in "=,;[(" for c in v)) else v


@dataclass(frozen=True)
class ExperimentConfig:
    sections: tuple = ()
    suite: tuple = ()

    def section(self, kind: str, name: str = "") -> Section | None:
        for s in self.sections:
            if s.kind == kind and s.name == name:
                return s
        return None

    @property
    def seed(self) -> int:
        s = self.section("experiment")
        return int(s.get("seed", "0")) if s else 0

    @property
    def output(self) -> str:
        s = self.section("experiment")
        return s.get("output", "out") if s else "out"

    @property
    def formats(self) -> tuple[str, ...]:
        s = self.section("experiment")
        text = s.get("formats", ",".join(FORMATS)) if s else ",".join(FORMATS)
        return tuple(f.strip() for f in text.split(",") if f.strip())

    @property
    def name(self) -> str:
        s = self.section("experiment")
        return s.get("name", "") if s else ""

    def tolerances(self) -> dict:
        s = self.section("tolerances")
        if s is None:
            return {}
        return {k: TOLERANCE_KEYS[k](v) for k, v in s.items}

    def with_overrides(self, seed: int | None = None, tol_seq: float | None = None,
                       output: str | None = None, formats: str | None = None) -> "ExperimentConfig":
        """Copy with experiment/tolerance keys replaced (command-line flags)."""
        secs = list(self.sections)

        def put(kind, key, value):
            for i, s in enumerate(secs):
                if s.kind == kind and not s.name:
                    items = [(k, v) for k, v in s.items if k != key] + [(key, value)]
                    secs[i] = Section(kind, "", tuple(items), s.line)
                    return
            secs.insert(0, Section(kind, "", ((key, value),)))
        if seed is not None:
            put("experiment", "seed", str(seed))
        if output is not None:
            put("experiment", "output", output)
        if formats is not None:
            put("experiment", "formats", formats)
        if tol_seq is not None:
            put("tolerances", "tol_seq", repr(float(tol_seq)))
        return ExperimentConfig(tuple(secs), self.suite)

    def registry(self) -> Registry:
        reg = Registry()
        for s in self.sections:
            if s.kind in NAMED_KINDS and s.name:
                getattr(reg, {"space": "spaces", "region": "regions", "functional": "functionals",
                              "family": "families"}[s.kind])[s.name] = s.descriptor()
        main = self.section("space")
        if main is not None:
            reg.space = build_space(main.descriptor(), reg)
        return reg


def tokenize(line: str) -> list[str]:
    """Split on whitespace outside brackets and parentheses."""
    out, cur, depth = [], [], 0
    for ch in line:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    if depth != 0:
        raise DescriptorError("unbalanced brackets")
    return out


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_document(text: str) -> tuple[ExperimentConfig, list[tuple[int, str]]]:
    """Syntax-level parse; returns the config and the errors found."""
    errors: list[tuple[int, str]] = []
    sections: list[Section] = []
    suite: list[SuiteEntry] = []
    cur: dict | None = None
    seen: set = set()

    def close():
        if cur is not None and cur["kind"] != "suite":
            sections.append(Section(cur["kind"], cur["name"], tuple(cur["items"]), cur["line"],
                                    tuple(cur["lines"])))

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                errors.append((ln, f"malformed section header {line!r}"))
                continue
            close()
            head = line[1:-1].split()
            kind = head[0] if head else ""
            name = head[1] if len(head) > 1 else ""
            if kind not in SECTION_KINDS or len(head) > 2:
                errors.append((ln, f"unknown section {line!r}; valid: {', '.join(SECTION_KINDS)}"))
                cur = {"kind": "invalid", "name": "", "items": [], "line": ln, "lines": []}
                continue
            if name and kind not in NAMED_KINDS:
                errors.append((ln, f"section [{kind}] takes no name"))
            if (kind, name) in seen:
                errors.append((ln, f"duplicate section [{kind}{' ' + name if name else ''}]"))
            seen.add((kind, name))
            cur = {"kind": kind, "name": name, "items": [], "line": ln, "lines": []}
            continue
        if cur is None:
            errors.append((ln, "content before the first section"))
            continue
        if cur["kind"] == "suite":
            try:
                toks = tokenize(line)
            except DescriptorError as e:
                errors.append((ln, str(e)))
                continue
            args, params = [], []
            for t in toks[1:]:
                if "=" in t and not t.startswith("["):
                    k, _, v = t.partition("=")
                    params.append((k, unbracket(v)))
                else:
                    args.append(unbracket(t))
            suite.append(SuiteEntry(toks[0], tuple(args), tuple(params), ln))
            continue
        key, eq, value = line.partition("=")
        if not eq or not key.strip():
            errors.append((ln, f"expected key = value, got {line!r}"))
            continue
        key = key.strip()
        try:
            tokenize(value)
        except DescriptorError as e:
            errors.append((ln, str(e)))
            continue
        if any(k == key for k, _ in cur["items"]):
            errors.append((ln, f"duplicate key {key!r}"))
            continue
        cur["items"].append((key, unbracket(value.strip())))
        cur["lines"].append(ln)
    close()
    sections = [s for s in sections if s.kind != "invalid"]
    return ExperimentConfig(tuple(sections), tuple(suite)), errors


def _check_sections(cfg: ExperimentConfig) -> list[tuple[int, str]]:
    errors = []
    exp = cfg.section("experiment")
    if exp is not None:
        for k, _ in exp.items:
            if k not in EXPERIMENT_KEYS:
                errors.append((exp.line_of(k), f"unknown experiment key {k!r}; valid: "
                               + ", ".join(EXPERIMENT_KEYS)))
        seed = exp.get("seed")
        if seed is not None:
            try:
                int(seed)
            except ValueError:
                errors.append((exp.line_of("seed"), f"bad integer {seed!r} for 'seed'"))
        for f in cfg.formats:
            if f not in FORMATS:
                errors.append((exp.line_of("formats"),
                               f"unknown format {f!r}; valid: {', '.join(FORMATS)}"))
    tol = cfg.section("tolerances")
    if tol is not None:
        for k, v in tol.items:
            if k not in TOLERANCE_KEYS:
                errors.append((tol.line_of(k), f"unknown tolerance {k!r}; valid: "
                               + ", ".join(TOLERANCE_KEYS)))
                continue
            try:
                x = TOLERANCE_KEYS[k](v)
                if x <= 0:
                    errors.append((tol.line_of(k), f"{k} must be > 0"))
            except ValueError:
                errors.append((tol.line_of(k), f"bad number {v!r} for {k!r}"))
    main = cfg.section("space")
    if main is None:
        errors.append((1, "missing [space] section"))
    return errors


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config document.

    Raises :class:`ConfigError` listing every problem with its line.
    """
    from .runner import validate_entries
    cfg, errors = parse_document(text)
    errors += _check_sections(cfg)
    if not errors:
        try:
            reg = cfg.registry()
        except DescriptorError as e:
            s = cfg.section("space")
            errors.append((s.line if s else 1, str(e)))
        else:
            for s in cfg.sections:
                if s.kind in NAMED_KINDS and s.name:
                    err = _check_named(s, reg)
                    if err:
                        errors.append((s.line, err))
            if not errors:
                errors += validate_entries(cfg, reg)
    if errors:
        raise ConfigError(errors)
    return cfg


def _check_named(s: Section, reg: Registry) -> str | None:
    from .descriptors import build_family, build_functional, build_region
    try:
        if s.kind == "space":
            build_space(s.name, reg)
        elif s.kind == "region":
            build_region(s.name, reg.space, reg)
        elif s.kind == "functional":
            build_functional(s.name, reg.space, reg)
        elif s.kind == "family":
            build_family(s.name, reg.space, reg)
    except DescriptorError as e:
        return f"[{s.kind} {s.name}]: {e}"
    except Exception as e:  # invariant checks inside constructors
        return f"[{s.kind} {s.name}]: {e}"
    return None


def print_config(cfg: ExperimentConfig) -> str:
    """Canonical text; ``parse_document(print_config(c))[0] == c``."""
    out = []
    for s in cfg.sections:
        out.append(f"[{s.kind}{' ' + s.name if s.name else ''}]")
        for k, v in s.items:
            out.append(f"{k} = {v}")
        out.append("")
    if cfg.suite:
        out.append("[suite]")
        out += [e.text() for e in cfg.suite]
        out.append("")
    return "\n".join(out)
