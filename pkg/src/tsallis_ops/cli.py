"""Command-line front end: ``check``, ``eval`` and ``corpus``.

Exit status is 0 when everything holds, 1 on a violated property or
statement, 2 on a usage, parse or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from . import corpus as corp
from . import ensembles as ens
from .dsl import DslError, EqualityVerdict, free_variables, parse, pretty, evaluate
from .matrix import TolerancePolicy, load_matrices
from .properties import PROPERTIES, PropertyReport, SuiteConfig, run_all
from .suites import AUXILIARY

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


# -- serialisation --

def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_finite(v) for v in x]
    return x


def to_json(obj) -> str:
    """JSON text; non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
    return json.dumps(_finite(obj), indent=2, allow_nan=False)


_COLUMNS = (("property", 30, "s"), ("pass", 5, "s"), ("worst_margin", 13, ".3e"), ("failures", 8, "d"),
            ("samples", 7, "d"), ("cases", 7, "d"), ("seed", 6, "d"), ("wall_ms", 10, ".1f"))


def _row(values) -> str:
    cells = []
    for (name, width, fmt), v in zip(_COLUMNS, values):
        if isinstance(v, str) or (isinstance(v, float) and not math.isfinite(v)):
            fmt = "s" if name == "property" or not isinstance(v, str) else "r"
        if fmt == "s":
            cells.append(str(v).ljust(width))
        elif fmt == "r":
            cells.append(str(v).rjust(width))
        else:
            cells.append(format(v, fmt).rjust(width))
    return "  ".join(cells).rstrip()


def text_table(reports: list[PropertyReport]) -> str:
    lines = [_row([c[0] for c in _COLUMNS])]
    lines.append("-" * len(lines[0]))
    for r in reports:
        lines.append(_row([r.property, "PASS" if r.passed else "FAIL", float(r.worst_margin),
                           len(r.failures), r.samples, r.cases, r.seed, float(r.wall_ms)]))
    for r in reports:
        for f in r.failures[:20]:
            lines.append(f"  {r.property}: case {f.case_index} lambda={f.lam!r} dim={f.dim} "
                         f"margin={f.margin:.3e} [{f.check}]")
        if len(r.failures) > 20:
            lines.append(f"  {r.property}: ... {len(r.failures) - 20} more")
    return "\n".join(lines)


def serialize_report(report: PropertyReport, fmt: str = "json") -> str:
    return to_json(report.to_dict()) if fmt == "json" else text_table([report])


def serialize_reports(reports: list[PropertyReport], fmt: str = "json") -> str:
    if fmt == "json":
        return to_json([r.to_dict() for r in reports])
    return text_table(reports)


def corpus_verdict_dict(v: corp.CorpusVerdict) -> dict:
    return {
        "property": v.property,
        "pass": v.passed,
        "lines": [
            {"line": r.lineno, "statement": r.template, "pass": r.passed, "worst_margin": r.worst_margin,
             "evaluations": r.evaluations, "generation_failures": r.generation_failures,
             "failures": [{"case_index": f.case_index, "lambda": f.lam, "dim": f.dim, "params": f.params,
                           "margin": f.margin, "message": f.message} for f in r.failures[:50]]}
            for r in v.lines
        ],
        "wall_ms": v.wall_ms,
    }


# -- configuration --

def parse_dims(text: str) -> tuple[tuple, tuple]:
    """``"2,3,2x3"`` -> plain dims ``(2, 3)`` and tensor dims ``((2, 3),)``."""
    plain, tensor = [], []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            if "x" in tok:
                a, b = (int(v) for v in tok.split("x"))
                tensor.append((a, b))
            else:
                plain.append(int(tok))
        except ValueError:
            raise ConfigError(f"cannot read dimension {tok!r}") from None
    for d in plain + [v for t in tensor for v in t]:
        if not 1 <= d <= ens.MAX_DIM:
            raise ConfigError(f"dimension {d} outside [1, {ens.MAX_DIM}]")
    return tuple(plain), tuple(tensor)


def parse_floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"cannot read number list {text!r}") from None


def build_config(args) -> SuiteConfig:
    cfg = SuiteConfig(seed=args.seed)
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples must be >= 1")
        cfg = replace(cfg, samples=args.samples)
    if args.dims:
        plain, tensor = parse_dims(args.dims)
        if plain:
            cfg = replace(cfg, dims=plain)
        if tensor:
            for a, b in tensor:
                if a * b > cfg.kron_max_dim:
                    raise ConfigError(f"tensor dimension {a}x{b} exceeds {cfg.kron_max_dim}")
            cfg = replace(cfg, tensor_dims=tensor)
    if args.lambdas:
        lams = parse_floats(args.lambdas)
        if any(l > 1 or not math.isfinite(l) for l in lams):
            raise ConfigError("lambdas must be finite and <= 1")
        cfg = replace(cfg, lambdas=lams)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg = replace(cfg, eps_rel=args.tol)
    return cfg


def _selected(args) -> tuple[tuple, tuple]:
    """Registry property names and auxiliary suite names requested."""
    names = args.property or []
    unknown = [n for n in names if n not in PROPERTIES and n not in AUXILIARY]
    if unknown:
        raise ConfigError(f"unknown property {', '.join(unknown)}; known: "
                          f"{', '.join(list(PROPERTIES) + list(AUXILIARY))}")
    if args.all or not names:
        reg = tuple(PROPERTIES)
        aux = tuple(AUXILIARY) if args.aux else ()
    else:
        reg = tuple(n for n in names if n in PROPERTIES)
        aux = tuple(n for n in names if n in AUXILIARY)
    return reg, aux


# -- commands --

def cmd_check(args, out) -> int:
    cfg = build_config(args)
    reg, aux = _selected(args)
    reports = run_all(replace(cfg, properties=reg), workers=args.workers) if reg else []
    reports += [AUXILIARY[n](cfg) for n in aux]
    ok = all(r.passed for r in reports)
    if args.corpus is None:
        out.write(serialize_reports(reports, args.format) + "\n")
        return EXIT_OK if ok else EXIT_FAIL
    lines = corp.load_corpus(args.corpus or None)
    verdicts = corp.run_corpus(lines, cfg, properties=reg)
    table = corp.compare([r for r in reports if r.property in PROPERTIES], verdicts)
    matched = all(c.matches for c in table)
    if args.format == "json":
        out.write(to_json({
            "reports": [r.to_dict() for r in reports],
            "corpus": [corpus_verdict_dict(v) for v in verdicts],
            "comparison": [{"property": c.property, "registry": c.registry, "corpus": c.corpus,
                            "match": c.matches} for c in table],
            "match": matched,
        }) + "\n")
    else:
        out.write(text_table(reports) + "\n\n")
        out.write(f"{'property':30}  {'registry':8}  {'corpus':8}  match\n")
        for c in table:
            out.write(f"{c.property:30}  {str(c.registry):8}  {str(c.corpus):8}  {'yes' if c.matches else 'NO'}\n")
    return EXIT_OK if ok and matched else EXIT_FAIL


def _verdict_fields(v) -> dict:
    if isinstance(v, EqualityVerdict):
        return {"pass": v.holds, "margin": v.margin, "residual": v.residual,
                "witness_leq": v.leq.witness_min_eig, "witness_geq": v.geq.witness_min_eig,
                "tolerance": v.leq.tolerance_used}
    return {"pass": v.holds, "margin": v.margin, "witness": v.witness_min_eig, "tolerance": v.tolerance_used}


def cmd_eval(args, out) -> int:
    stmt = parse(args.statement)
    tol = TolerancePolicy(rel=args.tol if args.tol is not None else 1e-9)
    record = {"statement": pretty(stmt)}
    if args.matrices:
        try:
            bindings = load_matrices(args.matrices)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load {args.matrices}: {exc}") from None
        record.update(mode="matrices", path=args.matrices, **_verdict_fields(evaluate(stmt, bindings, tol)))
    else:
        dim = args.random or 3
        if not 1 <= dim <= ens.MAX_DIM:
            raise ConfigError(f"--random dimension must lie in [1, {ens.MAX_DIM}]")
        samples = args.samples or 100
        specs = [corp.parse_line(f"eval | {b} | A <= A", 0).bindings[0] for b in (args.bind or [])]
        bound = {n for b in specs for n in b.names}
        rest = sorted(free_variables(stmt) - bound)
        if rest:
            specs.append(corp.Binding(tuple(rest), "pd"))
        root = ens.SeededGenerator(args.seed).derive("eval")
        worst, failures = math.inf, []
        for i in range(samples):
            b = corp.draw_bindings(specs, root.derive(i), dim, (10.0, 1e3)[(i // 7) % 2])
            v = evaluate(stmt, b, tol)
            worst = min(worst, v.margin)
            if not v.holds:
                failures.append({"case_index": i, "margin": v.margin})
        record.update(mode="random", dim=dim, seed=args.seed, samples=samples,
                      bindings=[f"{','.join(b.names)}:{b.kind}" for b in specs],
                      **{"pass": not failures, "worst_margin": worst, "failures": failures})
    if args.format == "json":
        out.write(to_json(record) + "\n")
    else:
        out.write("\n".join(f"{k:14} {v}" for k, v in record.items() if k != "failures") + "\n")
        for f in record.get("failures", [])[:20]:
            out.write(f"  case {f['case_index']}: margin {f['margin']:.3e}\n")
    return EXIT_OK if record["pass"] else EXIT_FAIL


def cmd_corpus(args, out) -> int:
    lines = corp.load_corpus(args.path)
    if not args.run:
        for cl in lines:
            out.write(f"{cl.lineno:4}  {cl.property:30} {cl.template}\n")
        covered = {cl.property for cl in lines}
        missing = [p for p in PROPERTIES if p not in covered]
        out.write(f"{len(lines)} statements, {len(covered)} properties"
                  + (f", missing: {', '.join(missing)}" if missing else "") + "\n")
        return EXIT_OK if not missing else EXIT_FAIL
    cfg = build_config(args)
    verdicts = corp.run_corpus(lines, cfg)
    if args.format == "json":
        out.write(to_json([corpus_verdict_dict(v) for v in verdicts]) + "\n")
    else:
        for v in verdicts:
            out.write(f"{v.property:30} {'PASS' if v.passed else 'FAIL'}\n")
            for r in v.lines:
                out.write(f"    line {r.lineno:3} {'ok ' if r.passed else 'BAD'} worst={r.worst_margin:.3e}\n")
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dims", help="comma list; AxB entries set the tensor factor pairs")
    p.add_argument("--samples", type=int, help="samples per (property, dim, lambda) cell")
    p.add_argument("--lambdas", help="comma list overriding the lambda grids")
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-9)")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsallis-check", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run registered properties")
    _common(c)
    c.add_argument("--property", action="append", help="property or auxiliary suite name (repeatable)")
    c.add_argument("--all", action="store_true", help="every registered property")
    c.add_argument("--aux", action="store_true", help="with --all, also the auxiliary suites")
    c.add_argument("--corpus", nargs="?", const="", default=None,
                   help="also run a statement corpus (default: the bundled one) and compare verdicts")
    c.add_argument("--workers", type=int, default=1, help="processes for property execution")

    e = sub.add_parser("eval", help="decide one DSL statement")
    _common(e)
    e.add_argument("statement")
    e.add_argument("--matrices", help="JSON file of named matrices")
    e.add_argument("--random", type=int, metavar="DIM", help="draw bindings of this dimension (default 3)")
    e.add_argument("--bind", action="append", help="binding spec such as A,B:ordered (default pd)")

    k = sub.add_parser("corpus", help="list, or with --run evaluate, a statement corpus")
    _common(k)
    k.add_argument("--path", help="corpus file (default: the bundled one)")
    k.add_argument("--run", action="store_true")
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"check": cmd_check, "eval": cmd_eval, "corpus": cmd_corpus}[args.command]
    try:
        return handler(args, out)
    except (ConfigError, DslError, corp.CorpusError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
