"""Statement corpus: registry claims restated in the DSL.

One line per claim::

    property | bindings | statement template

``bindings`` is a whitespace-separated list of

* ``A,B:kind`` with kind in :data:`KINDS`, optionally suffixed ``@1`` or
  ``@2`` to draw in the first or second tensor factor dimension,
* ``lam=...`` a comma list of numbers, ``pos`` or ``neg`` (the suite grids);
  without it the registry grid of the property is used,
* ``tol=...`` the relative tolerance, ``atol=...`` the absolute floor,
* ``scale=inputs`` applies the relative tolerance to at least the largest
  norm among the bound matrices; for equalities whose sides vanish,
* ``name=v1,v2,...`` any other template parameter.

The template is filled with :meth:`str.format` using ``lam``, ``lamc = 1 - lam``,
``lam1 = lam - 1`` and the parameters.  A line is tensor-shaped when any
binding carries ``@1``/``@2``; it then runs over the tensor factor pairs.
"""

from __future__ import annotations

import itertools
import math
import string
import time
from dataclasses import dataclass, field
from importlib import resources

from . import ensembles as ens
from .dsl import EvalError, evaluate, free_variables, parse
from .matrix import HermitianMatrix, TolerancePolicy, operator_norm
from .properties import PROPERTIES, PropertyReport, SuiteConfig, get_property

KINDS = ("pd", "psd", "ordered", "commuting", "density", "commuting_density", "unitary", "projector")
PAIR_KINDS = ("ordered", "commuting", "commuting_density")
DEFAULT_CORPUS = "paper_corpus.txt"


class CorpusError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"corpus line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Binding:
    names: tuple
    kind: str
    factor: int = 0   # 0 full dimension, 1 or 2 a tensor factor


@dataclass(frozen=True)
class CorpusLine:
    lineno: int
    property: str
    bindings: tuple
    lams: tuple | None
    params: tuple          # ((name, (values...)), ...)
    rel_tol: float | None
    abs_tol: float | None
    template: str
    input_scale: bool = False

    @property
    def tensor(self) -> bool:
        return any(b.factor for b in self.bindings)

    @property
    def uses_lam(self) -> bool:
        fields = {f for _, f, _, _ in string.Formatter().parse(self.template) if f}
        return bool(fields & {"lam", "lamc", "lam1"})

    def instantiate(self, lam: float | None, values: dict) -> str:
        subs = dict(values)
        if lam is not None:
            subs.update(lam=float(lam), lamc=1.0 - lam, lam1=lam - 1.0)
        return self.template.format(**subs)


def _floats(text: str, lineno: int) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise CorpusError(lineno, f"expected a comma list of numbers, got {text!r}") from None


def parse_line(line: str, lineno: int) -> CorpusLine | None:
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    parts = [p.strip() for p in body.split("|")]
    if len(parts) != 3:
        raise CorpusError(lineno, "expected 'property | bindings | statement'")
    prop, spec, template = parts
    bindings, params = [], []
    lams = rel = atol = None
    input_scale = False
    for item in spec.split():
        if ":" in item:
            names, kind = item.split(":", 1)
            factor = 0
            if "@" in kind:
                kind, f = kind.split("@", 1)
                if f not in ("1", "2"):
                    raise CorpusError(lineno, f"factor must be @1 or @2, got @{f}")
                factor = int(f)
            if kind not in KINDS:
                raise CorpusError(lineno, f"unknown binding kind {kind!r}")
            names = tuple(names.split(","))
            if kind in PAIR_KINDS and len(names) != 2:
                raise CorpusError(lineno, f"{kind} binds exactly two names")
            bindings.append(Binding(names, kind, factor))
        elif "=" in item:
            key, val = item.split("=", 1)
            if key == "lam":
                lams = tuple(val.split(","))
            elif key == "tol":
                rel = _floats(val, lineno)[0]
            elif key == "atol":
                atol = _floats(val, lineno)[0]
            elif key == "scale":
                if val != "inputs":
                    raise CorpusError(lineno, f"scale must be 'inputs', got {val!r}")
                input_scale = True
            else:
                params.append((key, _floats(val, lineno)))
        else:
            raise CorpusError(lineno, f"cannot read binding {item!r}")
    cl = CorpusLine(lineno, prop, tuple(bindings), lams, tuple(params), rel, atol, template,
                    input_scale)
    # every instantiation must parse and be closed over the bindings
    bound = {n for b in cl.bindings for n in b.names}
    for values in _param_grid(cl):
        try:
            stmt = parse(cl.instantiate(0.5 if cl.uses_lam else None, values))
        except (KeyError, IndexError) as exc:
            raise CorpusError(lineno, f"template field {exc} is not bound") from None
        except ValueError as exc:
            raise CorpusError(lineno, str(exc)) from None
        missing = free_variables(stmt) - bound
        if missing:
            raise CorpusError(lineno, f"unbound variables {sorted(missing)}")
    return cl


def parse_corpus(text: str) -> list[CorpusLine]:
    lines = [parse_line(l, i) for i, l in enumerate(text.splitlines(), 1)]
    return [l for l in lines if l is not None]


def load_corpus(path=None) -> list[CorpusLine]:
    if path is None:
        text = resources.files("tsallis_ops").joinpath(DEFAULT_CORPUS).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_corpus(text)


def _param_grid(cl: CorpusLine):
    names = [n for n, _ in cl.params]
    for combo in itertools.product(*(v for _, v in cl.params)):
        yield dict(zip(names, combo))


def _lambda_grid(cl: CorpusLine, config: SuiteConfig) -> tuple:
    if not cl.uses_lam:
        return (None,)
    if cl.lams is None:
        return tuple(get_property(cl.property).grid(config))
    out = []
    for tok in cl.lams:
        if tok == "pos":
            out += config.positive_grid()
        elif tok == "neg":
            out += config.negative_grid()
        else:
            out.append(float(tok))
    return tuple(out)


def _projector(gen: ens.SeededGenerator, dim: int) -> HermitianMatrix:
    # onto the first k standard basis vectors, 1 <= k < dim
    k = int(gen.rng("projector").integers(1, dim)) if dim > 1 else 1
    return HermitianMatrix.diag([1.0] * k + [0.0] * (dim - k))


def draw_bindings(bindings, gen: ens.SeededGenerator, dim, cond: float) -> dict:
    """Generate every bound name for one sample; ``dim`` is an int or a factor pair."""
    out = {}
    for b in bindings:
        d = dim if b.factor == 0 else dim[b.factor - 1]
        if isinstance(d, tuple):
            d = d[0] * d[1]
        g = gen.derive(*b.names)
        if b.kind == "ordered":
            out.update(zip(b.names, ens.random_ordered_pair(g, d, cond_target=cond)))
        elif b.kind == "commuting":
            out.update(zip(b.names, ens.random_commuting_pair(g, d, cond)))
        elif b.kind == "commuting_density":
            out.update(zip(b.names, ens.random_commuting_densities(g, d)))
        else:
            for n in b.names:
                gn = gen.derive(n)
                out[n] = {
                    "pd": lambda: ens.random_pd(gn, d, cond),
                    "psd": lambda: ens.random_psd(gn, d, 1.0),
                    "density": lambda: ens.random_density(gn, d),
                    "unitary": lambda: ens.random_unitary(gn, d),
                    "projector": lambda: _projector(gn, d),
                }[b.kind]()
    return out


@dataclass
class LineFailure:
    case_index: int
    lam: float | None
    dim: int
    params: dict
    margin: float
    message: str = ""


@dataclass
class LineResult:
    lineno: int
    property: str
    template: str
    passed: bool
    worst_margin: float
    evaluations: int
    failures: list = field(default_factory=list)
    generation_failures: int = 0


def run_line(cl: CorpusLine, config: SuiteConfig, ordinal: int = 0) -> LineResult:
    tol = TolerancePolicy(rel=cl.rel_tol if cl.rel_tol is not None else config.eps_rel,
                          abs=cl.abs_tol if cl.abs_tol is not None else config.abs_tol)
    dims = config.tensor_dims if cl.tensor else config.dims
    targets = config.tensor_cond_targets if cl.tensor else config.cond_targets
    grid = _lambda_grid(cl, config)
    stmts: dict = {}
    worst, evals, gen_failures, failures = math.inf, 0, 0, []
    root = ens.SeededGenerator(config.seed).derive("corpus", cl.property, ordinal)
    for dim in dims:
        dkey = dim[0] * dim[1] if isinstance(dim, tuple) else dim
        for lam in grid:
            for i in range(config.samples):
                cond = targets[(i // 7) % len(targets)]
                gen = root.derive(dkey, float(lam or 0.0), i)
                try:
                    bound = draw_bindings(cl.bindings, gen, dim, cond)
                except ens.GenerationError:
                    gen_failures += 1
                    continue
                cache: dict = {}
                floor = max(operator_norm(m) for m in bound.values()) if cl.input_scale else 0.0
                for values in _param_grid(cl):
                    key = (lam, tuple(values.items()))
                    if key not in stmts:
                        stmts[key] = parse(cl.instantiate(lam, values))
                    evals += 1
                    try:
                        v = evaluate(stmts[key], bound, tol, cache, floor)
                        margin, holds, msg = v.margin, v.holds, ""
                    except EvalError as exc:
                        margin, holds, msg = -math.inf, False, str(exc)
                    worst = min(worst, margin)
                    if not holds:
                        failures.append(LineFailure(i, lam, dkey, values, margin, msg))
    return LineResult(cl.lineno, cl.property, cl.template, not failures and gen_failures == 0,
                      worst if evals else 0.0, evals, failures, gen_failures)


@dataclass
class CorpusVerdict:
    property: str
    passed: bool
    lines: list
    wall_ms: float


def run_corpus(lines: list[CorpusLine], config: SuiteConfig = SuiteConfig(),
               properties: tuple | None = None) -> list[CorpusVerdict]:
    """Run every line and group the verdicts by property, in registry order."""
    by_prop: dict[str, list[CorpusLine]] = {}
    for cl in lines:
        if cl.property not in PROPERTIES:
            raise CorpusError(cl.lineno, f"unknown property {cl.property!r}")
        by_prop.setdefault(cl.property, []).append(cl)
    wanted = properties or tuple(p for p in PROPERTIES if p in by_prop)
    out = []
    for prop in wanted:
        t0 = time.perf_counter()
        results = [run_line(cl, config, k) for k, cl in enumerate(by_prop.get(prop, []))]
        out.append(CorpusVerdict(prop, bool(results) and all(r.passed for r in results), results,
                                 (time.perf_counter() - t0) * 1e3))
    return out


@dataclass(frozen=True)
class Comparison:
    property: str
    registry: bool | None
    corpus: bool | None

    @property
    def matches(self) -> bool:
        return self.registry is not None and self.registry == self.corpus


def compare(reports: list[PropertyReport], verdicts: list[CorpusVerdict]) -> list[Comparison]:
    """Claim-by-claim agreement; a claim missing on either side never matches."""
    reg = {r.property: r.passed for r in reports}
    cor = {v.property: v.passed for v in verdicts}
    names = list(reg) + [n for n in cor if n not in reg]
    return [Comparison(n, reg.get(n), cor.get(n)) for n in names]
