"""A small language for operator (in)equalities.

Grammar (LL(1))::

    statement := expr rel expr
    rel       := "<=" | ">=" | "=="
    expr      := term { ("+" | "-") term }
    term      := factor { "*" factor }
    factor    := "-" factor | NUMBER | IDENT | call | "(" expr ")"
    call      := IDENT "(" [ ["-"] NUMBER ";" ] expr { "," expr } ")"

Whether a call takes the leading ``NUMBER ;`` argument is fixed by the
function name, so one token of lookahead always decides.  Every node has a
static kind (scalar or matrix); ``*`` becomes :class:`ScalarMul` when either
side is a scalar and :class:`MatMul` otherwise.

Scalars compare as 1x1 matrices, so every relation is decided by
:func:`tsallis_ops.matrix.loewner_leq`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .entropy import (
    ln_lambda_op,
    ln_lambda_scalar,
    operator_entropy,
    tsallis_entropy,
    tsallis_op_entropy,
    tsallis_rel_entropy,
    tsallis_rel_op_entropy,
    von_neumann_entropy,
    power_mean,
    rel_op_entropy,
)
from .matrix import (
    DEFAULT_TOL,
    HermitianMatrix,
    LoewnerVerdict,
    NotPositiveDefinite,
    TolerancePolicy,
    loewner_leq,
    matrix_log,
    matrix_power,
)

EVAL_HERM_TOL = 1e-8
MAX_KRON_DIM = 81

SCALAR, MATRIX = "scalar", "matrix"
Span = tuple  # (start, end) byte offsets


class DslError(ValueError):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at byte {span[0]}")
        self.message = message
        self.span = span


class ParseError(DslError):
    def __init__(self, message: str, span: Span, expected: frozenset = frozenset()):
        if expected:
            message = f"{message}; expected one of {', '.join(sorted(expected))}"
        super().__init__(message, span)
        self.offset = span[0]
        self.expected = expected


class EvalError(DslError):
    pass


# -- AST --

@dataclass(frozen=True)
class MatrixVar:
    name: str
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ScalarLit:
    value: float
    span: Span = field(default=(0, 0), compare=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError("literals are finite and non-negative; use Neg for the sign")


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ScalarMul:
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class MatMul:
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Inv:
    operand: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Kron:
    left: "Expr"
    right: "Expr"
    span: Span = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Func:
    name: str
    param: float | None
    args: tuple
    span: Span = field(default=(0, 0), compare=False, repr=False)


Expr = Union[MatrixVar, ScalarLit, Neg, Add, Sub, ScalarMul, MatMul, Inv, Kron, Func]


class Rel:
    LEQ, GEQ, EQ = "<=", ">=", "=="


@dataclass(frozen=True)
class Statement:
    lhs: Expr
    rel: str
    rhs: Expr


@dataclass(frozen=True)
class Signature:
    param: bool          # takes the leading "NUMBER ;" argument
    args: tuple          # argument kinds; "any" means scalar or matrix
    result: str          # a kind, or "same" for the kind of the first argument


FUNCTIONS: dict[str, Signature] = {
    "T": Signature(True, (MATRIX, MATRIX), MATRIX),
    "S": Signature(False, (MATRIX, MATRIX), MATRIX),
    "H": Signature(False, (MATRIX,), MATRIX),
    "Hl": Signature(True, (MATRIX,), MATRIX),
    "pm": Signature(True, (MATRIX, MATRIX), MATRIX),
    "lnl": Signature(True, ("any",), "same"),
    "log": Signature(False, ("any",), "same"),
    "pow": Signature(True, ("any",), "same"),
    "inv": Signature(False, ("any",), "same"),
    "kron": Signature(False, (MATRIX, MATRIX), MATRIX),
    "id": Signature(False, (MATRIX,), MATRIX),
    "adj": Signature(False, (MATRIX,), MATRIX),
    "norm": Signature(False, ("any",), SCALAR),
    "tr": Signature(False, (MATRIX,), SCALAR),
    "Sl": Signature(True, (MATRIX,), SCALAR),
    "vn": Signature(False, (MATRIX,), SCALAR),
    "D": Signature(True, (MATRIX, MATRIX), SCALAR),
}


# -- tokenizer --

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<NUMBER>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|[-+*(),;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str     # NUMBER, IDENT, EOF, or the operator text itself
    text: str
    span: Span


def tokenize(text: str) -> list[Token]:
    s = text
    # byte offset of every character position
    offsets = np.cumsum([0] + [len(ch.encode("utf-8")) for ch in s]).tolist()
    out, pos = [], 0
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        if m is None:
            raise ParseError(f"unexpected character {s[pos]!r}", (offsets[pos], offsets[pos + 1]),
                             frozenset({"NUMBER", "IDENT", "operator"}))
        kind = m.lastgroup
        if kind != "ws":
            tk = m.group() if kind == "op" else kind
            out.append(Token(tk, m.group(), (offsets[m.start()], offsets[m.end()])))
        pos = m.end()
    out.append(Token("EOF", "", (offsets[-1], offsets[-1])))
    return out


# -- parser --

_FACTOR_START = frozenset({"-", "NUMBER", "IDENT", "("})


def kind_of(e: Expr) -> str:
    if isinstance(e, (MatrixVar, MatMul, Kron)):
        return MATRIX
    if isinstance(e, ScalarLit):
        return SCALAR
    if isinstance(e, (Neg, Inv)):
        return kind_of(e.operand)
    if isinstance(e, (Add, Sub)):
        return kind_of(e.left)
    if isinstance(e, ScalarMul):
        return MATRIX if MATRIX in (kind_of(e.left), kind_of(e.right)) else SCALAR
    sig = FUNCTIONS[e.name]
    return kind_of(e.args[0]) if sig.result == "same" else sig.result


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"syntax error: unexpected {what}", t.span, frozenset(expected))

    def statement(self) -> Statement:
        lhs = self.expr()
        if self.tok.kind not in (Rel.LEQ, Rel.GEQ, Rel.EQ):
            self.fail({"<=", ">=", "==", "+", "-", "*"})
        rel = self.advance().kind
        rhs = self.expr()
        if self.tok.kind != "EOF":
            self.fail({"EOF", "+", "-", "*"})
        if kind_of(lhs) != kind_of(rhs):
            raise ParseError(f"cannot compare a {kind_of(lhs)} with a {kind_of(rhs)}",
                             (lhs.span[0], rhs.span[1]))
        return Statement(lhs, rel, rhs)

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            right = self.term()
            span = (left.span[0], right.span[1])
            if kind_of(left) != kind_of(right):
                raise ParseError(f"cannot add a {kind_of(left)} and a {kind_of(right)}", span)
            left = (Add if op == "+" else Sub)(left, right, span)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok.kind == "*":
            self.advance()
            right = self.factor()
            span = (left.span[0], right.span[1])
            scalar = SCALAR in (kind_of(left), kind_of(right))
            left = (ScalarMul if scalar else MatMul)(left, right, span)
        return left

    def factor(self) -> Expr:
        t = self.tok
        if t.kind == "-":
            self.advance()
            inner = self.factor()
            return Neg(inner, (t.span[0], inner.span[1]))
        if t.kind == "NUMBER":
            self.advance()
            return ScalarLit(float(t.text), t.span)
        if t.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "IDENT":
            self.advance()
            if self.tok.kind == "(":
                return self.call(t)
            if t.text in FUNCTIONS:
                raise ParseError(f"function {t.text!r} used without arguments", t.span, frozenset({"("}))
            return MatrixVar(t.text, t.span)
        self.fail(_FACTOR_START)

    def number(self) -> float:
        sign = 1.0
        if self.tok.kind == "-":
            self.advance()
            sign = -1.0
        return sign * float(self.expect("NUMBER").text)

    def call(self, name: Token) -> Expr:
        sig = FUNCTIONS.get(name.text)
        if sig is None:
            raise ParseError(f"unknown function {name.text!r}", name.span, frozenset(FUNCTIONS))
        self.expect("(")
        param = None
        if sig.param:
            if self.tok.kind not in ("NUMBER", "-"):
                raise ParseError(f"missing lambda argument for {name.text!r}", self.tok.span,
                                 frozenset({"NUMBER"}))
            param = self.number()
            self.expect(";")
        args = [self.expr()]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.expr())
        end = self.expect(")").span[1]
        span = (name.span[0], end)
        if len(args) != len(sig.args):
            raise ParseError(f"{name.text!r} takes {len(sig.args)} argument(s), got {len(args)}", span)
        for a, k in zip(args, sig.args):
            if k != "any" and kind_of(a) != k:
                raise ParseError(f"{name.text!r} expects a {k} argument, got a {kind_of(a)}", a.span)
        if name.text == "inv":
            return Inv(args[0], span)
        if name.text == "kron":
            return Kron(args[0], args[1], span)
        return Func(name.text, param, tuple(args), span)


def parse(text: str) -> Statement:
    return _Parser(text).statement()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p.fail({"EOF", "+", "-", "*"})
    return e


# -- pretty printer --

def _num(x: float) -> str:
    return repr(float(x))


def _fmt(e: Expr, prec: int) -> str:
    # prec: 1 sum, 2 product, 3 factor
    if isinstance(e, MatrixVar):
        return e.name
    if isinstance(e, ScalarLit):
        return _num(e.value)
    if isinstance(e, Neg):
        return "-" + _fmt(e.operand, 3)
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        s = _fmt(e.left, 1) + op + _fmt(e.right, 2)
        return f"({s})" if prec > 1 else s
    if isinstance(e, (ScalarMul, MatMul)):
        s = _fmt(e.left, 2) + " * " + _fmt(e.right, 3)
        return f"({s})" if prec > 2 else s
    if isinstance(e, Inv):
        return f"inv({_fmt(e.operand, 1)})"
    if isinstance(e, Kron):
        return f"kron({_fmt(e.left, 1)}, {_fmt(e.right, 1)})"
    head = f"{_num(e.param)}; " if e.param is not None else ""
    return f"{e.name}({head}{', '.join(_fmt(a, 1) for a in e.args)})"


def pretty(node: Statement | Expr) -> str:
    if isinstance(node, Statement):
        return f"{_fmt(node.lhs, 1)} {node.rel} {_fmt(node.rhs, 1)}"
    return _fmt(node, 1)


# -- evaluation --

@dataclass(frozen=True)
class EqualityVerdict:
    holds: bool
    residual: float
    leq: LoewnerVerdict
    geq: LoewnerVerdict

    @property
    def margin(self) -> float:
        return min(self.leq.margin, self.geq.margin)


Verdict = Union[LoewnerVerdict, EqualityVerdict]
Value = Union[float, np.ndarray]


def _herm(x: np.ndarray, node: Expr) -> HermitianMatrix:
    try:
        return HermitianMatrix(x, herm_tol=EVAL_HERM_TOL)
    except ValueError as exc:
        raise EvalError(f"{pretty(node)}: {exc}", node.span) from exc


class _Evaluator:
    """Evaluates nodes, memoising equal subtrees (spans do not take part in equality)."""

    def __init__(self, bindings: Mapping[str, object], cache: dict | None = None):
        self.bindings = bindings
        self.cache = {} if cache is None else cache

    def __call__(self, e: Expr) -> Value:
        hit = self.cache.get(e)
        if hit is not None:
            return hit
        try:
            out = self.eval(e)
        except EvalError:
            raise
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            raise EvalError(f"{pretty(e)}: {exc}", e.span) from exc
        self.cache[e] = out
        return out

    def matrix_arg(self, a: Expr) -> HermitianMatrix:
        return _herm(self(a), a)

    def eval(self, e: Expr) -> Value:
        if isinstance(e, MatrixVar):
            if e.name not in self.bindings:
                raise EvalError(f"unbound variable {e.name!r}", e.span)
            v = self.bindings[e.name]
            return v.array if isinstance(v, HermitianMatrix) else np.asarray(v, dtype=complex)
        if isinstance(e, ScalarLit):
            return e.value
        if isinstance(e, Neg):
            return -self(e.operand)
        if isinstance(e, (Add, Sub)):
            a, b = self(e.left), self(e.right)
            if np.shape(a) != np.shape(b):
                raise EvalError(f"dimension mismatch {np.shape(a)} vs {np.shape(b)}", e.span)
            return a + b if isinstance(e, Add) else a - b
        if isinstance(e, ScalarMul):
            return self(e.left) * self(e.right)
        if isinstance(e, MatMul):
            a, b = self(e.left), self(e.right)
            if a.shape != b.shape:
                raise EvalError(f"dimension mismatch {a.shape} vs {b.shape}", e.span)
            return a @ b
        if isinstance(e, Inv):
            x = self(e.operand)
            if np.ndim(x) == 0:
                if x == 0:
                    raise EvalError("inverse of zero", e.span)
                return 1.0 / x
            if np.linalg.cond(x) > 1e14:
                raise EvalError(f"{pretty(e.operand)} is singular", e.span)
            return np.linalg.inv(x)
        if isinstance(e, Kron):
            a, b = self(e.left), self(e.right)
            if a.shape[0] * b.shape[0] > MAX_KRON_DIM:
                raise EvalError(f"Kronecker product dimension exceeds {MAX_KRON_DIM}", e.span)
            return np.kron(a, b)
        return self.func(e)

    def func(self, e: Func) -> Value:
        n, p, args = e.name, e.param, e.args
        if n in ("lnl", "log", "pow") and kind_of(args[0]) == SCALAR:
            x = float(np.real(self(args[0])))
            if n == "pow":
                return x ** p
            if x <= 0:
                raise EvalError(f"{n} needs a positive argument, got {x}", args[0].span)
            return math.log(x) if n == "log" else ln_lambda_scalar(x, p)
        if n == "norm":
            x = self(args[0])
            return abs(x) if np.ndim(x) == 0 else float(np.linalg.norm(x, 2))
        if n == "adj":
            return self(args[0]).conj().T
        if n == "id":
            return np.eye(self(args[0]).shape[0], dtype=complex)
        if n == "tr":
            t = complex(np.trace(self(args[0])))
            if abs(t.imag) > 1e-10 * max(1.0, abs(t.real)):
                raise EvalError(f"trace has imaginary part {t.imag:.3e}", e.span)
            return t.real
        ms = [self.matrix_arg(a) for a in args]
        if len(ms) == 2 and ms[0].dim != ms[1].dim:
            raise EvalError(f"{n}: operands differ in dimension", e.span)
        table = {
            "T": lambda: tsallis_rel_op_entropy(ms[0], ms[1], p),
            "S": lambda: rel_op_entropy(ms[0], ms[1]),
            "H": lambda: operator_entropy(ms[0]),
            "Hl": lambda: tsallis_op_entropy(ms[0], p),
            "pm": lambda: power_mean(ms[0], ms[1], p),
            "lnl": lambda: ln_lambda_op(ms[0], p),
            "log": lambda: matrix_log(ms[0]),
            "pow": lambda: matrix_power(ms[0], p),
            "Sl": lambda: tsallis_entropy(ms[0], p),
            "vn": lambda: von_neumann_entropy(ms[0]),
            "D": lambda: tsallis_rel_entropy(ms[0], ms[1], p),
        }
        try:
            out = table[n]()
        except NotPositiveDefinite as exc:
            # point at the operand that failed, not the whole call
            culprit = args[1] if len(args) == 2 and "second" in exc.what else args[0]
            raise EvalError(f"{pretty(culprit)}: {exc}", culprit.span) from exc
        return out.array if isinstance(out, HermitianMatrix) else float(out)


def eval_expr(e: Expr, bindings: Mapping[str, object]) -> Value:
    return _Evaluator(bindings)(e)


def _side(x: Value, node: Expr) -> HermitianMatrix:
    return _herm(np.array([[x]]) if np.ndim(x) == 0 else x, node)


def evaluate(stmt: Statement | str, bindings: Mapping[str, object], tol: TolerancePolicy = DEFAULT_TOL,
             cache: dict | None = None, scale: float = 0.0) -> Verdict:
    """Decide a statement; ``<=``/``>=`` give a LoewnerVerdict, ``==`` an EqualityVerdict.

    ``cache`` may be shared between statements evaluated on the same bindings.
    ``scale`` floors the norm the relative tolerance is applied to.
    """
    if isinstance(stmt, str):
        stmt = parse(stmt)
    ev = _Evaluator(bindings, cache)
    L, R = _side(ev(stmt.lhs), stmt.lhs), _side(ev(stmt.rhs), stmt.rhs)
    if L.dim != R.dim:
        raise EvalError(f"sides differ in dimension: {L.dim} vs {R.dim}", (stmt.lhs.span[0], stmt.rhs.span[1]))
    if stmt.rel == Rel.LEQ:
        return loewner_leq(L, R, tol, scale)
    if stmt.rel == Rel.GEQ:
        return loewner_leq(R, L, tol, scale)
    up, down = loewner_leq(L, R, tol, scale), loewner_leq(R, L, tol, scale)
    residual = float(np.linalg.norm(L.array - R.array, 2))
    return EqualityVerdict(up.holds and down.holds, residual, up, down)


def free_variables(node: Statement | Expr) -> set[str]:
    if isinstance(node, Statement):
        return free_variables(node.lhs) | free_variables(node.rhs)
    if isinstance(node, MatrixVar):
        return {node.name}
    if isinstance(node, ScalarLit):
        return set()
    if isinstance(node, Func):
        return set().union(*(free_variables(a) for a in node.args))
    kids = [getattr(node, f) for f in ("operand", "left", "right") if hasattr(node, f)]
    return set().union(*(free_variables(k) for k in kids))
