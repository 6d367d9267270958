import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsallis_ops import dsl
from tsallis_ops import ensembles as ens
from tsallis_ops.dsl import (
    Add, EqualityVerdict, EvalError, Func, Inv, Kron, MatMul, MatrixVar, Neg, ParseError, ScalarLit,
    ScalarMul, Statement, Sub, evaluate, parse, pretty,
)
from tsallis_ops.matrix import HermitianMatrix, LoewnerVerdict

A, B = MatrixVar("A"), MatrixVar("B")


@pytest.fixture
def pair():
    g = ens.SeededGenerator(17)
    return {"A": ens.random_pd(g.derive("A"), 3), "B": ens.random_pd(g.derive("B"), 3)}


# -- parsing --

def test_grammar_example():
    assert parse("T(0.5; A, B) <= B - A") == Statement(Func("T", 0.5, (A, B)), "<=", Sub(B, A))


def test_equality_statement_parses():
    st_ = parse("S(A, B) == T(0.5; A, B)")
    assert st_.rel == "==" and st_.lhs == Func("S", None, (A, B))


def test_missing_semicolon():
    with pytest.raises(ParseError) as exc:
        parse("pm(0.5 A, B) <= A")
    assert exc.value.offset == 7 and exc.value.expected == {";"}


@pytest.mark.parametrize("text, offset", [
    ("pm(A, B) <= A", 3),        # missing lambda
    ("foo(A) <= A", 0),          # unknown function
    ("T(0.5; A) <= A", 0),       # arity
    ("A <= ", 5),                # truncated
    ("A + <= B", 4),
    ("(A <= B", 3),
    ("A <= B B", 7),
    ("A <= 2", 0),               # kind mismatch
    ("A + 2 <= A", 0),
    ("tr(A) <= A", 0),
    ("A ? B", 2),
])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.offset == offset


def test_offsets_are_bytes():
    with pytest.raises(ParseError) as exc:
        parse("A <= B + λ")
    assert exc.value.offset == 9
    with pytest.raises(ParseError) as exc:
        parse("A <= Bλ + )")
    assert exc.value.offset == 6


def test_precedence_and_associativity():
    assert parse("A - B - A <= A").lhs == Sub(Sub(A, B), A)
    assert parse("A + B * A <= A").lhs == Add(A, MatMul(B, A))
    assert parse("2 * A * B <= A").lhs == MatMul(ScalarMul(ScalarLit(2.0), A), B)
    assert parse("-A * B <= A").lhs == MatMul(Neg(A), B)


def test_node_kinds():
    st_ = parse("inv(A) + kron(A, B) * id(kron(A, B)) <= norm(A) * A")
    assert isinstance(st_.lhs.left, Inv) and isinstance(st_.lhs.right.left, Kron)
    assert isinstance(st_.rhs, ScalarMul)
    assert dsl.kind_of(parse("tr(A) <= 1").lhs) == dsl.SCALAR


def test_negative_lambda_literal():
    assert parse("T(-0.5; A, B) <= A").lhs.param == -0.5
    assert parse("pow(1e-06; A) <= A").lhs.param == 1e-6


def test_literals_are_non_negative():
    with pytest.raises(ValueError):
        ScalarLit(-1.0)


# -- printing --

def test_pretty_examples():
    assert pretty(parse("T(0.5;A,B)<=B-A")) == "T(0.5; A, B) <= B - A"
    assert pretty(parse("A - (B - A) <= A")) == "A - (B - A) <= A"
    assert pretty(parse("(A * B) * A <= A")) == "A * B * A <= A"
    assert pretty(parse("A * (B * A) <= A")) == "A * (B * A) <= A"


names = st.sampled_from(["A", "B", "C"])
lits = st.floats(0, 1e6, allow_nan=False).map(ScalarLit)
params = st.floats(-2, 1, allow_nan=False)


def matrix_exprs():
    leaves = names.map(MatrixVar)

    def extend(m):
        two = st.tuples(m, m)
        return st.one_of(
            two.map(lambda p: Add(*p)), two.map(lambda p: Sub(*p)), two.map(lambda p: MatMul(*p)),
            two.map(lambda p: Kron(*p)), m.map(Neg), m.map(Inv),
            st.tuples(lits, m).map(lambda p: ScalarMul(*p)),
            st.tuples(params, two).map(lambda p: Func("T", p[0], p[1])),
            two.map(lambda p: Func("S", None, p)),
            st.tuples(params, m).map(lambda p: Func("lnl", p[0], (p[1],))),
            m.map(lambda x: Func("adj", None, (x,))),
            st.tuples(scalar_of(m), m).map(lambda p: ScalarMul(*p)),
        )
    return st.recursive(leaves, extend, max_leaves=8)


def scalar_of(m):
    return st.one_of(lits, m.map(lambda x: Func("tr", None, (x,))),
                     st.tuples(params, m).map(lambda p: Func("Sl", p[0], (p[1],))))


@given(matrix_exprs(), st.sampled_from(["<=", ">=", "=="]), matrix_exprs())
def test_parse_print_round_trip(lhs, rel, rhs):
    stmt = Statement(lhs, rel, rhs)
    assert parse(pretty(stmt)) == stmt


# -- evaluation --

def test_zero_at_equal_arguments(pair):
    v = evaluate("T(0.5; A, A) == 0*A", pair)
    assert isinstance(v, EqualityVerdict) and v.holds
    assert v.residual <= 1e-13


def test_upper_bound_holds(pair):
    v = evaluate("T(0.5; A, B) <= B - A", pair)
    assert isinstance(v, LoewnerVerdict) and v.holds


def test_reversed_bound_fails_off_equality(pair):
    b = {"A": pair["A"], "B": pair["A"] + HermitianMatrix.identity(3)}
    v = evaluate("T(0.5; A, B) >= B - A", b)
    assert not v.holds and v.witness_min_eig < 0


def test_reversed_chain_fails(pair):
    assert not evaluate("S(A,B) >= T(0.5; A,B)", pair).holds


def test_scalar_statements(pair):
    v = evaluate("tr(A + B) == tr(A) + tr(B)", pair)
    assert v.holds
    assert evaluate("norm(A) >= 0", pair).holds
    assert not evaluate("norm(A) <= 0", pair).holds
    assert evaluate("lnl(0.5; 4) == 2", {}).holds
    assert evaluate("log(2.718281828459045) == 1", {}).holds
    assert evaluate("inv(4) * 8 == 2", {}).holds


def test_evaluation_is_pure(pair):
    stmt = parse("pm(0.3; A, B) + T(-1; A, B) <= kron(id(A), A) * 0 + A + B")
    with pytest.raises(EvalError):
        evaluate(stmt, pair)        # 9 vs 3: dimensions differ
    s2 = parse("pm(0.3; A, B) - A*inv(B)*A <= A + B")
    a, b = evaluate(s2, pair), evaluate(s2, pair)
    assert a == b


def test_unbound_variable_span(pair):
    with pytest.raises(EvalError) as exc:
        evaluate("T(0.5; A, C) <= A", pair)
    assert exc.value.span == (10, 11)


def test_precondition_failure_span(pair):
    with pytest.raises(EvalError) as exc:
        evaluate("A <= T(0.5; A, A - 10*B)", pair)
    assert exc.value.span == (15, 23)      # the operand A - 10*B
    assert "positive definite" in str(exc.value)


def test_unitary_bindings_and_adjoint(pair):
    U = ens.random_unitary(ens.SeededGenerator(4), 3)
    b = dict(pair, U=U)
    assert evaluate("T(0.5; U*A*adj(U), U*B*adj(U)) == U*T(0.5; A, B)*adj(U)", b).holds


def test_tensor_identity_in_dsl():
    g = ens.SeededGenerator(8)
    b = {"X": ens.random_pd(g.derive("X"), 2), "Y": ens.random_pd(g.derive("Y"), 3)}
    v = evaluate("lnl(0.5; kron(X, Y)) == kron(lnl(0.5; X), id(Y)) + kron(id(X), lnl(0.5; Y))"
                 " + 0.5*kron(lnl(0.5; X), lnl(0.5; Y))", b)
    assert v.holds and v.residual <= 1e-12


def test_density_functions():
    r = HermitianMatrix(np.eye(2) / 2)
    b = {"r": r}
    assert evaluate("Sl(0.5; r) == 0.8284271247461903", b).holds
    assert evaluate("vn(r) == log(2)", b).holds
    assert evaluate("D(0.5; r, r) == 0", b).holds
    with pytest.raises(EvalError):
        evaluate("Sl(0.5; 2*r) <= 0", b)     # trace 2 is not a density


def test_cache_shares_subexpressions(pair):
    cache = {}
    evaluate("T(0.5; A, B) <= B - A", pair, cache=cache)
    n = len(cache)
    evaluate("A - A*inv(B)*A <= T(0.5; A, B)", pair, cache=cache)
    assert Func("T", 0.5, (A, B)) in cache and len(cache) > n


def test_free_variables():
    assert dsl.free_variables(parse("T(0.5; A, kron(B, C)) <= norm(D(0.1; r, s)) * A")) == {"A", "B", "C", "r", "s"}
