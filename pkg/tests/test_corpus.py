from dataclasses import replace

import pytest

from tsallis_ops import corpus as corp
from tsallis_ops.properties import PROPERTIES, PropertyReport, SuiteConfig

TINY = SuiteConfig(samples=2, dims=(2, 3), tensor_dims=((2, 2), (2, 3)))


def test_bundled_corpus_covers_every_claim():
    lines = corp.load_corpus()
    assert {cl.property for cl in lines} == set(PROPERTIES)


def test_line_syntax():
    cl = corp.parse_line("tensor_equality | A1,B1:pd@1 A2:pd@2 lam=pos,1e-6 tol=1e-4 c=1,2 | "
                         "T({lam}; kron(A1, A2), kron(B1, {c}*A2)) <= A1*0 + kron(A1, A2)", 3)
    assert cl.tensor and cl.uses_lam
    assert cl.bindings[0] == corp.Binding(("A1", "B1"), "pd", 1)
    assert cl.lams == ("pos", "1e-6") and cl.rel_tol == 1e-4
    assert cl.params == (("c", (1.0, 2.0)),)
    assert corp._lambda_grid(cl, TINY) == TINY.positive_grid() + (1e-6,)


def test_comments_and_blank_lines():
    assert corp.parse_line("   # nothing here", 1) is None
    assert corp.parse_line("", 2) is None


@pytest.mark.parametrize("line, msg", [
    ("homogeneity | A:pd", "expected"),
    ("homogeneity | A:blob | A <= A", "unknown binding kind"),
    ("homogeneity | A:ordered | A <= A", "exactly two"),
    ("homogeneity | A:pd@3 | A <= A", "factor"),
    ("homogeneity | A:pd | A <= B", "unbound variables"),
    ("homogeneity | A:pd | A <= {c}*A", "not bound"),
    ("homogeneity | A:pd | A <= pm(0.5 A, A)", "syntax error"),
    ("homogeneity | A:pd c=x | A <= A", "numbers"),
])
def test_bad_lines(line, msg):
    with pytest.raises(corp.CorpusError, match=msg):
        corp.parse_line(line, 1)


def test_templates_fill_lambda_helpers():
    cl = corp.parse_line("alpha_bounds | A,B:pd | pm({lam1}; A, B) <= pow({lamc}; A)", 1)
    assert cl.instantiate(0.25, {}) == "pm(-0.75; A, B) <= pow(0.75; A)"
    cl = corp.parse_line("rel_entropy_tensor | X:pd@1 Y:pd@2 | log(kron(X, Y)) == log(kron(X, Y))", 1)
    assert corp._lambda_grid(cl, TINY) == (None,)


def test_run_line_is_deterministic():
    cl = corp.parse_line("ordering_chain | A,B:pd | S(A, B) <= T({lam}; A, B)", 1)
    a, b = corp.run_line(cl, TINY), corp.run_line(cl, TINY)
    assert a.passed and a.worst_margin == b.worst_margin
    assert a.evaluations == len(TINY.dims) * len(TINY.positive_grid()) * TINY.samples


def test_false_statement_fails_with_cases():
    cl = corp.parse_line("ordering_chain | A,B:pd | S(A, B) >= T({lam}; A, B)", 1)
    res = corp.run_line(cl, TINY)
    assert not res.passed and len(res.failures) == res.evaluations
    assert all(f.margin < 0 for f in res.failures)


def test_eval_errors_become_failures():
    cl = corp.parse_line("ordering_chain | A,B:pd | S(A, A - 10*B) <= A", 1)
    res = corp.run_line(cl, replace(TINY, samples=1, dims=(2,)))
    assert not res.passed and "positive definite" in res.failures[0].message


def test_bindings_by_kind():
    from tsallis_ops import ensembles as ens
    from tsallis_ops.matrix import loewner_leq
    specs = corp.parse_line("homogeneity | A,B:ordered r:density p,q:commuting_density U:unitary "
                            "P:projector X:psd@1 | A <= A", 1).bindings
    b = corp.draw_bindings(specs, ens.SeededGenerator(1), (2, 3), 10.0)
    assert loewner_leq(b["A"], b["B"]).holds
    assert b["A"].dim == 6 and b["X"].dim == 2
    P = b["P"].array
    assert abs(P @ P - P).max() == 0 and 0 < P.trace().real < 6


def test_compare_needs_both_sides():
    reps = [PropertyReport("homogeneity", [], [], 1, 42, True, 0.0, [], 0.0),
            PropertyReport("ordering_chain", [], [], 1, 42, False, -1.0, [], 0.0)]
    verdicts = [corp.CorpusVerdict("homogeneity", True, [], 0.0),
                corp.CorpusVerdict("ordering_chain", False, [], 0.0)]
    assert all(c.matches for c in corp.compare(reps, verdicts))
    assert not corp.compare(reps, verdicts[:1])[1].matches


def test_unknown_property_in_corpus():
    lines = corp.parse_corpus("nope | A:pd | A <= A")
    with pytest.raises(corp.CorpusError):
        corp.run_corpus(lines, TINY)


def test_bundled_corpus_passes_small():
    verdicts = corp.run_corpus(corp.load_corpus(), replace(TINY, samples=1))
    bad = [(v.property, [r.lineno for r in v.lines if not r.passed]) for v in verdicts if not v.passed]
    assert not bad


def test_input_scale_option():
    cl = corp.parse_line("two_sided_bounds | A:pd tol=1e-10 scale=inputs | T({lam}; A, A) == 0*A", 1)
    assert cl.input_scale and corp.run_line(cl, TINY).passed
    with pytest.raises(corp.CorpusError, match="scale"):
        corp.parse_line("two_sided_bounds | A:pd scale=2 | A == A", 1)
