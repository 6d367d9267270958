import json
import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsallis_ops import ensembles as ens
from tsallis_ops import properties as P
from tsallis_ops.entropy import ln_lambda_scalar, tsallis_rel_op_entropy
from tsallis_ops.matrix import HermitianMatrix, operator_norm

SMALL = P.SuiteConfig(samples=3, dims=(2, 3), tensor_dims=((2, 2), (2, 3)))
D = HermitianMatrix.diag


def test_registry_has_nineteen_claims():
    assert len(P.PROPERTIES) == 19
    assert all(spec.claim for spec in P.PROPERTIES.values())


@pytest.mark.parametrize("name", list(P.PROPERTIES))
def test_property_passes_on_small_ensemble(name):
    rep = P.run_property(P.get_property(name), SMALL)
    assert rep.passed, rep.failures[:3]
    assert rep.cases > 0 and rep.generation_failures == 0
    assert rep.worst_margin >= -max(rep.tolerance, P.LIMIT_TOL)


def test_unknown_property():
    with pytest.raises(KeyError):
        P.get_property("nonexistent")


def test_run_all_filter_and_order():
    reps = P.run_all(replace(SMALL, samples=1, properties=("ordering_chain", "homogeneity")))
    assert [r.property for r in reps] == ["ordering_chain", "homogeneity"]


def test_report_schema_round_trips():
    rep = P.run_property(P.get_property("homogeneity"), replace(SMALL, samples=1))
    d = json.loads(json.dumps(rep.to_dict()))
    for key, typ in [("property", str), ("lambda_grid", list), ("dims", list), ("samples", int),
                     ("seed", int), ("pass", bool), ("worst_margin", float), ("failures", list),
                     ("wall_ms", float)]:
        assert isinstance(d[key], typ), key
    assert d["failures"] == []


def test_tensor_dims_report_products():
    rep = P.run_property(P.get_property("tensor_equality"), replace(SMALL, samples=1))
    assert rep.dims == [4, 6]


# -- failure detection and replay --

def _broken(c: P.Case):
    # the upper link of the ordering chain, reversed
    A, B = c.pd("A"), c.pd("B")
    return [P.leq("reversed", tsallis_rel_op_entropy(A, B, c.lam), P.rel_op_entropy(A, B), c.tol)]


def test_harness_reports_violations():
    spec = P.PropertySpec("reversed_chain", "S >= T (false)", P.SuiteConfig.positive_grid, False, _broken)
    rep = P.run_property(spec, replace(SMALL, samples=2))
    assert not rep.passed
    assert len(rep.failures) == rep.cases
    assert rep.worst_margin < -1e-3


def test_failures_replay_to_the_last_bit():
    # a zero tolerance turns round-off into reportable failures
    cfg = replace(SMALL, samples=4, eps_rel=1e-300, abs_tol=0.0)
    rep = P.run_property(P.get_property("homogeneity"), cfg)
    assert rep.failures
    for f in rep.failures[:5]:
        checks = P.replay_case("homogeneity", cfg, f.dim, f.lam, f.case_index)
        assert f.margin in [c.margin for c in checks if c.label == f.check]


def test_replay_tensor_failure_dimension():
    cfg = replace(SMALL, samples=1)
    checks = P.replay_case("tensor_equality", cfg, 6, 0.5, 0)
    direct = P.evaluate_case(P.get_property("tensor_equality"), cfg, (2, 3), 0.5, 0)
    assert [c.margin for c in checks] == [c.margin for c in direct]


# -- small closed-form cases behind the registered checks --

def test_homogeneity_alpha_one_is_identity():
    A, B = D([1.0, 2.0]), D([3.0, 0.5])
    assert tsallis_rel_op_entropy(1.0 * A, 1.0 * B, 0.5) == tsallis_rel_op_entropy(A, B, 0.5)


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.sampled_from(P.POSITIVE_GRID))
def test_one_by_one_two_sided_bounds(a, b, lam):
    t = a * ln_lambda_scalar(b / a, lam)
    scale = 1e-12 * max(a, b, a * a / b)
    assert a * (1 - a / b) <= t + scale
    assert t <= b - a + scale


def test_norm_bound_tight_at_scalar_B():
    A = ens.random_pd(ens.SeededGenerator(9), 3)
    cI = 2.5 * HermitianMatrix.identity(3)
    lhs = tsallis_rel_op_entropy(A, cI, 0.3)
    rhs = P.norm_bound_rhs(A, cI, 0.3)
    assert operator_norm(lhs - rhs) <= 1e-12 * operator_norm(A) * 10


def test_alpha_bounds_reduce_to_two_sided_at_alpha_one():
    g = ens.SeededGenerator(11)
    A, B = ens.random_pd(g.derive("A"), 3), ens.random_pd(g.derive("B"), 3)
    lo, hi = P.alpha_bounds(A, B, 0.4, 1.0)
    lo2, hi2 = P.sandwich_bounds(A, B)
    # the alpha = 1 bounds are A#B - A#_{l-1}B >= A - AB^{-1}A and B - A exactly
    assert operator_norm(hi - hi2) <= 1e-12 * operator_norm(B) * 10
    assert P.loewner_leq(lo2, lo).holds


def test_alpha_bounds_coincide_at_lambda_one():
    # both sides collapse to B - A for every pair, the reason separation is only tested below 1
    g = ens.SeededGenerator(12)
    A, B = ens.random_pd(g.derive("A"), 3), ens.random_pd(g.derive("B"), 3)
    for alpha in P.ALPHAS:
        lo, hi = P.alpha_bounds(A, B, 1.0, alpha)
        T = tsallis_rel_op_entropy(A, B, 1.0)
        assert operator_norm(hi - T) <= 1e-10 * operator_norm(B) * alpha
        assert operator_norm(lo - T) <= 1e-10 * operator_norm(B) * alpha


def test_furuta_bounds_tight_at_e():
    # upper side tight at B = eA, lower side at A = eB
    I = HermitianMatrix.identity(2)
    _, hi = P.furuta_bounds(I, math.e * I, math.e)
    assert operator_norm(P.rel_op_entropy(I, math.e * I) - I) <= 1e-15
    assert operator_norm(hi - I) <= 1e-15
    lo, _ = P.furuta_bounds(math.e * I, I, math.e)
    assert operator_norm(P.rel_op_entropy(math.e * I, I) + math.e * I) <= 1e-15
    assert operator_norm(lo + math.e * I) <= 1e-15


def test_maximally_mixed_pseudoadditivity_at_one():
    # S_1(I/2) = 1 each, so 1 + 1 + 1 = 3 = ln_1(4)
    from tsallis_ops.entropy import tsallis_entropy
    s = tsallis_entropy(P.maximally_mixed(2), 1.0)
    assert s == pytest.approx(1.0, rel=1e-15)
    assert tsallis_entropy(P.maximally_mixed(4), 1.0) == pytest.approx(3.0, rel=1e-15)


@pytest.mark.parametrize("name", ["homogeneity", "unitary_covariance", "tensor_equality"])
def test_equality_residual_scales_with_input(name):
    # relative residuals stay at round-off level when the inputs are scaled by 1e3
    spec = P.get_property(name)
    for c in (1.0, 1e3):
        cfg = replace(SMALL, samples=2)
        case = P._case(spec, cfg, (2, 3) if spec.tensor else 3, 0.5, 0)
        scaled = P.Case(case.gen, case.dim, case.lam, case.index, case.config)
        orig_pd = scaled.pd
        scaled.pd = lambda tag, dim=None, f=orig_pd: c * f(tag, dim)
        res = [ch for ch in spec.run_case(scaled) if ch.label.endswith("residual")]
        assert all(ch.margin >= -1e-11 for ch in res), (c, res)
