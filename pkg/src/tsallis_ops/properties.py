"""Registry of executable operator-inequality claims.

Each registered property draws inputs from :mod:`tsallis_ops.ensembles` for
every ``(dim, lambda, case_index)`` cell and returns a list of :class:`Check`
values.  A check carries a dimensionless margin; it passes when
``margin >= -tol``.  Loewner checks use ``witness / (||L|| v ||R|| + abs/rel)``
so the pass rule coincides with :func:`tsallis_ops.matrix.loewner_leq`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import ensembles as ens
from .entropy import (
    ln_lambda_op,
    ln_lambda_scalar,
    power_mean,
    rel_op_entropy,
    tsallis_entropy,
    tsallis_op_entropy,
    tsallis_rel_entropy,
    tsallis_rel_op_entropy,
    von_neumann_entropy,
)
from .matrix import (
    HermitianMatrix,
    TolerancePolicy,
    congruence,
    inverse,
    kron,
    loewner_leq,
    matrix_log,
    matrix_power,
    operator_norm,
    trace,
    unitary_conj,
)

POSITIVE_GRID = (0.1, 0.25, 0.5, 0.75, 1.0)
NEGATIVE_GRID = (-1.0, -0.5, -0.1)
LIMIT_GRID = (1e-2, 1e-4, 1e-6)
ALPHAS = (0.5, 1.0, 2.0, 10.0)
HOMOGENEITY_SCALES = (0.1, 1.0, 7.3)
MUS = (0.5, 1.0, 2.0)

TENSOR_TOL = 1e-9
SCALAR_EQ_TOL = 1e-10
TIGHT_TOL = 1e-10
SEPARATION = 1e-6
LIMIT_TOL = 1e-4


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    dims: tuple = (2, 3, 4, 6)
    tensor_dims: tuple = ((2, 2), (2, 3), (3, 3))
    samples: int = 200
    eps_rel: float = 1e-9
    abs_tol: float = 1e-12
    cond_targets: tuple = (10.0, 1e3)
    tensor_cond_targets: tuple = (10.0,)
    lambdas: tuple | None = None
    properties: tuple | None = None
    kron_max_dim: int = 81

    @property
    def tol(self) -> TolerancePolicy:
        return TolerancePolicy(rel=self.eps_rel, abs=self.abs_tol)

    def positive_grid(self) -> tuple:
        if self.lambdas is None:
            return POSITIVE_GRID
        return tuple(l for l in self.lambdas if 0 < l <= 1) or POSITIVE_GRID

    def negative_grid(self) -> tuple:
        if self.lambdas is None:
            return NEGATIVE_GRID
        return tuple(l for l in self.lambdas if l < 0) or NEGATIVE_GRID


@dataclass(frozen=True)
class Check:
    label: str
    margin: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tol


@dataclass
class Case:
    """Inputs shared by one property evaluation."""

    gen: ens.SeededGenerator
    dim: int | tuple
    lam: float
    index: int
    config: SuiteConfig

    @property
    def tol(self) -> TolerancePolicy:
        return self.config.tol

    def pick(self, seq: Sequence):
        return seq[self.index % len(seq)]

    @property
    def cond(self) -> float:
        targets = self.config.tensor_cond_targets if isinstance(self.dim, tuple) else self.config.cond_targets
        return targets[(self.index // 7) % len(targets)]

    def pd(self, tag, dim=None) -> HermitianMatrix:
        return ens.random_pd(self.gen.derive(tag), dim or self.dim, self.cond)

    def rng(self, tag) -> np.random.Generator:
        return self.gen.rng(tag)

    def kron(self, X, Y) -> HermitianMatrix:
        return kron(X, Y, self.config.kron_max_dim)


# -- check constructors --

def leq(label: str, L: HermitianMatrix, R: HermitianMatrix, tol: TolerancePolicy) -> Check:
    v = loewner_leq(L, R, tol)
    return Check(label, v.margin, tol.rel)


def geq(label, L, R, tol) -> Check:
    return leq(label, R, L, tol)


def relative_residual(L: HermitianMatrix, R: HermitianMatrix, scale: float = 0.0) -> float:
    """``||L - R||`` over the larger of ``||L||``, ``||R||`` and ``scale``."""
    scale = max(operator_norm(L), operator_norm(R), scale)
    return operator_norm(L - R) / scale if scale > 0 else 0.0


def equal(label: str, L, R, rel: float, tol: TolerancePolicy | None = None, scale: float = 0.0) -> list[Check]:
    """Residual-norm check plus, with ``tol``, the two one-sided Loewner checks.

    ``scale`` sets a floor for the residual denominator; tightness checks pass
    the input norms so that sides which are both zero are not divided by round-off.
    """
    out = [Check(f"{label}:residual", -relative_residual(L, R, scale), rel)]
    if tol is not None:
        out += [leq(f"{label}:leq", L, R, tol), leq(f"{label}:geq", R, L, tol)]
    return out


def scalar_equal(label: str, a: float, b: float, atol: float) -> Check:
    return Check(label, -abs(a - b), atol)


def scalar_leq(label: str, a: float, b: float, rel: float) -> Check:
    return Check(label, (b - a) / max(1.0, abs(a), abs(b)), rel)


def _T(A, B, lam):
    return tsallis_rel_op_entropy(A, B, lam)


# -- registry --

@dataclass(frozen=True)
class PropertySpec:
    name: str
    claim: str
    grid: Callable[[SuiteConfig], tuple]
    tensor: bool
    run_case: Callable[[Case], list[Check]]
    note: str = ""


PROPERTIES: dict[str, PropertySpec] = {}


def register(name: str, claim: str, grid=SuiteConfig.positive_grid, tensor: bool = False, note: str = ""):
    def deco(fn):
        PROPERTIES[name] = PropertySpec(name, claim, grid, tensor, fn, note)
        return fn
    return deco


SAMPLED_IFF = "sampled iff: equality inputs checked tight, separated inputs checked non-tight; 'only if' is not certified"


@register("homogeneity", "T(aA|aB) = a T(A|B)")
def check_homogeneity(c: Case) -> list[Check]:
    a = c.pick(HOMOGENEITY_SCALES)
    A, B = c.pd("A"), c.pd("B")
    return equal("homogeneity", _T(a * A, a * B, c.lam), a * _T(A, B, c.lam), c.tol.rel, c.tol)


@register("monotonicity_B", "B <= C implies T(A|B) <= T(A|C)")
def check_monotonicity_B(c: Case) -> list[Check]:
    A = c.pd("A")
    B, C = ens.random_ordered_pair(c.gen.derive("BC"), c.dim, cond_target=c.cond)
    return [leq("monotone", _T(A, B, c.lam), _T(A, C, c.lam), c.tol)]


@register("superadditivity", "T(A1+A2|B1+B2) >= T(A1|B1) + T(A2|B2)")
def check_superadditivity(c: Case) -> list[Check]:
    A1, A2, B1, B2 = (c.pd(t) for t in ("A1", "A2", "B1", "B2"))
    lhs = _T(A1, B1, c.lam) + _T(A2, B2, c.lam)
    return [leq("superadditive", lhs, _T(A1 + A2, B1 + B2, c.lam), c.tol)]


@register("joint_concavity", "T(aA1+bA2|aB1+bB2) >= a T(A1|B1) + b T(A2|B2), a+b=1")
def check_joint_concavity(c: Case) -> list[Check]:
    A1, A2, B1, B2 = (c.pd(t) for t in ("A1", "A2", "B1", "B2"))
    a = float(c.rng("weight").uniform())
    b = 1.0 - a
    lhs = a * _T(A1, B1, c.lam) + b * _T(A2, B2, c.lam)
    return [leq("concave", lhs, _T(a * A1 + b * A2, a * B1 + b * B2, c.lam), c.tol)]


@register("unitary_covariance", "T(UAU*|UBU*) = U T(A|B) U*")
def check_unitary_covariance(c: Case) -> list[Check]:
    A, B = c.pd("A"), c.pd("B")
    U = ens.random_unitary(c.gen.derive("U"), c.dim)
    lhs = _T(unitary_conj(A, U), unitary_conj(B, U), c.lam)
    return equal("covariance", lhs, unitary_conj(_T(A, B, c.lam), U), c.tol.rel, c.tol)


@register("map_monotonicity", "Phi(T(A|B)) <= T(Phi(A)|Phi(B)) for unital positive Phi")
def check_map_monotonicity(c: Case) -> list[Check]:
    A, B = c.pd("A"), c.pd("B")
    if c.index % 2 == 0:
        phi = ens.random_pinching(c.gen.derive("phi"), c.dim)
    else:
        phi = ens.random_unitary_mixture(c.gen.derive("phi"), c.dim, k=2 + c.index % 3)
    lhs = ens.apply_map(phi, _T(A, B, c.lam))
    rhs = _T(ens.apply_map(phi, A), ens.apply_map(phi, B), c.lam)
    return [leq(type(phi).__name__.lower(), lhs, rhs, c.tol)]


@register("ordering_chain", "T_{-l}(A|B) <= S(A|B) <= T_l(A|B)")
def check_ordering_chain(c: Case) -> list[Check]:
    A, B = c.pd("A"), c.pd("B")
    S = rel_op_entropy(A, B)
    return [leq("lower", _T(A, B, -c.lam), S, c.tol), leq("upper", S, _T(A, B, c.lam), c.tol)]


def norm_bound_rhs(A, B, lam) -> HermitianMatrix:
    return tsallis_op_entropy(A, lam) + ln_lambda_scalar(operator_norm(B), lam) * matrix_power(A, 1 - lam)


@register("norm_upper_bound", "T(A|B) <= H_l(A) + ln_l(||B||) A^{1-l}")
def check_norm_upper_bound(c: Case) -> list[Check]:
    A, B = c.pd("A"), c.pd("B")
    out = [leq("bound", _T(A, B, c.lam), norm_bound_rhs(A, B, c.lam), c.tol)]
    # B = cI saturates the bound
    cI = operator_norm(B) * HermitianMatrix.identity(c.dim)
    out += equal("tight_at_scalar_B", _T(A, cI, c.lam), norm_bound_rhs(A, cI, c.lam), TIGHT_TOL,
                 scale=max(operator_norm(A), operator_norm(B)))
    return out


@register("mu_lower_bound", "mu A <= B implies T(A|B) >= ln_l(mu) A")
def check_mu_lower_bound(c: Case) -> list[Check]:
    mu = c.pick(MUS)
    A = c.pd("A")
    B = mu * A + ens.random_psd(c.gen.derive("P"), c.dim, operator_norm(A))
    lower = ln_lambda_scalar(mu, c.lam) * A
    out = [leq("bound", lower, _T(A, B, c.lam), c.tol)]
    out += equal("tight_at_muA", _T(A, mu * A, c.lam), lower, TIGHT_TOL, scale=operator_norm(A))
    return out


def sandwich_bounds(A, B):
    """``A - A B^{-1} A`` and ``B - A``."""
    return A - congruence(inverse(B), A), B - A


@register("two_sided_bounds", "A - A B^{-1} A <= T(A|B) <= B - A; T(A|B) = 0 iff A = B", note=SAMPLED_IFF)
def check_two_sided_bounds(c: Case) -> list[Check]:
    A, B = c.pd("A"), c.pd("B")
    T = _T(A, B, c.lam)
    lo, hi = sandwich_bounds(A, B)
    out = [leq("lower", lo, T, c.tol), leq("upper", T, hi, c.tol)]
    out.append(Check("zero_at_A_eq_B", -operator_norm(_T(A, A, c.lam)) / operator_norm(A), TIGHT_TOL))
    scale = max(operator_norm(A), operator_norm(B))
    if operator_norm(A - B) >= 0.1 * operator_norm(A):
        out.append(Check("nonzero_when_separated", operator_norm(T) / scale - SEPARATION, 0.0))
    return out


def alpha_bounds(A, B, lam, alpha):
    """Lower and upper operator bounds on ``T_lam(A|B)`` indexed by ``alpha > 0``."""
    k = ln_lambda_scalar(1.0 / alpha, lam)
    pm = power_mean(A, B, lam)
    lower = pm - (1.0 / alpha) * power_mean(A, B, lam - 1.0) + k * A
    upper = (1.0 / alpha) * B - A - k * pm
    return lower, upper


@register("alpha_bounds", "power-mean bounds on T(A|B) for alpha > 0, tight at B = aA / A = aB", note=SAMPLED_IFF)
def check_alpha_bounds(c: Case) -> list[Check]:
    alpha = c.pick(ALPHAS)
    A, B = c.pd("A"), c.pd("B")
    T = _T(A, B, c.lam)
    lo, hi = alpha_bounds(A, B, c.lam, alpha)
    out = [leq("lower", lo, T, c.tol), leq("upper", T, hi, c.tol)]
    # right side tight at B = alpha A, left side tight at A = alpha B
    _, hi_eq = alpha_bounds(A, alpha * A, c.lam, alpha)
    out += equal("upper_tight", _T(A, alpha * A, c.lam), hi_eq, TIGHT_TOL,
                 scale=max(operator_norm(A), alpha * operator_norm(A)))
    lo_eq, _ = alpha_bounds(alpha * B, B, c.lam, alpha)
    out += equal("lower_tight", _T(alpha * B, B, c.lam), lo_eq, TIGHT_TOL,
                 scale=max(operator_norm(B), alpha * operator_norm(B)))
    scale = max(operator_norm(B), alpha * operator_norm(A))
    # at lam = 1 both bounds coincide with B - A for every pair, so only lam < 1 separates
    if c.lam < 1.0 and operator_norm(B - alpha * A) >= 0.1 * scale:
        gap = operator_norm(hi - T) / max(scale, operator_norm(T))
        out.append(Check("upper_not_tight_when_separated", gap - SEPARATION, 0.0))
    return out


def furuta_bounds(A, B, alpha):
    """The logarithmic (lam -> 0) version of :func:`alpha_bounds`."""
    la = math.log(alpha)
    AinvA = congruence(inverse(B), A)
    return (1 - la) * A - (1.0 / alpha) * AinvA, (la - 1) * A + (1.0 / alpha) * B


@register("limit_recovers_furuta", "alpha bounds tend to the log bounds on S(A|B) as l -> 0",
          grid=lambda cfg: (1e-6,))
def check_limit_recovers_furuta(c: Case) -> list[Check]:
    alpha = c.pick(ALPHAS + (math.e,))
    A, B = c.pd("A"), c.pd("B")
    S = rel_op_entropy(A, B)
    flo, fhi = furuta_bounds(A, B, alpha)
    lo, hi = alpha_bounds(A, B, c.lam, alpha)
    limit = TolerancePolicy(rel=LIMIT_TOL, abs=c.tol.abs)
    out = [leq("log_lower", flo, S, c.tol), leq("log_upper", S, fhi, c.tol)]
    out += [leq("lam_lower", lo, S, limit), leq("lam_upper", S, hi, limit)]
    out += equal("lower_converges", lo, flo, LIMIT_TOL)
    out += equal("upper_converges", hi, fhi, LIMIT_TOL)
    out += equal("T_converges", _T(A, B, c.lam), S, LIMIT_TOL)
    return out


def _factor_pair(c: Case, tag: str):
    d1, d2 = c.dim
    return c.pd(tag + "1", d1), c.pd(tag + "2", d2)


def tensor_rhs(T1, T2, A1, A2, lam, kr=kron) -> HermitianMatrix:
    return kr(T1, A2) + kr(A1, T2) + lam * kr(T1, T2)


@register("tensor_equality", "T(A1(x)A2|B1(x)B2) = T1(x)A2 + A1(x)T2 + l T1(x)T2", tensor=True)
def check_tensor_equality(c: Case) -> list[Check]:
    A1, A2 = _factor_pair(c, "A")
    B1, B2 = _factor_pair(c, "B")
    lhs = _T(c.kron(A1, A2), c.kron(B1, B2), c.lam)
    rhs = tensor_rhs(_T(A1, B1, c.lam), _T(A2, B2, c.lam), A1, A2, c.lam, c.kron)
    return equal("tensor", lhs, rhs, TENSOR_TOL, c.tol)


@register("lnlambda_tensor_identity", "ln_l(X(x)Y) = ln_l X(x)I + I(x)ln_l Y + l ln_l X(x)ln_l Y", tensor=True)
def check_lnlambda_tensor_identity(c: Case) -> list[Check]:
    X, Y = _factor_pair(c, "X")
    LX, LY = ln_lambda_op(X, c.lam), ln_lambda_op(Y, c.lam)
    IX, IY = HermitianMatrix.identity(X.dim), HermitianMatrix.identity(Y.dim)
    rhs = c.kron(LX, IY) + c.kron(IX, LY) + c.lam * c.kron(LX, LY)
    return equal("ln_tensor", ln_lambda_op(c.kron(X, Y), c.lam), rhs, TENSOR_TOL, c.tol)


@register("rel_entropy_tensor", "S(A1(x)A2|B1(x)B2) = S1(x)A2 + A1(x)S2, also as the l -> 0 limit",
          grid=lambda cfg: (0.0, 1e-6), tensor=True)
def check_rel_entropy_tensor(c: Case) -> list[Check]:
    A1, A2 = _factor_pair(c, "A")
    B1, B2 = _factor_pair(c, "B")
    rhs = c.kron(rel_op_entropy(A1, B1), A2) + c.kron(A1, rel_op_entropy(A2, B2))
    if c.lam == 0.0:
        out = equal("log_tensor", rel_op_entropy(c.kron(A1, A2), c.kron(B1, B2)), rhs, TENSOR_TOL, c.tol)
        IX, IY = HermitianMatrix.identity(A1.dim), HermitianMatrix.identity(A2.dim)
        log_rhs = c.kron(matrix_log(A1), IY) + c.kron(IX, matrix_log(A2))
        out += equal("log_identity", matrix_log(c.kron(A1, A2)), log_rhs, TENSOR_TOL)
        return out
    return equal("limit", _T(c.kron(A1, A2), c.kron(B1, B2), c.lam), rhs, LIMIT_TOL)


def maximally_mixed(d: int):
    from .entropy import DensityMatrix
    return DensityMatrix(np.eye(d) / d)


@register("pseudoadditivity_entropy", "S_l(r1(x)r2) = S_l(r1) + S_l(r2) + l S_l(r1) S_l(r2)",
          grid=lambda cfg: cfg.positive_grid() + (1e-6,), tensor=True)
def check_pseudoadditivity_entropy(c: Case) -> list[Check]:
    d1, d2 = c.dim
    if c.index == 0:
        r1, r2 = maximally_mixed(d1), maximally_mixed(d2)
    else:
        r1 = ens.random_density(c.gen.derive("r1"), d1)
        r2 = ens.random_density(c.gen.derive("r2"), d2)
    lam = c.lam
    s1, s2 = tsallis_entropy(r1, lam), tsallis_entropy(r2, lam)
    joint = tsallis_entropy(c.kron(r1, r2), lam)
    out = [scalar_equal("pseudoadditive", joint, s1 + s2 + lam * s1 * s2, SCALAR_EQ_TOL)]
    if c.index == 0:
        closed = ln_lambda_scalar(d1 * d2, lam)
        out.append(scalar_equal("maximally_mixed_closed_form", joint, closed, 1e-12))
    if lam == 1e-6:
        v1, v2 = von_neumann_entropy(r1), von_neumann_entropy(r2)
        out.append(scalar_equal("von_neumann_additive", von_neumann_entropy(c.kron(r1, r2)), v1 + v2, SCALAR_EQ_TOL))
        out.append(scalar_equal("limit_additive", joint, v1 + v2, LIMIT_TOL))
    return out


@register("pseudoadditivity_rel_entropy", "D_l(r1(x)r2|s1(x)s2) = D1 + D2 - l D1 D2", tensor=True)
def check_pseudoadditivity_rel_entropy(c: Case) -> list[Check]:
    d1, d2 = c.dim
    r1, s1 = (ens.random_density(c.gen.derive(t), d1) for t in ("r1", "s1"))
    r2, s2 = (ens.random_density(c.gen.derive(t), d2) for t in ("r2", "s2"))
    D1, D2 = tsallis_rel_entropy(r1, s1, c.lam), tsallis_rel_entropy(r2, s2, c.lam)
    joint = tsallis_rel_entropy(c.kron(r1, r2), c.kron(s1, s2), c.lam)
    return [scalar_equal("pseudoadditive", joint, D1 + D2 - c.lam * D1 * D2, SCALAR_EQ_TOL)]


@register("trace_inequality_gHP", "D_l(r|s) <= -Tr T_l(r|s), with equality when r, s commute")
def check_trace_inequality_gHP(c: Case) -> list[Check]:
    rho = ens.random_density(c.gen.derive("rho"), c.dim)
    sigma = ens.random_density(c.gen.derive("sigma"), c.dim)
    out = [scalar_leq("inequality", tsallis_rel_entropy(rho, sigma, c.lam),
                      -trace(_T(rho, sigma, c.lam)), c.tol.rel)]
    p, q = ens.random_commuting_densities(c.gen.derive("commuting"), c.dim)
    out.append(scalar_equal("commuting_equality", tsallis_rel_entropy(p, q, c.lam),
                            -trace(_T(p, q, c.lam)), SCALAR_EQ_TOL))
    return out


@register("sign_corollaries", "tensor super/subadditivity by sign of l and ordering of the pairs",
          grid=lambda cfg: cfg.positive_grid() + cfg.negative_grid(), tensor=True)
def check_sign_corollaries(c: Case) -> list[Check]:
    d1, d2 = c.dim
    lam, tol = c.lam, c.tol
    out = []
    for ordering in ("A<=B", "B<=A"):
        p1 = ens.random_ordered_pair(c.gen.derive(ordering, 1), d1, cond_target=c.cond)
        p2 = ens.random_ordered_pair(c.gen.derive(ordering, 2), d2, cond_target=c.cond)
        if ordering == "B<=A":
            p1, p2 = p1[::-1], p2[::-1]
        (A1, B1), (A2, B2) = p1, p2
        T1, T2 = _T(A1, B1, lam), _T(A2, B2, lam)
        joint = _T(c.kron(A1, A2), c.kron(B1, B2), lam)
        product = lam * c.kron(T1, T2)
        additive = c.kron(T1, A2) + c.kron(A1, T2)
        if ordering == "A<=B":
            out.append(geq("a", joint, product, tol))
            out.append(geq("b", joint, additive, tol) if lam > 0 else leq("b'", joint, additive, tol))
        else:
            out.append(leq("c", joint, product, tol))
            out.append(geq("d", joint, additive, tol) if lam > 0 else leq("d'", joint, additive, tol))
    # trace specialisation with B_i = I and A_i = densities
    r1 = ens.random_density(c.gen.derive("r1"), d1)
    r2 = ens.random_density(c.gen.derive("r2"), d2)
    joint = tsallis_entropy(c.kron(r1, r2), lam)
    parts = tsallis_entropy(r1, lam) + tsallis_entropy(r2, lam)
    if lam > 0:
        out.append(scalar_leq("entropy_superadditive", parts, joint, tol.rel))
    else:
        out.append(scalar_leq("entropy_subadditive", joint, parts, tol.rel))
    return out


# -- running --

@dataclass
class Failure:
    case_index: int
    lam: float
    dim: int
    margin: float
    check: str


@dataclass
class PropertyReport:
    property: str
    lambda_grid: list
    dims: list
    samples: int
    seed: int
    passed: bool
    worst_margin: float
    failures: list
    wall_ms: float
    cases: int = 0
    generation_failures: int = 0
    tolerance: float = 0.0
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "lambda_grid": list(self.lambda_grid),
            "dims": list(self.dims),
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "failures": [
                {"case_index": f.case_index, "lambda": f.lam, "dim": f.dim, "margin": f.margin, "check": f.check}
                for f in self.failures
            ],
            "wall_ms": self.wall_ms,
            "cases": self.cases,
            "generation_failures": self.generation_failures,
            "tolerance": self.tolerance,
            "note": self.note,
        }


def _dim_key(dim) -> int:
    return dim[0] * dim[1] if isinstance(dim, tuple) else dim


def _dims_for(spec: PropertySpec, config: SuiteConfig) -> tuple:
    return config.tensor_dims if spec.tensor else config.dims


def _case(spec: PropertySpec, config: SuiteConfig, dim, lam: float, index: int) -> Case:
    gen = ens.SeededGenerator(config.seed).derive(spec.name, _dim_key(dim), float(lam), index)
    return Case(gen, dim, lam, index, config)


def evaluate_case(spec: PropertySpec, config: SuiteConfig, dim, lam: float, index: int) -> list[Check]:
    return spec.run_case(_case(spec, config, dim, lam, index))


def replay_case(name: str, config: SuiteConfig, dim: int, lam: float, case_index: int) -> list[Check]:
    """Re-run one case from a failure record (``dim`` may be a tensor product dimension)."""
    spec = get_property(name)
    if spec.tensor:
        matches = [d for d in config.tensor_dims if _dim_key(d) == dim]
        if not matches:
            raise KeyError(f"no tensor factorisation with product {dim} in config")
        dim = matches[0]
    return evaluate_case(spec, config, dim, lam, case_index)


def get_property(name: str) -> PropertySpec:
    try:
        return PROPERTIES[name]
    except KeyError:
        raise KeyError(f"unknown property {name!r}; known: {', '.join(PROPERTIES)}") from None


def run_property(spec: PropertySpec, config: SuiteConfig) -> PropertyReport:
    t0 = time.perf_counter()
    grid = tuple(spec.grid(config))
    dims = _dims_for(spec, config)
    worst = math.inf
    failures: list[Failure] = []
    gen_failures = cases = 0
    for dim in dims:
        for lam in grid:
            for i in range(config.samples):
                try:
                    checks = evaluate_case(spec, config, dim, lam, i)
                except ens.GenerationError:
                    gen_failures += 1
                    continue
                except (ValueError, ArithmeticError, RuntimeError) as exc:
                    checks = [Check(f"error:{type(exc).__name__}", -math.inf, 0.0)]
                cases += 1
                for chk in checks:
                    worst = min(worst, chk.margin)
                    if not chk.passed:
                        failures.append(Failure(i, float(lam), _dim_key(dim), chk.margin, chk.label))
    return PropertyReport(
        property=spec.name,
        lambda_grid=[float(l) for l in grid],
        dims=[_dim_key(d) for d in dims],
        samples=config.samples,
        seed=config.seed,
        passed=not failures and gen_failures == 0,
        worst_margin=worst if cases else 0.0,
        failures=failures,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        cases=cases,
        generation_failures=gen_failures,
        tolerance=config.eps_rel,
        note=spec.note,
    )


def _run_named(name: str, config: SuiteConfig) -> PropertyReport:
    return run_property(get_property(name), config)


def run_all(config: SuiteConfig = SuiteConfig(), progress: Callable[[PropertyReport], None] | None = None,
            workers: int = 1) -> list[PropertyReport]:
    """Run the selected properties; with ``workers > 1`` they run in a process pool.

    Reports come back in registry order whatever the schedule.
    """
    names = config.properties or tuple(PROPERTIES)
    for n in names:
        get_property(n)
    if workers <= 1:
        reports = []
        for n in names:
            rep = _run_named(n, config)
            reports.append(rep)
            if progress:
                progress(rep)
        return reports
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_named, n, config) for n in names]
        reports = []
        for fut in futures:
            rep = fut.result()
            reports.append(rep)
            if progress:
                progress(rep)
    return reports
