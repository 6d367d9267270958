from dataclasses import replace

import numpy as np
import pytest

from tsallis_ops import ensembles as ens
from tsallis_ops import suites
from tsallis_ops.entropy import ln_lambda, ln_lambda_scalar
from tsallis_ops.properties import SuiteConfig

SMALL = SuiteConfig(samples=3, dims=(2, 3), tensor_dims=((2, 2), (2, 3)))


def test_log_grid():
    x = suites.log_grid()
    assert len(x) == 200 and x[0] == pytest.approx(1e-3) and x[-1] == pytest.approx(1e3)


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_scalar_margins_nonnegative_beyond_rounding(lam, alpha):
    m = suites.scalar_lemma_margins(suites.log_grid(), lam, alpha)
    for label, v in m.items():
        assert v.min() >= -1e-12, label


def test_alpha_equality_points():
    for lam in (0.25, 0.75):
        up, lo = suites.alpha_equality_residuals(lam, 2.0)
        assert up <= 1e-14 and lo <= 1e-14


def test_reciprocal_and_quotient_identities():
    x, y, lam = 3.7, 0.42, 0.3
    assert ln_lambda_scalar(1 / x, lam) == pytest.approx(-x ** -lam * ln_lambda_scalar(x, lam), rel=1e-14)
    rhs = ln_lambda_scalar(x, lam) + x ** lam * ln_lambda_scalar(1 / y, lam)
    assert ln_lambda_scalar(x / y, lam) == pytest.approx(rhs, rel=1e-14)


def test_violated_lemma_is_detected():
    # shifting the deformed log by 1e-9 breaks the upper bound at x = 1
    x = np.array([1.0])
    assert (x - 1.0) - (ln_lambda(x, 0.5) + 1e-9) < -1e-12


@pytest.mark.parametrize("name", list(suites.AUXILIARY))
def test_auxiliary_suites_pass(name):
    rep = suites.AUXILIARY[name](SMALL)
    assert rep.passed, rep.failures[:3]
    assert rep.property == name


def test_convergence_margin_band():
    lams = (1e-2, 1e-4, 1e-6)
    assert suites.convergence_margin(np.array([1e-2, 1e-4, 1e-6]), lams) == pytest.approx(np.log(3))
    assert suites.convergence_margin(np.array([1e-2, 1e-3, 1e-6]), lams) < 0      # ratio 10 at 1e-4
    assert suites.convergence_margin(np.array([1e-2, 2e-2, 1e-6]), lams) == -np.inf  # not decreasing


def test_convergence_distances_shrink():
    g = ens.SeededGenerator(3)
    A, B = ens.random_pd(g.derive("A"), 4), ens.random_pd(g.derive("B"), 4)
    d = suites.convergence_distances(A, B)
    assert d[0] > d[1] > d[2] > 0


def test_kron_power_reports_exponents():
    rep = suites.kron_power_suite(replace(SMALL, samples=1))
    assert rep.lambda_grid == list(suites.KRON_EXPONENTS)
    assert rep.worst_margin >= -suites.KRON_TOL
