"""Auxiliary verification suites that are not operator-pair properties.

* scalar deformed-log lemmas on a log grid,
* the Kronecker power identity ``(X (x) Y)^a = X^a (x) Y^a``,
* the rate at which ``T_lam(A|B)`` approaches ``S(A|B)``.

They report through :class:`~tsallis_ops.properties.PropertyReport` so the
CLI can serialise them like registry properties.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import ensembles as ens
from .entropy import RelativeSpectrum, ln_lambda
from .matrix import kron, matrix_power, operator_norm
from .properties import Failure, PropertyReport, SuiteConfig

SCALAR_ATOL = 1e-12
KRON_EXPONENTS = (-1.0, -0.5, 0.37, 2.0)
KRON_TOL = 1e-9
CONVERGENCE_LAMBDAS = (1e-2, 1e-4, 1e-6)
RATIO_FACTOR = 3.0


def log_grid(n: int = 200, lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def scalar_lemma_margins(x: np.ndarray, lam: float, alpha: float) -> dict[str, np.ndarray]:
    """Signed slack of every scalar inequality/identity; negative means violated."""
    ln = ln_lambda(x, lam)
    k = float(ln_lambda(1.0 / alpha, lam))
    xl = x ** lam
    # ln_lam(1/x) = -x^{-lam} ln_lam(x); ln_lam(x/y) = ln_lam(x) + x^lam ln_lam(1/y)
    recip = np.abs(ln_lambda(1.0 / x, lam) + x ** (-lam) * ln)
    quot = np.abs(ln_lambda(x / alpha, lam) - (ln + xl * k))
    scale = np.maximum(1.0, np.abs(ln))
    return {
        "lemma_lower": ln - (1.0 - 1.0 / x),
        "lemma_upper": (x - 1.0) - ln,
        "alpha_lower": ln - (xl * (1.0 - 1.0 / (alpha * x)) + k),
        "alpha_upper": (x / alpha - 1.0 - xl * k) - ln,
        "reciprocal_identity": -recip / scale,
        "quotient_identity": -quot / np.maximum(scale, np.abs(xl * k)),
    }


def alpha_equality_residuals(lam: float, alpha: float) -> tuple[float, float]:
    """Residuals of the alpha bounds at their equality points ``x = alpha`` and ``x = 1/alpha``."""
    k = float(ln_lambda(1.0 / alpha, lam))
    x = alpha
    upper = abs((x / alpha - 1.0 - x ** lam * k) - float(ln_lambda(x, lam)))
    x = 1.0 / alpha
    lower = abs(float(ln_lambda(x, lam)) - (x ** lam * (1.0 - 1.0 / (alpha * x)) + k))
    return upper, lower


def scalar_lemma_suite(config: SuiteConfig = SuiteConfig(), alphas=(0.5, 1.0, 2.0, 10.0)) -> PropertyReport:
    t0 = time.perf_counter()
    x = log_grid()
    grid = config.positive_grid()
    failures, worst, cases = [], math.inf, 0
    for lam in grid:
        for alpha in alphas:
            margins = scalar_lemma_margins(x, lam, alpha)
            up, lo = alpha_equality_residuals(lam, alpha)
            margins["alpha_upper_tight"] = np.array([-up])
            margins["alpha_lower_tight"] = np.array([-lo])
            for label, m in margins.items():
                cases += m.size
                worst = min(worst, float(m.min()))
                for i in np.flatnonzero(m < -SCALAR_ATOL):
                    failures.append(Failure(int(i), float(lam), 1, float(m[i]), f"{label}@alpha={alpha}"))
    return PropertyReport("scalar_lemmas", list(grid), [1], len(x), config.seed, not failures, worst,
                          failures, (time.perf_counter() - t0) * 1e3, cases, 0, SCALAR_ATOL,
                          "deterministic grid: x log-spaced over [1e-3, 1e3], 200 points")


def kron_power_residual(X, Y, a: float) -> float:
    lhs = matrix_power(kron(X, Y), a)
    rhs = kron(matrix_power(X, a), matrix_power(Y, a))
    return operator_norm(lhs - rhs) / operator_norm(lhs)


def kron_power_suite(config: SuiteConfig = SuiteConfig()) -> PropertyReport:
    t0 = time.perf_counter()
    failures, worst, cases = [], math.inf, 0
    root = ens.SeededGenerator(config.seed).derive("kron_power")
    for d1, d2 in config.tensor_dims:
        for a in KRON_EXPONENTS:
            for i in range(config.samples):
                g = root.derive(d1 * d2, a, i)
                cond = config.cond_targets[(i // 7) % len(config.cond_targets)]
                X = ens.random_pd(g.derive("X"), d1, cond)
                Y = ens.random_pd(g.derive("Y"), d2, cond)
                m = -kron_power_residual(X, Y, a)
                cases += 1
                worst = min(worst, m)
                if m < -KRON_TOL:
                    failures.append(Failure(i, a, d1 * d2, m, "kron_power"))
    return PropertyReport("kron_power", list(KRON_EXPONENTS), [d1 * d2 for d1, d2 in config.tensor_dims],
                          config.samples, config.seed, not failures, worst, failures,
                          (time.perf_counter() - t0) * 1e3, cases, 0, KRON_TOL,
                          "lambda_grid holds the exponents a")


def convergence_distances(A, B, lams=CONVERGENCE_LAMBDAS) -> np.ndarray:
    rs = RelativeSpectrum(A, B)
    S = rs.log()
    return np.array([operator_norm(rs.tsallis(l) - S) for l in lams])


def convergence_margin(dist: np.ndarray, lams=CONVERGENCE_LAMBDAS) -> float:
    """Worst log-ratio slack: 0 at the edge of the factor band, negative outside.

    ``C`` is taken from the first (largest) lambda; every ``d(lam)/lam`` must lie
    in ``[C / 3, 3 C]`` and the distances must decrease.
    """
    lams = np.asarray(lams)
    C = dist[0] / lams[0]
    if C == 0:
        return 0.0 if np.all(dist == 0) else -math.inf
    ratios = (dist / lams) / C
    band = math.log(RATIO_FACTOR) - np.abs(np.log(ratios))
    decreasing = np.all(np.diff(dist) < 0)
    return float(band.min()) if decreasing else -math.inf


def convergence_suite(config: SuiteConfig = SuiteConfig()) -> PropertyReport:
    t0 = time.perf_counter()
    failures, worst, cases = [], math.inf, 0
    root = ens.SeededGenerator(config.seed).derive("convergence")
    for dim in config.dims:
        for i in range(config.samples):
            g = root.derive(dim, i)
            cond = config.cond_targets[(i // 7) % len(config.cond_targets)]
            A = ens.random_pd(g.derive("A"), dim, cond)
            B = ens.random_pd(g.derive("B"), dim, cond)
            m = convergence_margin(convergence_distances(A, B))
            cases += 1
            worst = min(worst, m)
            if m < 0:
                failures.append(Failure(i, CONVERGENCE_LAMBDAS[-1], dim, m, "ratio_band"))
    return PropertyReport("convergence", list(CONVERGENCE_LAMBDAS), list(config.dims), config.samples,
                          config.seed, not failures, worst, failures, (time.perf_counter() - t0) * 1e3,
                          cases, 0, 0.0, "margin is log(3) - max|log(d(lam)/(C lam))|")


AUXILIARY = {
    "scalar_lemmas": scalar_lemma_suite,
    "kron_power": kron_power_suite,
    "convergence": convergence_suite,
}
