"""Deformed logarithms, power means and the Tsallis entropy family.

Conventions: ``ln_lam(x) = (x**lam - 1) / lam`` with ``lam = 0`` meaning the
natural log.  The same closed formula serves negative ``lam``.

Quotients by ``lam`` go through ``expm1(lam * log x) / lam`` whenever
``lam * log x`` is small, so the ``lam -> 0`` limit keeps its digits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .matrix import (
    DimensionMismatch,
    HermitianMatrix,
    NotPositiveDefinite,
    _assemble,
    classify,
    congruence,
    matrix_power,
    require_pd,
    spectral,
    trace,
)

DENSITY_TRACE_TOL = 1e-10


class Branch(enum.Enum):
    POSITIVE = "positive"        # 0 < lam <= 1
    NONPOSITIVE = "nonpositive"  # lam < 0, the extended definition
    LOG_LIMIT = "log_limit"      # lam == 0


@dataclass(frozen=True)
class Lambda:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v > 1.0:
            raise ValueError(f"lambda must be finite and <= 1, got {self.value}")
        object.__setattr__(self, "value", v)

    @property
    def branch(self) -> Branch:
        if self.value == 0.0:
            return Branch.LOG_LIMIT
        return Branch.POSITIVE if self.value > 0 else Branch.NONPOSITIVE

    def __float__(self):
        return self.value


def _lam(lam) -> float:
    return lam.value if isinstance(lam, Lambda) else float(lam)


@dataclass(frozen=True)
class AlphaParam:
    value: float

    def __post_init__(self):
        if not float(self.value) > 0:
            raise ValueError(f"alpha must be positive, got {self.value}")


class DensityMatrix(HermitianMatrix):
    """Positive definite Hermitian matrix with unit trace."""

    __slots__ = ()

    def __init__(self, entries, *, herm_tol: float | None = None):
        super().__init__(entries, herm_tol=herm_tol)
        self._validate()

    def _validate(self):
        t = trace(self)
        if abs(t - 1.0) > DENSITY_TRACE_TOL:
            raise ValueError(f"density matrix trace is {t!r}, expected 1")
        pos = classify(self)
        if not pos.is_pd:
            raise NotPositiveDefinite(pos.min_eig, pos.threshold, "density matrix")

    @classmethod
    def from_hermitian(cls, M: HermitianMatrix) -> "DensityMatrix":
        obj = cls.__new__(cls)
        obj._a = M.array
        obj._validate()
        return obj


def as_density(M) -> DensityMatrix:
    if isinstance(M, DensityMatrix):
        return M
    if isinstance(M, HermitianMatrix):
        return DensityMatrix.from_hermitian(M)
    return DensityMatrix(M)


# -- scalar deformed logarithm --

def ln_lambda(x, lam):
    """Vectorized deformed logarithm on positive reals."""
    lam = _lam(lam)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("ln_lambda needs x > 0")
    lx = np.log(x)
    if lam == 0.0:
        return lx
    return _ln_lam_from_log(x, lx, lam)


def _ln_lam_from_log(x, lx, lam):
    # expm1 where lam*log(x) is small, the direct power elsewhere (exact x - 1 at lam = 1)
    t = lam * lx
    small = np.abs(t) < 0.5
    with np.errstate(over="ignore"):
        direct = (np.power(x, lam) - 1.0) / lam
    return np.where(small, np.expm1(t) / lam, direct)


def ln_lambda_scalar(x: float, lam) -> float:
    if not x > 0:
        raise ValueError(f"ln_lambda needs x > 0, got {x}")
    lam = _lam(lam)
    lx = math.log(x)
    if lam == 0.0:
        return lx
    if abs(lam * lx) < 0.5:
        return math.expm1(lam * lx) / lam
    return (x ** lam - 1.0) / lam


# -- operator level --

def ln_lambda_op(X: HermitianMatrix, lam) -> HermitianMatrix:
    sd = require_pd(X, "argument of ln_lambda")
    return _assemble(sd.eigenvectors, ln_lambda(sd.eigenvalues, lam))


class RelativeSpectrum:
    """Shared work for functions of the pair ``(A, B)``.

    Holds ``A^{1/2}`` and the eigen-decomposition of ``A^{-1/2} B A^{-1/2}``;
    every ``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` is then one assembly.
    """

    __slots__ = ("half", "vectors", "values")

    def __init__(self, A: HermitianMatrix, B: HermitianMatrix):
        if A.dim != B.dim:
            raise DimensionMismatch(f"operands differ in dimension: {A.dim} vs {B.dim}")
        sa = require_pd(A, "first operand")
        r = np.sqrt(sa.eigenvalues)
        v = sa.eigenvectors
        self.half = _assemble(v, r)
        inner = congruence(B, _assemble(v, 1.0 / r))
        si = spectral(inner)
        # inner is congruent to B, so it is PD exactly when B is
        pos = classify(inner, si)
        if not pos.is_pd:
            raise NotPositiveDefinite(pos.min_eig, pos.threshold, "second operand")
        self.vectors = si.eigenvectors
        self.values = si.eigenvalues

    def apply(self, f) -> HermitianMatrix:
        return congruence(_assemble(self.vectors, f(self.values)), self.half)

    def power_mean(self, lam) -> HermitianMatrix:
        lam = _lam(lam)
        return self.apply(lambda w: w ** lam)

    def log(self) -> HermitianMatrix:
        return self.apply(np.log)

    def tsallis(self, lam) -> HermitianMatrix:
        lam = _lam(lam)
        if lam == 0.0:
            return self.log()
        return self.apply(lambda w: _ln_lam_from_log(w, np.log(w), lam))


def power_mean(A: HermitianMatrix, B: HermitianMatrix, lam) -> HermitianMatrix:
    """``A #_lam B = A^{1/2} (A^{-1/2} B A^{-1/2})^lam A^{1/2}`` for any real ``lam``."""
    return RelativeSpectrum(A, B).power_mean(lam)


def rel_op_entropy(A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    """Relative operator entropy ``A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}``."""
    return RelativeSpectrum(A, B).log()


def tsallis_rel_op_entropy(A: HermitianMatrix, B: HermitianMatrix, lam) -> HermitianMatrix:
    """``(A #_lam B - A) / lam``; ``lam = 0`` gives :func:`rel_op_entropy`.

    Computed as ``A^{1/2} ln_lam(A^{-1/2} B A^{-1/2}) A^{1/2}``, which is the
    same operator without the subtraction.
    """
    return RelativeSpectrum(A, B).tsallis(lam)


def operator_entropy(A: HermitianMatrix) -> HermitianMatrix:
    sd = require_pd(A)
    w = sd.eigenvalues
    return _assemble(sd.eigenvectors, -w * np.log(w))


def _tsallis_eig(w: np.ndarray, lam: float) -> np.ndarray:
    # (w^{1-lam} - w) / lam
    return w * np.expm1(-lam * np.log(w)) / lam


def tsallis_op_entropy(A: HermitianMatrix, lam) -> HermitianMatrix:
    """``H_lam(A) = (A^{1-lam} - A) / lam``; ``lam = 0`` gives ``-A log A``."""
    lam = _lam(lam)
    if lam == 0.0:
        return operator_entropy(A)
    sd = require_pd(A)
    return _assemble(sd.eigenvectors, _tsallis_eig(sd.eigenvalues, lam))


# -- trace level --

def _density_spectrum(rho) -> tuple[np.ndarray, np.ndarray]:
    rho = as_density(rho)
    sd = spectral(rho)
    return sd.eigenvalues, sd.eigenvectors


def tsallis_entropy(rho, lam) -> float:
    """``(Tr[rho^{1-lam}] - 1) / lam``; ``lam = 0`` gives the von Neumann entropy."""
    lam = _lam(lam)
    if lam == 0.0:
        return von_neumann_entropy(rho)
    w, _ = _density_spectrum(rho)
    # Tr[H_lam(rho)]: the unit trace is used exactly, otherwise its last-bit
    # error would be divided by lam
    return float(np.sum(_tsallis_eig(w, lam)))


def von_neumann_entropy(rho) -> float:
    w, _ = _density_spectrum(rho)
    return float(-np.sum(w * np.log(w)))


def _overlaps(rho, sigma):
    p, u = _density_spectrum(rho)
    q, v = _density_spectrum(sigma)
    if p.shape != q.shape:
        raise DimensionMismatch("density matrices differ in dimension")
    # |<u_i|v_j>|^2, rows sum to 1
    ov = np.abs(u.conj().T @ v) ** 2
    return p, q, ov


def tsallis_rel_entropy(rho, sigma, lam) -> float:
    """``(1 - Tr[rho^{1-lam} sigma^lam]) / lam`` for ``0 < lam <= 1``.

    ``lam = 0`` gives :func:`umegaki_rel_entropy`.  Evaluated in the two
    eigenbases: ``Tr[rho^{1-lam} sigma^lam] = sum_ij p_i (q_j/p_i)^lam |<u_i|v_j>|^2``.
    """
    lam = _lam(lam)
    if lam == 0.0:
        return umegaki_rel_entropy(rho, sigma)
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"Tsallis relative entropy is defined for 0 < lam <= 1, got {lam}")
    p, q, ov = _overlaps(rho, sigma)
    ratio = q[None, :] / p[:, None]
    # with Tr rho = 1 taken exactly: D = -sum_ij p_i ln_lam(q_j/p_i) |<u_i|v_j>|^2
    return float(-np.sum(p[:, None] * ov * np.expm1(lam * np.log(ratio))) / lam)


def umegaki_rel_entropy(rho, sigma) -> float:
    """``Tr[rho (log rho - log sigma)]``."""
    p, q, ov = _overlaps(rho, sigma)
    return float(np.sum(p * np.log(p)) - np.sum(p[:, None] * ov * np.log(q)[None, :]))


def tsallis_rel_entropy_direct(rho, sigma, lam) -> float:
    """Literal ``(1 - Tr[rho^{1-lam} sigma^lam]) / lam`` through matrix powers.

    Kept as a second route for tests; loses digits when ``lam`` is tiny.
    """
    lam = _lam(lam)
    rho, sigma = as_density(rho), as_density(sigma)
    prod = matrix_power(rho, 1.0 - lam).array @ matrix_power(sigma, lam).array
    t = complex(np.trace(prod))
    if abs(t.imag) > 1e-12 * max(1.0, abs(t.real)):
        raise ValueError(f"trace has imaginary residue {t.imag:.3e}")
    return (1.0 - t.real) / lam
