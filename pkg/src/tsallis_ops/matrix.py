"""Finite-dimensional Hermitian linear algebra.

Every matrix function in the package goes through :func:`spectral` and
:func:`apply_spectral`: ``f(M) = V diag(f(w)) V*``.  Logarithms are natural.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

KRON_MAX_DIM = 64
HERMITIAN_RTOL = 1e-12
PD_RTOL = 1e-10


class NotPositiveDefinite(ValueError):
    def __init__(self, min_eig: float, threshold: float, what: str = "matrix"):
        self.min_eig = min_eig
        self.threshold = threshold
        self.what = what
        super().__init__(
            f"{what} is not positive definite: min eigenvalue {min_eig:.3e} "
            f"<= threshold {threshold:.3e}"
        )


class DimensionMismatch(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class KroneckerOverflow(ValueError):
    pass


class EigensolverError(RuntimeError):
    def __init__(self, dim: int, cond: float, cause: Exception | None = None):
        self.dim = dim
        self.cond = cond
        super().__init__(
            f"eigensolver failed on {dim}x{dim} matrix (condition estimate {cond:.3e}): {cause}"
        )


class HermitianMatrix:
    """Immutable square complex matrix with exact Hermitian symmetry.

    The input is checked against ``HERMITIAN_RTOL * max|entry|`` (or ``herm_tol``
    if given) and then replaced by ``(M + M*)/2``.
    """

    __slots__ = ("_a",)

    def __init__(self, entries, *, herm_tol: float | None = None):
        a = np.array(entries, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        scale = float(np.max(np.abs(a)))
        rtol = HERMITIAN_RTOL if herm_tol is None else herm_tol
        asym = float(np.max(np.abs(a - a.conj().T)))
        if asym > rtol * scale:
            raise NotHermitian(f"asymmetry {asym:.3e} exceeds {rtol:.1e} * {scale:.3e}")
        a = 0.5 * (a + a.conj().T)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "HermitianMatrix":
        # internal path for results that are Hermitian by construction
        obj = cls.__new__(cls)
        a = 0.5 * (a + a.conj().T)
        a.flags.writeable = False
        obj._a = a
        return obj

    @classmethod
    def _wrap_exact(cls, a: np.ndarray) -> "HermitianMatrix":
        # sums, real multiples and Kronecker products of exactly Hermitian arrays stay exact
        obj = cls.__new__(cls)
        a.flags.writeable = False
        obj._a = a
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls._wrap(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls._wrap(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        return cls._wrap(np.diag(np.asarray(values, dtype=float)).astype(complex))

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def _check(self, other: "HermitianMatrix"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check(other)
        return HermitianMatrix._wrap_exact(self._a + other._a)

    def __sub__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        self._check(other)
        return HermitianMatrix._wrap_exact(self._a - other._a)

    def __neg__(self):
        return HermitianMatrix._wrap_exact(-self._a)

    def __mul__(self, c):
        if isinstance(c, HermitianMatrix) or np.iscomplexobj(c):
            return NotImplemented
        return HermitianMatrix._wrap_exact(float(c) * self._a)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return HermitianMatrix._wrap_exact(self._a / float(c))

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and np.array_equal(self._a, other._a)

    __hash__ = None

    def allclose(self, other: "HermitianMatrix", rtol: float = 1e-10, atol: float = 1e-12) -> bool:
        self._check(other)
        scale = max(operator_norm(self), operator_norm(other))
        return float(np.max(np.abs(self._a - other._a))) <= atol + rtol * scale

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim}, {np.array2string(self._a, precision=4)})"


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> HermitianMatrix:
        return _assemble(self.eigenvectors, self.eigenvalues)


class PositivityKind(enum.Enum):
    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class PositivityClass:
    kind: PositivityKind
    min_eig: float
    threshold: float

    @property
    def is_pd(self) -> bool:
        return self.kind is PositivityKind.POSITIVE_DEFINITE


@dataclass(frozen=True)
class TolerancePolicy:
    """Absolute floor plus a term relative to the larger operator norm."""

    rel: float = 1e-9
    abs: float = 1e-12

    def bound(self, *norms: float) -> float:
        return self.abs + self.rel * max(norms, default=0.0)


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class LoewnerVerdict:
    holds: bool
    witness_min_eig: float
    tolerance_used: float
    scale: float = 0.0

    @property
    def margin(self) -> float:
        """Witness divided by ``scale + abs/rel``; ``holds`` iff margin >= -rel."""
        return self.witness_min_eig / self.scale if self.scale > 0 else self.witness_min_eig


def _as_array(M) -> np.ndarray:
    return M.array if isinstance(M, HermitianMatrix) else np.asarray(M, dtype=complex)


def _condition_estimate(a: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(a))
    except Exception:
        return float("inf")


def spectral(M: HermitianMatrix) -> SpectralDecomposition:
    a = _as_array(M)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(a.shape[0], _condition_estimate(a), exc) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverError(a.shape[0], _condition_estimate(a), ValueError("non-finite eigenvalues"))
    return SpectralDecomposition(w, v)


def _assemble(v: np.ndarray, fw: np.ndarray) -> HermitianMatrix:
    return HermitianMatrix._wrap((v * fw) @ v.conj().T)


def pd_threshold(norm: float) -> float:
    return PD_RTOL * max(1.0, norm)


def classify(M: HermitianMatrix, sd: SpectralDecomposition | None = None) -> PositivityClass:
    sd = sd or spectral(M)
    w = sd.eigenvalues
    lo = float(w[0])
    thr = pd_threshold(float(np.max(np.abs(w))))
    if lo > thr:
        kind = PositivityKind.POSITIVE_DEFINITE
    elif lo >= -thr:
        kind = PositivityKind.POSITIVE_SEMIDEFINITE
    else:
        kind = PositivityKind.INDEFINITE
    return PositivityClass(kind, lo, thr)


def require_pd(M: HermitianMatrix, what: str = "matrix") -> SpectralDecomposition:
    """Spectral decomposition of ``M``, raising NotPositiveDefinite when it is not PD."""
    sd = spectral(M)
    pos = classify(M, sd)
    if not pos.is_pd:
        raise NotPositiveDefinite(pos.min_eig, pos.threshold, what)
    return sd


def apply_spectral(M: HermitianMatrix, f: Callable[[np.ndarray], np.ndarray],
                   sd: SpectralDecomposition | None = None) -> HermitianMatrix:
    sd = sd or spectral(M)
    return _assemble(sd.eigenvectors, f(sd.eigenvalues))


def matrix_power(M: HermitianMatrix, a: float, sd: SpectralDecomposition | None = None) -> HermitianMatrix:
    a = float(a)
    if a == 0.0:
        return HermitianMatrix.identity(M.dim)
    if a == 1.0:
        return M
    sd = sd or spectral(M)
    pos = classify(M, sd)
    if a.is_integer() and a >= 1:
        if pos.kind is PositivityKind.INDEFINITE:
            raise NotPositiveDefinite(pos.min_eig, pos.threshold, "base of integer power")
        w = np.clip(sd.eigenvalues, 0.0, None)
    else:
        if not pos.is_pd:
            raise NotPositiveDefinite(pos.min_eig, pos.threshold, f"base of power {a}")
        w = sd.eigenvalues
    return _assemble(sd.eigenvectors, w ** a)


def matrix_log(M: HermitianMatrix, sd: SpectralDecomposition | None = None) -> HermitianMatrix:
    if sd is None:
        sd = require_pd(M, "argument of log")
    else:
        pos = classify(M, sd)
        if not pos.is_pd:
            raise NotPositiveDefinite(pos.min_eig, pos.threshold, "argument of log")
    return _assemble(sd.eigenvectors, np.log(sd.eigenvalues))


def matrix_exp(M: HermitianMatrix) -> HermitianMatrix:
    return apply_spectral(M, np.exp)


def kron(X: HermitianMatrix, Y: HermitianMatrix, max_dim: int = KRON_MAX_DIM) -> HermitianMatrix:
    n = X.dim * Y.dim
    if n > max_dim:
        raise KroneckerOverflow(f"kron dimension {X.dim}*{Y.dim}={n} exceeds cap {max_dim}")
    x, y = X.array, Y.array
    return HermitianMatrix._wrap_exact((x[:, None, :, None] * y[None, :, None, :]).reshape(n, n))


def congruence(M: HermitianMatrix, C: HermitianMatrix) -> HermitianMatrix:
    """``C M C`` for Hermitian ``C``."""
    if M.dim != C.dim:
        raise DimensionMismatch(f"congruence of {M.dim}x{M.dim} by {C.dim}x{C.dim}")
    c = C.array
    return HermitianMatrix._wrap(c @ M.array @ c)


def operator_norm(M: HermitianMatrix) -> float:
    w = np.linalg.eigvalsh(_as_array(M))
    return float(max(abs(w[0]), abs(w[-1])))


def trace(M) -> float:
    t = complex(np.trace(_as_array(M)))
    scale = float(np.max(np.abs(_as_array(M)))) * _as_array(M).shape[0]
    if abs(t.imag) > 1e-12 * max(scale, 1.0):
        raise NotHermitian(f"trace has imaginary residue {t.imag:.3e}")
    return t.real


def min_eigenvalue(M: HermitianMatrix) -> float:
    return float(np.linalg.eigvalsh(_as_array(M))[0])


def loewner_leq(L: HermitianMatrix, R: HermitianMatrix, tol: TolerancePolicy = DEFAULT_TOL,
                scale: float = 0.0) -> LoewnerVerdict:
    """Decide ``L <= R`` from the smallest eigenvalue of ``R - L``.

    The relative tolerance multiplies ``max(||L||, ||R||, scale)``; a positive
    ``scale`` keeps comparisons of near-zero sides from shrinking to ``tol.abs``.
    """
    if L.dim != R.dim:
        raise DimensionMismatch(f"cannot compare {L.dim}x{L.dim} with {R.dim}x{R.dim}")
    w = np.linalg.eigvalsh(np.stack([R.array - L.array, L.array, R.array]))
    witness = float(w[0, 0])
    norm = max(float(np.max(np.abs(w[1:, [0, -1]]))), scale)
    bound = tol.bound(norm)
    scale = norm + (tol.abs / tol.rel if tol.rel > 0 else 0.0)
    return LoewnerVerdict(witness >= -bound, witness, bound, scale)


def is_unitary(U: np.ndarray, atol: float = 1e-10) -> bool:
    U = np.asarray(U)
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= atol)


# -- JSON matrix format: {"dim": n, "entries": [[re, im], ...]} row-major --

def matrix_to_json(M: HermitianMatrix) -> dict:
    flat = M.array.reshape(-1)
    return {"dim": M.dim, "entries": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(obj: Mapping) -> HermitianMatrix:
    try:
        n = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix object needs 'dim' and 'entries': {exc}") from exc
    if n < 1 or len(entries) != n * n:
        raise DimensionMismatch(f"expected {n * n} entries for dim {n}, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return HermitianMatrix(flat.reshape(n, n))


def load_matrices(path) -> dict[str, HermitianMatrix]:
    """Read a file mapping names to matrix objects (or a single bare matrix named ``A``)."""
    with open(path) as fh:
        obj = json.load(fh)
    if "dim" in obj and "entries" in obj:
        return {"A": matrix_from_json(obj)}
    return {name: matrix_from_json(m) for name, m in obj.items()}


def dump_matrices(mats: Mapping[str, HermitianMatrix], path) -> None:
    with open(path, "w") as fh:
        json.dump({k: matrix_to_json(v) for k, v in mats.items()}, fh, indent=1)


def unitary_conj(M: HermitianMatrix, U: np.ndarray) -> HermitianMatrix:
    """``U M U*``."""
    U = np.asarray(U)
    if U.shape != (M.dim, M.dim):
        raise DimensionMismatch(f"unitary of shape {U.shape} against dim {M.dim}")
    return HermitianMatrix._wrap(U @ M.array @ U.conj().T)


def inverse(M: HermitianMatrix) -> HermitianMatrix:
    return matrix_power(M, -1.0)
