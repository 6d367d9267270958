"""Seeded random ensembles of the inputs the operator claims quantify over."""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from .entropy import DensityMatrix
from .matrix import (
    DimensionMismatch,
    HermitianMatrix,
    _assemble,
    classify,
    is_unitary,
    loewner_leq,
    min_eigenvalue,
    operator_norm,
)

MAX_DIM = 16


class GenerationError(RuntimeError):
    """A generated object failed its own post-check."""


def _key_to_int(part) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)) and part >= 0:
        return int(part)
    if isinstance(part, (float, np.floating)):
        raw = struct.pack("<d", float(part))
    else:
        raw = str(part).encode()
    return int.from_bytes(hashlib.sha256(raw).digest()[:8], "little")


@dataclass(frozen=True)
class SeededGenerator:
    """Value-semantic RNG factory keyed by ``(master_seed, *path)``.

    ``derive`` appends to the path; ``rng`` builds a fresh numpy Generator for
    the current path, so the same key gives the same stream in any order.
    """

    master_seed: int
    path: tuple = ()
    _spawn: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._spawn is None:
            object.__setattr__(self, "_spawn", tuple(_key_to_int(k) for k in self.path))

    def derive(self, *key) -> "SeededGenerator":
        spawn = self._spawn + tuple(_key_to_int(k) for k in key)
        return SeededGenerator(self.master_seed, self.path + key, spawn)

    def rng(self, *key) -> np.random.Generator:
        spawn = self._spawn + tuple(_key_to_int(k) for k in key)
        ss = np.random.SeedSequence(self.master_seed & (2**64 - 1), spawn_key=spawn)
        return np.random.default_rng(ss)


def _check_dim(dim: int):
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dim must be in [1, {MAX_DIM}], got {dim}")


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unitary(gen: SeededGenerator, dim: int) -> np.ndarray:
    _check_dim(dim)
    u = haar_unitary(gen.rng("unitary"), dim)
    if not is_unitary(u):
        raise GenerationError("unitary post-check failed")
    return u


def _log_uniform_spectrum(rng: np.random.Generator, dim: int, cond_target: float) -> np.ndarray:
    # endpoints pinned so the condition number is exactly cond_target (dim >= 2)
    span = np.log(cond_target)
    t = rng.uniform(0.0, 1.0, size=dim)
    if dim >= 2:
        t[0], t[1] = 0.0, 1.0
    scale = np.exp(rng.uniform(np.log(0.5), np.log(2.0)))
    return np.sort(scale * np.exp(span * t))


def random_pd(gen: SeededGenerator, dim: int, cond_target: float = 10.0) -> HermitianMatrix:
    _check_dim(dim)
    if cond_target < 1:
        raise ValueError("cond_target must be >= 1")
    rng = gen.rng("pd")
    w = _log_uniform_spectrum(rng, dim, cond_target)
    M = _assemble(haar_unitary(rng, dim), w)
    pos = classify(M)
    if not pos.is_pd:
        raise GenerationError(f"random_pd produced min eigenvalue {pos.min_eig:.3e}")
    return M


def random_psd(gen: SeededGenerator, dim: int, scale: float = 1.0) -> HermitianMatrix:
    """Wishart-like PSD matrix of random rank with operator norm about ``scale``."""
    rng = gen.rng("psd")
    rank = int(rng.integers(1, dim + 1))
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    p = g @ g.conj().T
    p *= scale / max(np.linalg.eigvalsh(p)[-1], 1e-300)
    return HermitianMatrix._wrap(p)


def random_ordered_pair(gen: SeededGenerator, dim: int, gap: float = 0.0,
                        cond_target: float = 10.0, spread: float = 1.0):
    """``(A, B)`` with ``B = A + gap I + P`` and ``P`` PSD of norm ``spread * ||A||``."""
    A = random_pd(gen.derive("A"), dim, cond_target)
    B = A + gap * HermitianMatrix.identity(dim)
    if spread > 0:
        B = B + random_psd(gen.derive("P"), dim, spread * operator_norm(A))
    v = loewner_leq(A, B)
    if not v.holds:
        raise GenerationError(f"ordered pair post-check failed, witness {v.witness_min_eig:.3e}")
    return A, B


def random_commuting_pair(gen: SeededGenerator, dim: int, cond_target: float = 10.0):
    _check_dim(dim)
    rng = gen.rng("commuting")
    v = haar_unitary(rng, dim)
    A = _assemble(v, _log_uniform_spectrum(rng, dim, cond_target))
    B = _assemble(v, _log_uniform_spectrum(rng, dim, cond_target))
    comm = A.array @ B.array - B.array @ A.array
    if np.linalg.norm(comm, 2) > 1e-10 * operator_norm(A) * operator_norm(B):
        raise GenerationError("commuting pair post-check failed")
    return A, B


def _density_spectrum(rng: np.random.Generator, dim: int, min_eig: float) -> np.ndarray:
    p = rng.dirichlet(np.ones(dim))
    return min_eig + (1.0 - dim * min_eig) * p


def _finish_density(v: np.ndarray, w: np.ndarray, min_eig: float) -> DensityMatrix:
    M = _assemble(v, w)
    M = M / float(np.trace(M.array).real)
    rho = DensityMatrix.from_hermitian(M)
    if min_eigenvalue(rho) < min_eig * (1 - 1e-9):
        raise GenerationError("density min eigenvalue post-check failed")
    return rho


def random_density(gen: SeededGenerator, dim: int, min_eig: float | None = None) -> DensityMatrix:
    _check_dim(dim)
    if min_eig is None:
        min_eig = 0.01 / dim
    if not 0 < min_eig < 1.0 / dim and dim > 1:
        raise ValueError(f"min_eig must lie in (0, 1/dim), got {min_eig}")
    if dim == 1:
        return DensityMatrix([[1.0]])
    rng = gen.rng("density")
    return _finish_density(haar_unitary(rng, dim), _density_spectrum(rng, dim, min_eig), min_eig)


def random_commuting_densities(gen: SeededGenerator, dim: int, min_eig: float | None = None):
    _check_dim(dim)
    if min_eig is None:
        min_eig = 0.01 / dim
    if dim == 1:
        return DensityMatrix([[1.0]]), DensityMatrix([[1.0]])
    rng = gen.rng("commuting-density")
    v = haar_unitary(rng, dim)
    return (_finish_density(v, _density_spectrum(rng, dim, min_eig), min_eig),
            _finish_density(v, _density_spectrum(rng, dim, min_eig), min_eig))


# -- unital positive maps --

@dataclass(frozen=True)
class Pinching:
    block_sizes: tuple

    def __post_init__(self):
        if any(b < 1 for b in self.block_sizes):
            raise ValueError("pinching blocks must be non-empty")

    @property
    def dim(self) -> int:
        return sum(self.block_sizes)


@dataclass(frozen=True)
class UnitaryMixture:
    weights: tuple
    unitaries: tuple = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.unitaries) or not self.unitaries:
            raise ValueError("need one weight per unitary")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")
        for u in self.unitaries:
            if not is_unitary(u):
                raise ValueError("mixture component is not unitary")

    @property
    def dim(self) -> int:
        return np.asarray(self.unitaries[0]).shape[0]


UnitalPositiveMap = Pinching | UnitaryMixture


def apply_map(phi: UnitalPositiveMap, M: HermitianMatrix) -> HermitianMatrix:
    if phi.dim != M.dim:
        raise DimensionMismatch(f"map acts on dim {phi.dim}, matrix has dim {M.dim}")
    a = M.array
    if isinstance(phi, Pinching):
        out = np.zeros_like(a)
        start = 0
        for b in phi.block_sizes:
            sl = slice(start, start + b)
            out[sl, sl] = a[sl, sl]
            start += b
        return HermitianMatrix._wrap(out)
    out = sum(p * (u @ a @ u.conj().T) for p, u in zip(phi.weights, phi.unitaries))
    return HermitianMatrix._wrap(np.asarray(out))


def random_pinching(gen: SeededGenerator, dim: int) -> Pinching:
    """Pinching onto a random set of contiguous diagonal blocks."""
    rng = gen.rng("pinching")
    cuts = sorted(rng.choice(np.arange(1, dim), size=int(rng.integers(0, dim)), replace=False)) if dim > 1 else []
    edges = [0, *cuts, dim]
    return Pinching(tuple(int(b - a) for a, b in zip(edges[:-1], edges[1:])))


def random_unitary_mixture(gen: SeededGenerator, dim: int, k: int = 2) -> UnitaryMixture:
    rng = gen.rng("mixture")
    w = rng.dirichlet(np.ones(k))
    w[-1] = 1.0 - w[:-1].sum()
    us = tuple(random_unitary(gen.derive("U", i), dim) for i in range(k))
    return UnitaryMixture(tuple(float(x) for x in w), us)


def check_unital(phi: UnitalPositiveMap, atol: float = 1e-10) -> bool:
    I = HermitianMatrix.identity(phi.dim)
    return bool(np.max(np.abs(apply_map(phi, I).array - I.array)) <= atol)
