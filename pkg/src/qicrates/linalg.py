"""Dense complex linear algebra on small Hilbert spaces.

Operators are plain ``numpy`` arrays of shape ``(d, d)``. Density operators are
validated with :func:`check_density` rather than wrapped in a class, so every
function here accepts anything array-like.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, ValidationError

HERMITIAN_TOL = 1e-8
DENSITY_TOL = 1e-10
NEGATIVE_TOL = 1e-8
SUPPORT_TOL = 1e-10


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns orthonormal


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a.astype(complex, copy=False)


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    return a.shape[-1] == a.shape[-2] and bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def check_density(rho, tol: float = DENSITY_TOL, what: str = "state") -> np.ndarray:
    """Return ``rho`` as a complex matrix or raise :class:`ValidationError`.

    Checks Hermiticity, unit trace and positivity, each to ``tol``.
    """
    a = np.asarray(rho)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{what}: not a square matrix (shape {a.shape})")
    a = a.astype(complex, copy=False)
    herm_err = np.max(np.abs(a - a.conj().T))
    if herm_err > tol:
        raise ValidationError(f"{what}: not Hermitian (max |M - M^dag| = {herm_err:.3g})")
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"{what}: trace {tr:.12g} differs from 1")
    lam_min = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
    if lam_min < -tol:
        raise ValidationError(f"{what}: negative eigenvalue {lam_min:.3g}")
    return a


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(ops: Sequence) -> np.ndarray:
    if len(ops) == 0:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, [np.asarray(o, dtype=complex) for o in ops])


def tensor_power(a, n: int) -> np.ndarray:
    return tensor_all([a] * n)


def partial_trace(rho, dims: tuple[int, int], keep) -> np.ndarray:
    """Reduce a bipartite operator on ``dA ⊗ dB`` to one subsystem.

    ``keep`` is ``"A"``/``0`` for the first factor or ``"B"``/``1`` for the second.
    """
    a = as_matrix(rho)
    dA, dB = int(dims[0]), int(dims[1])
    if a.shape != (dA * dB, dA * dB):
        raise DimensionError(f"operator of shape {a.shape} does not act on {dA}x{dB}")
    t = a.reshape(dA, dB, dA, dB)
    if keep in ("A", 0):
        return np.einsum("ijkj->ik", t)
    if keep in ("B", 1):
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalues sorted in descending order."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix of shape {a.shape} is not square")
    if not is_hermitian(a, tol):
        raise ValidationError("eig_hermitian: input is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def clip_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Zero out negative float noise; reject eigenvalues below ``-1e-8``."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -NEGATIVE_TOL:
        raise ValidationError(f"operator is not positive semidefinite (eigenvalue {w.min():.3g})")
    return w.clip(min=0.0)


_FUNCS = ("sqrt", "inv_sqrt_pseudo", "log2")


def op_func(m, f: str) -> np.ndarray:
    """Apply a scalar function to a PSD Hermitian matrix through its spectrum.

    ``f`` is one of ``"sqrt"``, ``"inv_sqrt_pseudo"`` (inverse root on the support,
    zero elsewhere) and ``"log2"`` (zero eigenvalues contribute 0).
    """
    if f not in _FUNCS:
        raise ValueError(f"unknown operator function {f!r}; expected one of {_FUNCS}")
    w, v = eig_hermitian(m)
    w = clip_eigenvalues(w)
    support = w > SUPPORT_TOL
    if f == "sqrt":
        g = np.sqrt(w)
    elif f == "inv_sqrt_pseudo":
        g = np.zeros_like(w)
        g[support] = 1.0 / np.sqrt(w[support])
    else:
        g = np.zeros_like(w)
        g[support] = np.log2(w[support])
    return (v * g) @ v.conj().T


def trace_norm(m) -> float:
    a = as_matrix(m)
    return float(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T))).sum())


def trace_distance(a, b) -> float:
    """``||a - b||_1``, the sum of absolute eigenvalues of the difference (range [0, 2])."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return trace_norm(a - b)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    a = as_matrix(rho)
    return shannon_entropy(clip_eigenvalues(np.linalg.eigvalsh(0.5 * (a + a.conj().T))))


# random instances used by tests and the property harness

def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    return random_density(rng, d, rank=1)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_contraction(rng: np.random.Generator, d: int) -> np.ndarray:
    """Random Hermitian operator with spectrum in [0, 1]."""
    u = random_unitary(rng, d)
    w = rng.uniform(0.0, 1.0, size=d)
    return (u * w) @ u.conj().T


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)
