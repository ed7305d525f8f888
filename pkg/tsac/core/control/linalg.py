"""Small dense linear-algebra helpers."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from tsac.core.errors import DimensionMismatch, NumericalFailure

EIG_FLOOR = 1e-12


def as_matrix(m: np.ndarray | list, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    arr = np.array(m, dtype=float, ndmin=2)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure(f"{name} has non-finite entries")
    return arr


def require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")


def spectral_radius(m: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    m = np.asarray(m, dtype=float)
    require_square(m)
    if not np.all(np.isfinite(m)):
        raise NumericalFailure("spectral radius of a non-finite matrix")
    try:
        eig = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"eigenvalue routine failed: {e}") from e
    return float(np.max(np.abs(eig)))


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value, from the eigenvalues of the Gram matrix."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    gram = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
    try:
        top = float(np.linalg.eigvalsh(gram)[-1])
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"eigenvalue routine failed: {e}") from e
    return float(np.sqrt(max(top, 0.0)))


def sym_sqrt(v: np.ndarray, inverse: bool = False, floor: float = EIG_FLOOR) -> np.ndarray:
    """
    Symmetric square root (or inverse square root) of a PSD matrix.

    Eigenvalues below floor are clamped to it.
    """
    try:
        w, u = np.linalg.eigh((v + v.T) / 2.0)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"eigen-decomposition failed: {e}") from e
    w = np.maximum(w, floor)
    root = 1.0 / np.sqrt(w) if inverse else np.sqrt(w)
    return (u * root) @ u.T


def solve_lyapunov(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Solve X = a X aᵀ + q for a Schur-stable a.

    Raises:
        NumericalFailure: a is not Schur stable or the solver fails.
    """
    if spectral_radius(a) >= 1.0:
        raise NumericalFailure("Lyapunov equation needs a Schur-stable matrix")
    try:
        x = linalg.solve_discrete_lyapunov(a, q)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure(f"Lyapunov solver failed: {e}") from e
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("Lyapunov solution has non-finite entries")
    return (x + x.T) / 2.0
