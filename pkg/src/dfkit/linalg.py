"""Dense complex linear algebra with explicit numerical contracts.

Vectors follow the convention ``<x, y> = sum_k x_k * conj(y_k)`` (linear in
the first slot). A family of vectors is stored as a 2-D array whose rows are
the vectors, so its Gram matrix is ``V @ V.conj().T``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotPSD, NotSquare


@dataclass(frozen=True)
class Tolerance:
    """Relative eigenvalue threshold plus absolute comparison floor."""

    rel: float = 1e-9
    abs: float = 1e-9

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


class PSDVerdict(NamedTuple):
    is_psd: bool
    min_eigenvalue: float
    eigenvalues: np.ndarray


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    return M


def inner(x, y) -> complex:
    """``<x, y>``, linear in ``x``."""
    return complex(np.vdot(y, x))


def gram(vectors) -> np.ndarray:
    V = np.asarray(vectors, dtype=complex)
    return V @ V.conj().T


def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def hermitize(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return ``(M + M*)/2`` after checking the asymmetry is within tolerance.

    The floor is ``tol.abs * max(1, max|M_ij|)`` so that matrices with large
    entries are not rejected for rounding noise.
    """
    M = as_matrix(M)
    asym = max_abs(M - M.conj().T)
    if asym > tol.abs * max(1.0, max_abs(M)):
        raise NotHermitian(
            f"matrix is not Hermitian: max |M_ij - conj(M_ji)| = {asym:.3e}",
            violations=[{"axiom": "D3", "check": "hermitian", "asymmetry": asym}],
        )
    return (M + M.conj().T) / 2


def hermitian_eigen(M, tol: Tolerance = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in descending order.
    eigenvectors : ndarray
        Unitary matrix whose columns match ``eigenvalues``.
    """
    H = hermitize(M, tol)
    if H.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, V = np.linalg.eigh(H)
    return w[::-1].copy(), V[:, ::-1].copy()


def psd_check(M, tol: Tolerance = DEFAULT_TOL) -> PSDVerdict:
    w, _ = hermitian_eigen(M, tol)
    if w.size == 0:
        return PSDVerdict(True, 0.0, w)
    lo, hi = float(w[-1]), float(w[0])
    return PSDVerdict(lo >= -tol.rel * max(1.0, hi), lo, w)


def rank_from_eigenvalues(w, tol: Tolerance = DEFAULT_TOL) -> int:
    if len(w) == 0 or w[0] <= 0:
        return 0
    return int(np.count_nonzero(w > tol.rel * w[0]))


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    """Count eigenvalues above ``tol.rel`` times the largest one."""
    w, _ = hermitian_eigen(M, tol)
    return rank_from_eigenvalues(w, tol)


def singular_rank(A, tol: Tolerance = DEFAULT_TOL, scale=None) -> int:
    """Rank of an arbitrary (rectangular) matrix from its singular values.

    ``scale`` fixes the reference magnitude; by default the largest singular
    value of ``A`` itself is used.
    """
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref <= 0:
        return 0
    return int(np.count_nonzero(s > tol.rel * ref))


def gram_factorize(D, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Factor a PSD matrix as a Gram matrix of ``rank(D)``-dimensional vectors.

    Row ``i`` of the result is a vector ``e_i`` with ``<e_i, e_j> = D_ij``.
    Null eigendirections are dropped, so the rows span the whole space. The
    zero matrix yields ``n`` vectors of dimension 0.
    """
    verdict = psd_check(D, tol)
    if not verdict.is_psd:
        raise NotPSD(
            f"matrix is not positive semi-definite: min eigenvalue {verdict.min_eigenvalue:.6g}",
            violations=[{"axiom": "D3", "check": "psd", "min_eigenvalue": verdict.min_eigenvalue}],
        )
    w, V = hermitian_eigen(D, tol)
    m = rank_from_eigenvalues(w, tol)
    return V[:, :m] * np.sqrt(w[:m])


def is_unitary(U, tol: Tolerance = DEFAULT_TOL) -> bool:
    U = as_matrix(U)
    return max_abs(U.conj().T @ U - np.eye(U.shape[0])) <= tol.abs


def orthogonal_projector(vectors, ambient_dim: int, tol: Tolerance = DEFAULT_TOL):
    """Projector onto the span of the rows of ``vectors`` and the span's dimension."""
    V = np.asarray(vectors, dtype=complex)
    if V.size == 0 or ambient_dim == 0:
        return np.zeros((ambient_dim, ambient_dim), dtype=complex), 0
    V = V.reshape(-1, ambient_dim)
    U, s, _ = np.linalg.svd(V.T, full_matrices=False)
    r = int(np.count_nonzero(s > tol.rel * s[0])) if s[0] > 0 else 0
    Ur = U[:, :r]
    return Ur @ Ur.conj().T, r
