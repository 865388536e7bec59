"""Hilbert-space representations of finite decoherence functionals.

A vector representation assigns each atom a vector ``e_i`` and each event
the sum ``E(A) = sum_{i in A} e_i``; an operator representation assigns each
atom an operator ``P_i`` and fixes a unit vector ``psi`` so that
``D(A, B) = <E(A) psi, E(B) psi>``.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import DimensionMismatch, GramMismatch, NotUnitary, RepMismatch, SearchExhausted
from .events import indicator, indicator_matrix
from .functional import EVENT_TABLE_MAX_ATOMS, DecoherenceFunctional
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    gram,
    gram_factorize,
    hermitian_eigen,
    max_abs,
    numerical_rank,
    orthogonal_projector,
    rank_from_eigenvalues,
)

CYCLIC_FLOOR = 1e-6
CYCLIC_MAX_ATTEMPTS = 64


@dataclass(frozen=True, eq=False)
class VectorRep:
    """Atom vectors stored as rows of an ``(n, dim)`` array."""

    atom_vectors: np.ndarray

    def __post_init__(self):
        V = np.array(self.atom_vectors, dtype=complex)
        if V.ndim != 2:
            raise ValueError("atom_vectors must be a 2-D array (n, dim)")
        V.setflags(write=False)
        object.__setattr__(self, "atom_vectors", V)

    @property
    def n(self) -> int:
        return self.atom_vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.atom_vectors.shape[1]

    def event_vector(self, A: int) -> np.ndarray:
        return indicator(A, self.n) @ self.atom_vectors

    def event_vectors(self) -> np.ndarray:
        """``E(A)`` for every event, one row per bitmask."""
        return indicator_matrix(self.n) @ self.atom_vectors

    def gram(self) -> np.ndarray:
        return gram(self.atom_vectors)


@dataclass(frozen=True, eq=False)
class OperatorRep:
    """Atom operators ``(n, dim, dim)`` plus a unit vector ``psi``."""

    atom_operators: np.ndarray
    psi: np.ndarray
    seed: Optional[int] = None
    floor_achieved: Optional[float] = None

    def __post_init__(self):
        P = np.array(self.atom_operators, dtype=complex)
        psi = np.array(self.psi, dtype=complex)
        if P.ndim != 3 or P.shape[1] != P.shape[2] or psi.shape != (P.shape[1],):
            raise ValueError(f"inconsistent shapes: operators {P.shape}, psi {psi.shape}")
        if abs(np.linalg.norm(psi) - 1) > 1e-9:
            raise ValueError(f"psi must be a unit vector, norm is {np.linalg.norm(psi)}")
        P.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "atom_operators", P)
        object.__setattr__(self, "psi", psi)

    @property
    def n(self) -> int:
        return self.atom_operators.shape[0]

    @property
    def dim(self) -> int:
        return self.atom_operators.shape[1]

    def event_operator(self, A: int) -> np.ndarray:
        return np.tensordot(indicator(A, self.n), self.atom_operators, axes=1)

    def event_operators(self) -> np.ndarray:
        return np.tensordot(indicator_matrix(self.n), self.atom_operators, axes=1)

    def as_vector_rep(self) -> VectorRep:
        """The induced vector representation ``A -> E(A) psi``."""
        return VectorRep(self.atom_operators @ self.psi)

    def functional_value(self, A: int, B: int) -> complex:
        a = self.event_operator(A) @ self.psi
        b = self.event_operator(B) @ self.psi
        return complex(np.vdot(b, a))


def _reproduction_error(V: np.ndarray, D: DecoherenceFunctional) -> float:
    return max_abs(gram(V) - D.atom_matrix)


def _check_reproduces(V: np.ndarray, D: DecoherenceFunctional, tol: Tolerance):
    if V.shape[0] != D.n:
        raise RepMismatch(f"representation has {V.shape[0]} atoms, functional has {D.n}")
    err = _reproduction_error(V, D)
    if err > tol.abs * max(1.0, max_abs(D.atom_matrix)):
        raise RepMismatch(f"representation does not reproduce the functional (error {err:.3e})")


def build_vector_rep(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL) -> VectorRep:
    """Spanning vector representation of dimension ``rank(D)``."""
    return VectorRep(gram_factorize(D.atom_matrix, tol))


def _pivot_basis(V: np.ndarray, m: int) -> list:
    # greedy Gram-Schmidt pivoting on the row vectors
    R = V.copy()
    picked = []
    for _ in range(m):
        norms = np.linalg.norm(R, axis=1)
        norms[picked] = -1.0
        i = int(np.argmax(norms))
        picked.append(i)
        q = R[i] / norms[i]
        R = R - np.outer(R @ q.conj(), q)
    return picked


def intertwiner(repA: VectorRep, repB: VectorRep, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``U`` with ``U e_i = f_i`` between two spanning representations.

    Both representations must be spanning (rank equal to their dimension)
    and share a Gram matrix. The result is checked for unitarity and the
    intertwining property before it is returned.
    """
    GA, GB = repA.gram(), repB.gram()
    if GA.shape != GB.shape:
        raise GramMismatch(f"representations have {repA.n} and {repB.n} atoms")
    scale = max(1.0, max_abs(GA))
    err = max_abs(GA - GB)
    if err > tol.abs * scale:
        raise GramMismatch(f"Gram matrices differ by {err:.3e}")
    m = numerical_rank(GA, tol)
    if repA.dim != m or repB.dim != m:
        raise DimensionMismatch(
            f"representations must be spanning: rank {m}, dimensions {repA.dim} and {repB.dim}"
        )
    if m == 0:
        return np.zeros((0, 0), dtype=complex)
    S = _pivot_basis(repA.atom_vectors, m)
    E = repA.atom_vectors[S].T  # columns e_i, i in S
    F = repB.atom_vectors[S].T
    U = np.linalg.solve(E.T, F.T).T  # U @ E = F
    loose = 10 * tol.abs
    unit_err = max_abs(U.conj().T @ U - np.eye(m))
    map_err = max_abs(repA.atom_vectors @ U.T - repB.atom_vectors)
    if unit_err > loose or map_err > loose * np.sqrt(scale):
        raise NotUnitary(f"intertwiner check failed: unitarity {unit_err:.3e}, images {map_err:.3e}")
    return U


def _nonzero_mask(V: np.ndarray, tol: Tolerance) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1)
    return norms > tol.abs * max(1.0, float(norms.max(initial=0.0)))


def cyclic_floor(rep: VectorRep, psi, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest ``|<e_i, psi>| / ||e_i||`` over the nonzero atom vectors (1 if none)."""
    V = rep.atom_vectors
    keep = _nonzero_mask(V, tol)
    if not np.any(keep):
        return 1.0
    Vk = V[keep]
    ratios = np.abs(Vk @ np.asarray(psi).conj()) / np.linalg.norm(Vk, axis=1)
    return float(ratios.min())


def is_cyclic_candidate(rep: VectorRep, psi, floor: float = CYCLIC_FLOOR, tol: Tolerance = DEFAULT_TOL) -> bool:
    psi = np.asarray(psi, dtype=complex)
    return abs(np.linalg.norm(psi) - 1) <= 1e-12 and cyclic_floor(rep, psi, tol) >= floor


def find_cyclic_vector(
    rep: VectorRep,
    seed: int = 0,
    floor: float = CYCLIC_FLOOR,
    max_attempts: int = CYCLIC_MAX_ATTEMPTS,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Random unit ``psi`` with ``|<e_i, psi>| >= floor * ||e_i||`` for all nonzero ``e_i``.

    Coordinates are independent standard complex normals; the draw is
    deterministic given ``seed``.
    """
    if rep.dim == 0:
        raise ValueError("no unit vector exists in a 0-dimensional space")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        z = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
        psi = z / np.linalg.norm(z)
        if cyclic_floor(rep, psi, tol) >= floor:
            return psi
    raise SearchExhausted(f"no vector met the floor {floor} in {max_attempts} attempts")


def build_operator_rep(D: DecoherenceFunctional, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                       floor: float = CYCLIC_FLOOR, max_attempts: int = CYCLIC_MAX_ATTEMPTS) -> OperatorRep:
    """Cyclic operator representation with rank-one atom operators.

    ``P_i = |e_i><e_i| / <psi, e_i>`` so that ``P_i psi = e_i`` exactly.
    A rank-0 functional gets a one-dimensional space with all ``P_i = 0``.
    """
    vrep = build_vector_rep(D, tol)
    n, m = vrep.n, vrep.dim
    if m == 0:
        return OperatorRep(np.zeros((n, 1, 1)), np.ones(1), seed=seed, floor_achieved=1.0)
    psi = find_cyclic_vector(vrep, seed, floor, max_attempts, tol)
    V = vrep.atom_vectors
    keep = _nonzero_mask(V, tol)
    P = np.zeros((n, m, m), dtype=complex)
    for i in np.flatnonzero(keep):
        e = V[i]
        P[i] = np.outer(e, e.conj()) / np.vdot(e, psi)
    return OperatorRep(P, psi, seed=seed, floor_achieved=cyclic_floor(vrep, psi, tol))


def is_cyclic(rep: OperatorRep, tol: Tolerance = DEFAULT_TOL) -> bool:
    _, r = orthogonal_projector(rep.atom_operators @ rep.psi, rep.dim, tol)
    return r == rep.dim


def _operator_scale(ops: np.ndarray) -> float:
    norms = np.linalg.norm(ops, ord=2, axis=(1, 2)) if ops.size else np.zeros(1)
    return float(norms.max(initial=0.0))


def rep_rank_profile(rep: OperatorRep, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Numerical rank of ``E(A)`` for every event, indexed by bitmask.

    Singular values are compared against ``tol.rel`` times the largest
    operator norm over all events, so an event operator that cancels to
    zero has rank 0.
    """
    ops = rep.event_operators()
    s = np.linalg.svd(ops, compute_uv=False)
    ref = float(s.max(initial=0.0))
    if ref == 0:
        return np.zeros(len(ops), dtype=int)
    return np.count_nonzero(s > tol.rel * ref, axis=1)


class EquivalenceCertificate(NamedTuple):
    definitely_inequivalent: bool
    reason: str


def check_equivalence_certificate(repA: OperatorRep, repB: OperatorRep, tol: Tolerance = DEFAULT_TOL,
                                  labels=None) -> EquivalenceCertificate:
    """Sound, incomplete test for inequivalence of two operator representations.

    Never asserts equivalence. Certificates, in order: dimensions, rank
    profiles, singular values of each ``E(A)``, and ``<E(A) psi, psi>``, all
    of which are preserved by ``E -> U E U*``, ``psi -> U psi``.
    """
    def name(A):
        if labels is None:
            return f"event {A:#b}"
        return "event {" + ",".join(labels[i] for i in range(len(labels)) if A >> i & 1) + "}"

    if repA.n != repB.n:
        return EquivalenceCertificate(True, f"different sample spaces: {repA.n} vs {repB.n} atoms")
    if repA.dim != repB.dim:
        return EquivalenceCertificate(True, f"different Hilbert space dimensions: {repA.dim} vs {repB.dim}")
    ra, rb = rep_rank_profile(repA, tol), rep_rank_profile(repB, tol)
    diff = np.flatnonzero(ra != rb)
    if diff.size:
        A = int(diff[0])
        return EquivalenceCertificate(True, f"rank of E at {name(A)} is {ra[A]} vs {rb[A]}")
    opsA, opsB = repA.event_operators(), repB.event_operators()
    sA = np.linalg.svd(opsA, compute_uv=False)
    sB = np.linalg.svd(opsB, compute_uv=False)
    bound = tol.abs * max(1.0, _operator_scale(opsA), _operator_scale(opsB))
    gap = np.abs(sA - sB).max(axis=1)
    if np.any(gap > bound):
        A = int(np.argmax(gap))
        return EquivalenceCertificate(True, f"singular values of E at {name(A)} differ by {gap[A]:.3e}")
    eA = np.einsum("aij,j,i->a", opsA, repA.psi, repA.psi.conj())
    eB = np.einsum("aij,j,i->a", opsB, repB.psi, repB.psi.conj())
    gap = np.abs(eA - eB)
    if np.any(gap > bound):
        A = int(np.argmax(gap))
        return EquivalenceCertificate(True, f"<E(A) psi, psi> at {name(A)} differs by {gap[A]:.3e}")
    return EquivalenceCertificate(False, "no invariant distinguishes the representations")


@dataclass(frozen=True, eq=False)
class HistorySpaceAnalysis:
    dim_K: int
    projector: np.ndarray
    natural_map: np.ndarray
    natural_map_unitary: bool
    ambient_dim: int
    range_rank: int
    isometry_error: float


def analyze_history_space(D: DecoherenceFunctional, rep: Union[VectorRep, OperatorRep],
                          tol: Tolerance = DEFAULT_TOL) -> HistorySpaceAnalysis:
    """Build the natural map from the history space ``K`` into the representation space.

    ``K`` is the quotient of event-indexed coefficient vectors by the null
    space of the event Gram matrix ``[D(A, B)]``. An orthonormal basis of
    ``K`` comes from that matrix's eigenvectors; the natural map sends a
    coefficient vector ``f`` to ``sum_A f(A) E(A)``. For ``n > 10`` atoms the
    atom matrix stands in for the event Gram matrix (same range, same rank).
    """
    vrep = rep.as_vector_rep() if isinstance(rep, OperatorRep) else rep
    V = vrep.atom_vectors
    _check_reproduces(V, D, tol)
    d = vrep.dim
    atom_rank = numerical_rank(D.atom_matrix, tol)
    if D.n <= EVENT_TABLE_MAX_ATOMS:
        G = D.event_table()
        vecs = vrep.event_vectors()
    else:
        G = D.atom_matrix
        vecs = V
    w, W = hermitian_eigen(G, tol)
    k = rank_from_eigenvalues(w, tol)
    if k != atom_rank:
        raise RepMismatch(f"history space dimension {k} differs from atom-matrix rank {atom_rank}")
    # orthonormal basis f_j = conj(W[:, j]) / sqrt(w_j) of K; U f_j = sum_A f_j(A) E(A)
    coeffs = W[:, :k].conj() / np.sqrt(w[:k])
    U = vecs.T @ coeffs
    iso = max_abs(U.conj().T @ U - np.eye(k)) if k else 0.0
    P = U @ U.conj().T if k else np.zeros((d, d), dtype=complex)
    _, r = orthogonal_projector(V, d, tol)
    return HistorySpaceAnalysis(
        dim_K=k,
        projector=P,
        natural_map=U,
        natural_map_unitary=(k == d),
        ambient_dim=d,
        range_rank=r,
        isometry_error=iso,
    )
