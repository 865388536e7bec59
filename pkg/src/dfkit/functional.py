"""Finite decoherence functionals: storage, axiom validation, classicality."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConsistencyError,
    DFKitError,
    NotBiadditive,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NotSquare,
    RepMismatch,
)
from .events import EventSpace, QMeasure, disjoint_pair_arrays, indicator, indicator_matrix, popcount
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, gram, max_abs

# Event-level tables are materialized only up to this many atoms (2**10 events).
EVENT_TABLE_MAX_ATOMS = 10


@dataclass(frozen=True, eq=False)
class DecoherenceFunctional:
    """A decoherence functional on ``2**space``, stored by its atom matrix.

    Construct through :func:`validate`; the bare constructor does not check
    the axioms.
    """

    space: EventSpace
    atom_matrix: np.ndarray
    normalized: bool = False

    @property
    def n(self) -> int:
        return self.space.n

    def __call__(self, A: int, B: int) -> complex:
        return evaluate(self, A, B)

    def event_table(self) -> np.ndarray:
        """The full ``2**n x 2**n`` table ``D(A, B)``."""
        X = indicator_matrix(self.n)
        return X @ self.atom_matrix @ X.T

    def qmeasure(self) -> QMeasure:
        """``mu(A) = D(A, A)``."""
        X = indicator_matrix(self.n)
        vals = np.einsum("ai,ij,aj->a", X, self.atom_matrix, X).real
        return QMeasure(self.space, np.clip(vals, 0.0, None))


def evaluate(D: DecoherenceFunctional, A: int, B: int) -> complex:
    A, B = D.space.check(A), D.space.check(B)
    a, b = indicator(A, D.n), indicator(B, D.n)
    return complex(a @ D.atom_matrix @ b)


def check_axioms(atom_matrix, normalized_expected: bool = False, tol: Tolerance = DEFAULT_TOL) -> list:
    """Every violated axiom with its numeric evidence; empty when valid.

    (D2) holds by construction for atom-matrix storage and is never reported
    here; see :func:`from_event_table` for tables that may break it.
    """
    M = as_matrix(atom_matrix)
    violations = []
    scale = max(1.0, max_abs(M))
    asym = max_abs(M - M.conj().T)
    if asym > tol.abs * scale:
        violations.append({"axiom": "D3", "check": "hermitian", "asymmetry": asym})
    H = (M + M.conj().T) / 2
    w = np.linalg.eigvalsh(H)[::-1] if H.size else np.zeros(0)
    min_eig = float(w[-1]) if w.size else 0.0
    if w.size and min_eig < -tol.rel * max(1.0, float(w[0])):
        violations.append({"axiom": "D3", "check": "psd", "min_eigenvalue": min_eig})
    if normalized_expected:
        total = complex(M.sum())
        if abs(total - 1) > tol.abs * scale:
            violations.append({"axiom": "D1", "check": "normalized", "total": [total.real, total.imag]})
    return violations


_ERROR_FOR_CHECK = {"hermitian": NotHermitian, "psd": NotPSD, "normalized": NotNormalized}


def validate(
    atom_matrix,
    normalized_expected: bool = False,
    tol: Tolerance = DEFAULT_TOL,
    space: Optional[EventSpace] = None,
) -> DecoherenceFunctional:
    """Build a :class:`DecoherenceFunctional` or raise with every violation attached.

    The raised exception's class names the first violated check; its
    ``violations`` list carries all of them.
    """
    M = as_matrix(atom_matrix)
    if space is None:
        space = EventSpace.of_size(M.shape[0], max_atoms=max(M.shape[0], 1))
    if space.n != M.shape[0]:
        raise NotSquare(f"atom matrix is {M.shape[0]}x{M.shape[0]} but the space has {space.n} atoms")
    violations = check_axioms(M, normalized_expected, tol)
    if violations:
        first = violations[0]
        msg = "; ".join(_describe_violation(v) for v in violations)
        raise _ERROR_FOR_CHECK[first["check"]](msg, violations=violations)
    H = (M + M.conj().T) / 2
    H.setflags(write=False)
    return DecoherenceFunctional(space, H, bool(normalized_expected))


def _describe_violation(v: dict) -> str:
    if v["check"] == "hermitian":
        return f"({v['axiom']}) not Hermitian, asymmetry {v['asymmetry']:.3e}"
    if v["check"] == "psd":
        return f"({v['axiom']}) not positive semi-definite, min eigenvalue {v['min_eigenvalue']:.6g}"
    if v["check"] == "biadditive":
        return f"({v['axiom']}) not biadditive, residual {v['residual']:.3e}"
    return f"({v['axiom']}) D(Omega, Omega) = {complex(*v['total']):.6g}, expected 1"


def from_event_table(table, normalized_expected: bool = False, tol: Tolerance = DEFAULT_TOL, space=None):
    """Ingest a full ``2**n x 2**n`` table ``D(A, B)``; check biadditivity, collapse to atoms."""
    T = np.asarray(table, dtype=complex)
    N = T.shape[0]
    n = N.bit_length() - 1
    if T.shape != (N, N) or N != 1 << n or n < 1:
        raise NotSquare(f"event table must be 2**n x 2**n, got shape {T.shape}")
    singles = 1 << np.arange(n)
    M = T[np.ix_(singles, singles)]
    X = indicator_matrix(n)
    residual = max_abs(T - X @ M @ X.T)
    if residual > tol.abs * max(1.0, max_abs(T)) * N:
        raise NotBiadditive(
            f"event table is not biadditive: residual {residual:.3e}",
            violations=[{"axiom": "D2", "check": "biadditive", "residual": residual}],
        )
    return validate(M, normalized_expected, tol, space)


@dataclass(frozen=True, eq=False)
class ClassicalityVerdict:
    classical: bool
    weakly_classical: bool
    witness: Optional[tuple] = None
    recovered_measure: Optional[np.ndarray] = None
    criteria: dict = field(default_factory=dict)


def _atom_scale(D: DecoherenceFunctional) -> float:
    return max(1.0, max_abs(D.atom_matrix))


def atom_diagonal(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL, real_part: bool = False) -> bool:
    off = D.atom_matrix - np.diag(np.diag(D.atom_matrix))
    if real_part:
        off = off.real
    return max_abs(off) <= tol.abs * _atom_scale(D)


def _pair_bounds(A, B, n, base):
    # |D(A,B)| <= |A||B| max|off-diagonal atom| for disjoint A, B
    counts = np.array([popcount(k) for k in range(1 << n)])
    return base * np.maximum(1, counts[A] * counts[B])


def disjoint_pairs_vanish(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL, real_part: bool = False) -> bool:
    """``D(A, B) = 0`` (or its real part) for every disjoint pair of events."""
    T = D.event_table()
    A, B = disjoint_pair_arrays(D.n)
    vals = T[A, B].real if real_part else T[A, B]
    return bool(np.all(np.abs(vals) <= _pair_bounds(A, B, D.n, tol.abs * _atom_scale(D))))


def intersection_identity_holds(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``D(A, B) = D(A & B, A & B)`` for all events."""
    T = D.event_table()
    N = T.shape[0]
    A = np.arange(N)[:, None]
    B = np.arange(N)[None, :]
    C = A & B
    counts = np.array([popcount(k) for k in range(N)])
    bound = tol.abs * _atom_scale(D) * np.maximum(1, counts[A] * counts[B])
    return bool(np.all(np.abs(T - T[C, C]) <= bound))


def real_part_identity_holds(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``Re D(A, B) = mu(A & B)`` with ``mu(A) = Re D(A, A)``, for all events."""
    T = D.event_table()
    N = T.shape[0]
    A = np.arange(N)[:, None]
    B = np.arange(N)[None, :]
    C = A & B
    counts = np.array([popcount(k) for k in range(N)])
    bound = tol.abs * _atom_scale(D) * np.maximum(1, counts[A] * counts[B])
    return bool(np.all(np.abs(T.real - T[C, C].real) <= bound))


def classify_classicality(D: DecoherenceFunctional, tol: Tolerance = DEFAULT_TOL) -> ClassicalityVerdict:
    """Decide classical / weakly classical from the atom matrix.

    For ``n <= 10`` the event-level characterizations (disjoint pairs vanish,
    ``D(A,B) = D(A&B, A&B)``, the real-part identity) are recomputed and must
    agree; a disagreement raises :class:`ConsistencyError`.
    """
    classical = atom_diagonal(D, tol)
    weak = atom_diagonal(D, tol, real_part=True)
    criteria = {"atom_diagonal": classical, "atom_real_diagonal": weak}
    if D.n <= EVENT_TABLE_MAX_ATOMS:
        criteria["disjoint_pairs_vanish"] = disjoint_pairs_vanish(D, tol)
        criteria["intersection_identity"] = intersection_identity_holds(D, tol)
        criteria["disjoint_real_parts_vanish"] = disjoint_pairs_vanish(D, tol, real_part=True)
        criteria["real_part_identity"] = real_part_identity_holds(D, tol)
        groups = (
            ("atom_diagonal", "disjoint_pairs_vanish", "intersection_identity"),
            ("atom_real_diagonal", "disjoint_real_parts_vanish", "real_part_identity"),
        )
        for group in groups:
            if len({criteria[k] for k in group}) != 1:
                raise ConsistencyError(f"classicality criteria disagree: {criteria}")

    witness = None
    if not classical:
        # worst atom pair: the real part when even weak classicality fails
        off = D.atom_matrix - np.diag(np.diag(D.atom_matrix))
        mag = np.abs(off.real) if not weak else np.abs(off)
        i, j = np.unravel_index(int(np.argmax(mag)), mag.shape)
        witness = (1 << int(i), 1 << int(j))

    recovered = None
    if classical:
        X = indicator_matrix(D.n)
        recovered = X @ np.diag(D.atom_matrix).real
    return ClassicalityVerdict(classical, weak, witness, recovered, criteria)


def orthogonality_profile(D: DecoherenceFunctional, rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``E(A)`` is orthogonal to ``E(B)`` for every disjoint pair.

    ``rep`` is anything with an ``atom_vectors`` array whose Gram matrix is
    the atom matrix of ``D``.
    """
    V = np.asarray(rep.atom_vectors, dtype=complex)
    if V.shape[0] != D.n:
        raise RepMismatch(f"representation has {V.shape[0]} atom vectors, functional has {D.n} atoms")
    G = gram(V)
    err = max_abs(G - D.atom_matrix)
    if err > tol.abs * _atom_scale(D):
        raise RepMismatch(f"representation does not reproduce the functional (error {err:.3e})")
    scale = tol.abs * max(1.0, max_abs(G))
    if D.n > EVENT_TABLE_MAX_ATOMS:
        off = G - np.diag(np.diag(G))
        return max_abs(off) <= scale
    EV = indicator_matrix(D.n) @ V
    A, B = disjoint_pair_arrays(D.n)
    ips = np.einsum("pk,pk->p", EV[A], EV[B].conj())
    return bool(np.all(np.abs(ips) <= _pair_bounds(A, B, D.n, scale)))


def is_valid(atom_matrix, normalized_expected=False, tol: Tolerance = DEFAULT_TOL) -> bool:
    try:
        validate(atom_matrix, normalized_expected, tol)
    except DFKitError:
        return False
    return True
