"""Operator-valued measures, decoherence operators and operator q-measures.

For atom operators ``E_i`` and ``E(A) = sum_{i in A} E_i``:

* decoherence operator ``D(A, B) = E(B)* E(A)``
* operator q-measure ``Q(A) = E(A)* E(A)``
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConsistencyError
from .events import disjoint_pair_arrays, disjoint_triple_arrays, indicator, indicator_matrix
from .linalg import DEFAULT_TOL, Tolerance


@dataclass(frozen=True, eq=False)
class OperatorValuedMeasure:
    atom_operators: np.ndarray

    def __post_init__(self):
        E = np.array(self.atom_operators, dtype=complex)
        if E.ndim != 3 or E.shape[1] != E.shape[2] or E.shape[0] < 1:
            raise ValueError(f"expected (n, m, m) atom operators, got shape {E.shape}")
        E.setflags(write=False)
        object.__setattr__(self, "atom_operators", E)

    @property
    def n(self) -> int:
        return self.atom_operators.shape[0]

    @property
    def dim(self) -> int:
        return self.atom_operators.shape[1]

    def __call__(self, A: int) -> np.ndarray:
        return np.tensordot(indicator(A, self.n), self.atom_operators, axes=1)

    def all_events(self) -> np.ndarray:
        return np.tensordot(indicator_matrix(self.n), self.atom_operators, axes=1)


def _adj(T):
    return np.conj(np.swapaxes(T, -1, -2))


def decoherence_operator(E: OperatorValuedMeasure, A: int, B: int) -> np.ndarray:
    return E(B).conj().T @ E(A)


def operator_qmeasure(E: OperatorValuedMeasure, A: int) -> np.ndarray:
    EA = E(A)
    return EA.conj().T @ EA


def all_qmeasures(E: OperatorValuedMeasure) -> np.ndarray:
    ops = E.all_events()
    return _adj(ops) @ ops


def _entry_max(T) -> np.ndarray:
    return np.abs(T).reshape(T.shape[0], -1).max(axis=1) if T.size else np.zeros(len(T))


def _scale(Q) -> float:
    return max(1.0, float(np.abs(Q).max(initial=0.0)))


class OperatorCheck(NamedTuple):
    holds: bool
    worst_violation: float
    scale: float
    witness: Optional[tuple]


def grade2_operator_check(E: OperatorValuedMeasure, tol: Tolerance = DEFAULT_TOL) -> OperatorCheck:
    """Max-entry residual of three-set inclusion-exclusion for ``Q`` over all disjoint triples.

    ``scale`` is ``max(1, max_A max|Q(A)_ij|)``; the identity holds when the
    residual is at most ``tol.abs * scale``.
    """
    Q = all_qmeasures(E)
    A, B, C = disjoint_triple_arrays(E.n)
    R = Q[A | B | C] - Q[A | B] - Q[A | C] - Q[B | C] + Q[A] + Q[B] + Q[C]
    r = _entry_max(R)
    k = int(np.argmax(r))
    scale = _scale(Q)
    holds = r[k] <= tol.abs * scale
    return OperatorCheck(bool(holds), float(r[k]), scale, None if holds else (int(A[k]), int(B[k]), int(C[k])))


class RegularityVerdict(NamedTuple):
    holds: bool
    premises_triggered: int
    worst_ratio: float
    witness: Optional[tuple]


def regularity_check(E: OperatorValuedMeasure, tol: Tolerance = DEFAULT_TOL) -> RegularityVerdict:
    """Regularity of ``Q`` with an explicit perturbation bound.

    For disjoint ``A, B``, call ``Q(X)`` null when ``||Q(X)|| <= t`` with
    ``t = tol.abs * scale`` (operator norms). Then ``||E(X)|| <= sqrt(t)`` and

    * ``Q(A)`` null implies ``||Q(A | B) - Q(B)|| <= t + 2 sqrt(t) ||E(B)||``
    * ``Q(A | B)`` null implies ``||Q(A) - Q(B)|| <= t + 2 sqrt(t) ||E(B)||``

    ``worst_ratio`` is the largest observed deviation over its bound.
    """
    ops = E.all_events()
    Q = _adj(ops) @ ops
    qn = np.linalg.norm(Q, ord=2, axis=(1, 2))
    en = np.sqrt(np.maximum(qn, 0.0))
    t = tol.abs * _scale(Q)
    A, B = disjoint_pair_arrays(E.n)
    slack = 64 * np.finfo(float).eps * _scale(Q)
    bound = t + 2 * np.sqrt(t) * en[B] + slack
    triggered, worst, witness = 0, 0.0, None
    for premise, X, Y in ((qn[A] <= t, A | B, B), (qn[A | B] <= t, A, B)):
        idx = np.flatnonzero(premise)
        triggered += idx.size
        if idx.size:
            dev = np.linalg.norm(Q[X[idx]] - Q[Y[idx]], ord=2, axis=(1, 2))
            ratio = dev / bound[idx]
            k = int(np.argmax(ratio))
            if ratio[k] > worst:
                worst, witness = float(ratio[k]), (int(A[idx[k]]), int(B[idx[k]]))
    holds = worst <= 1.0
    return RegularityVerdict(holds, triggered, worst, None if holds else witness)


@dataclass(frozen=True, eq=False)
class DecoherenceOperatorVerdict:
    classical: bool
    weakly_classical: bool
    witness: Optional[tuple] = None
    criteria: dict = field(default_factory=dict)


def classify_operator_decoherence(E: OperatorValuedMeasure, tol: Tolerance = DEFAULT_TOL) -> DecoherenceOperatorVerdict:
    """Classical / weakly classical, each decided by two equivalent criteria.

    classical: ``D(A, B) = 0`` on disjoint pairs, and ``D(A, B) = Q(A & B)``
    for all pairs. weakly classical: ``Re D(A, B) = (D + D*)/2 = 0`` on
    disjoint pairs, and ``Q`` additive on disjoint pairs. A disagreement
    within either pair raises :class:`ConsistencyError`.
    """
    ops = E.all_events()
    Q = _adj(ops) @ ops
    gate = tol.abs * _scale(Q)
    A, B = disjoint_pair_arrays(E.n)
    Dab = _adj(ops[B]) @ ops[A]
    d_mag = _entry_max(Dab)
    re_mag = _entry_max((Dab + _adj(Dab)) / 2)
    add_mag = _entry_max(Q[A | B] - Q[A] - Q[B])

    N = 1 << E.n
    ia, ib = np.divmod(np.arange(N * N), N)
    ident_mag = _entry_max(_adj(ops[ib]) @ ops[ia] - Q[ia & ib])

    criteria = {
        "disjoint_vanish": bool(np.all(d_mag <= gate)),
        "intersection_identity": bool(np.all(ident_mag <= gate)),
        "disjoint_real_part_vanish": bool(np.all(re_mag <= gate)),
        "q_additive": bool(np.all(add_mag <= gate)),
    }
    if criteria["disjoint_vanish"] != criteria["intersection_identity"] or \
            criteria["disjoint_real_part_vanish"] != criteria["q_additive"]:
        raise ConsistencyError(f"operator classicality criteria disagree: {criteria}")
    classical = criteria["disjoint_vanish"]
    weak = criteria["disjoint_real_part_vanish"]
    witness = None
    if not classical:
        mag = re_mag if not weak else d_mag
        k = int(np.argmax(mag))
        witness = (int(A[k]), int(B[k]))
    return DecoherenceOperatorVerdict(classical, weak, witness, criteria)
