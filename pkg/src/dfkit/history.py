"""A particle hopping on ``n`` sites through ``N - 1`` unitary steps.

Histories are ``N``-tuples of site indices. They are enumerated in
lexicographic order (first time step most significant), and history number
``k`` is atom ``k`` of the induced event space.
"""

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapExceeded, EventOutOfRange, NotUnitary
from .events import EventSpace
from .functional import DecoherenceFunctional, validate
from .linalg import DEFAULT_TOL, Tolerance, is_unitary, max_abs, orthogonal_projector
from .representations import OperatorRep

DEFAULT_HISTORY_CAP = 4096


@dataclass(frozen=True, eq=False)
class HistoryScenario:
    n_sites: int
    n_times: int
    step_unitaries: np.ndarray  # (N-1, n, n); entry k maps time k to time k+1
    initial_state: np.ndarray
    cap: int = DEFAULT_HISTORY_CAP

    def __post_init__(self):
        steps = np.array(self.step_unitaries, dtype=complex)
        psi = np.array(self.initial_state, dtype=complex)
        n, N = int(self.n_sites), int(self.n_times)
        if n < 1 or N < 2:
            raise ValueError("need at least one site and two times")
        if steps.shape != (N - 1, n, n):
            raise ValueError(f"expected {N - 1} step matrices of size {n}x{n}, got shape {steps.shape}")
        if psi.shape != (n,):
            raise ValueError(f"initial state must have {n} entries")
        if abs(np.linalg.norm(psi) - 1) > 1e-9:
            raise ValueError(f"initial state must be a unit vector, norm {np.linalg.norm(psi)}")
        for k, U in enumerate(steps):
            if not is_unitary(U, Tolerance(abs=1e-9)):
                raise NotUnitary(f"step {k} is not unitary")
        if n**N > self.cap:
            raise CapExceeded(f"{n}^{N} = {n**N} histories exceeds the cap {self.cap}")
        steps.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "step_unitaries", steps)
        object.__setattr__(self, "initial_state", psi)

    @property
    def n_histories(self) -> int:
        return self.n_sites**self.n_times

    def histories(self) -> list:
        return list(product(range(self.n_sites), repeat=self.n_times))

    def history_index(self, omega: Sequence[int]) -> int:
        k = 0
        for w in omega:
            k = k * self.n_sites + int(w)
        return k

    def event_space(self) -> EventSpace:
        labels = tuple("".join(map(str, h)) if self.n_sites <= 10 else ".".join(map(str, h))
                       for h in self.histories())
        return EventSpace(labels, max_atoms=self.cap)

    def total_evolution(self) -> np.ndarray:
        """``U(t_N, t_1)``, the ordered product of all steps."""
        U = np.eye(self.n_sites, dtype=complex)
        for S in self.step_unitaries:
            U = S @ U
        return U


def _projector(i: int, n: int) -> np.ndarray:
    P = np.zeros((n, n), dtype=complex)
    P[i, i] = 1
    return P


def path_operator(s: HistoryScenario, omega: Sequence[int]) -> np.ndarray:
    """``P_{w_N} U_{N-1} P_{w_{N-1}} ... U_1 P_{w_1}``."""
    if len(omega) != s.n_times:
        raise EventOutOfRange(f"history must have {s.n_times} entries, got {len(omega)}")
    if any(not 0 <= w < s.n_sites for w in omega):
        raise EventOutOfRange(f"history {tuple(omega)} has a site outside 0..{s.n_sites - 1}")
    E = _projector(omega[0], s.n_sites)
    for U, w in zip(s.step_unitaries, omega[1:]):
        E = _projector(w, s.n_sites) @ U @ E
    return E


def path_operators(s: HistoryScenario) -> np.ndarray:
    """Every path operator, stacked in history order."""
    return np.array([path_operator(s, h) for h in s.histories()])


def class_operator(s: HistoryScenario, A) -> np.ndarray:
    """Sum of path operators over a collection of histories (tuples) or a bitmask."""
    if isinstance(A, (int, np.integer)):
        hs = [h for k, h in enumerate(s.histories()) if A >> k & 1]
    else:
        hs = list(A)
    E = np.zeros((s.n_sites, s.n_sites), dtype=complex)
    for h in hs:
        E = E + path_operator(s, h)
    return E


def history_operator_rep(s: HistoryScenario) -> OperatorRep:
    """The representation on ``C^n`` given by path operators and the initial state."""
    return OperatorRep(path_operators(s), s.initial_state)


def induced_functional(s: HistoryScenario, tol: Tolerance = DEFAULT_TOL) -> DecoherenceFunctional:
    """``D(A, B) = <E(A) psi, E(B) psi>`` on the history sample space, validated and normalized."""
    vecs = path_operators(s) @ s.initial_state
    M = vecs @ vecs.conj().T
    return validate(M, normalized_expected=True, tol=tol, space=s.event_space())


class CyclicityVerdict(NamedTuple):
    cyclic: bool
    missing_sites: frozenset
    rank_cyclic: bool


def cyclicity_criterion(s: HistoryScenario, tol: Tolerance = DEFAULT_TOL) -> CyclicityVerdict:
    """Site coverage test for cyclicity of the initial state.

    ``cyclic`` holds when every site is reached with nonzero amplitude by
    some history; ``rank_cyclic`` is the independent rank test on
    ``span{E(w) psi}``.
    """
    vecs = path_operators(s) @ s.initial_state
    ref = max(max_abs(vecs), np.finfo(float).tiny)
    reached = np.max(np.abs(vecs), axis=0) > tol.rel * ref
    missing = frozenset(int(i) for i in np.flatnonzero(~reached))
    _, r = orthogonal_projector(vecs, s.n_sites, tol)
    return CyclicityVerdict(not missing, missing, r == s.n_sites)
