"""Finite sample spaces, bitmask events, and q-measure combinatorics.

An event is an ``int`` bitmask: bit ``i`` set means atom ``i`` belongs to the
event. Set-function tables are dense arrays of length ``2**n`` indexed by
bitmask.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import CapExceeded, EventOutOfRange
from .linalg import DEFAULT_TOL, Tolerance

DEFAULT_MAX_ATOMS = 12
# dense 2**n tables are refused beyond this many atoms
TABLE_MAX_ATOMS = 20


@dataclass(frozen=True)
class EventSpace:
    atom_labels: tuple
    max_atoms: int = field(default=DEFAULT_MAX_ATOMS, compare=False)

    def __post_init__(self):
        labels = tuple(str(a) for a in self.atom_labels)
        object.__setattr__(self, "atom_labels", labels)
        if not labels:
            raise ValueError("an event space needs at least one atom")
        if len(labels) > self.max_atoms:
            raise ValueError(f"{len(labels)} atoms exceeds the configured maximum {self.max_atoms}")
        if len(set(labels)) != len(labels):
            raise ValueError("atom labels must be distinct")

    @classmethod
    def of_size(cls, n: int, max_atoms: int = DEFAULT_MAX_ATOMS) -> "EventSpace":
        return cls(tuple(str(i + 1) for i in range(n)), max_atoms=max_atoms)

    @property
    def n(self) -> int:
        return len(self.atom_labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def n_events(self) -> int:
        return 1 << self.n

    def check(self, A: int) -> int:
        if not isinstance(A, (int, np.integer)) or A < 0 or A > self.full:
            raise EventOutOfRange(f"event {A!r} is outside a space of {self.n} atoms")
        return int(A)

    def event(self, members) -> int:
        """Bitmask from atom indices or labels."""
        mask = 0
        for m in members:
            i = self.atom_labels.index(m) if isinstance(m, str) else int(m)
            if not 0 <= i < self.n:
                raise EventOutOfRange(f"atom index {i} out of range")
            mask |= 1 << i
        return mask

    def members(self, A: int) -> list:
        A = self.check(A)
        return [i for i in range(self.n) if A >> i & 1]

    def complement(self, A: int) -> int:
        return self.full & ~self.check(A)

    def describe(self, A: int) -> str:
        return "{" + ",".join(self.atom_labels[i] for i in self.members(A)) + "}"


def popcount(A: int) -> int:
    return bin(A).count("1")


@lru_cache(maxsize=None)
def indicator_matrix(n: int) -> np.ndarray:
    """``X[A, i] = 1`` iff atom ``i`` is in event ``A``; shape ``(2**n, n)``."""
    if n > TABLE_MAX_ATOMS:
        raise CapExceeded(f"a table over 2**{n} events is too large (limit {TABLE_MAX_ATOMS} atoms)")
    masks = np.arange(1 << n)[:, None]
    return ((masks >> np.arange(n)[None, :]) & 1).astype(float)


def indicator(A: int, n: int) -> np.ndarray:
    return np.array([(A >> i) & 1 for i in range(n)], dtype=float)


@lru_cache(maxsize=None)
def disjoint_triple_arrays(n: int):
    """All mutually disjoint ``(A, B, C)`` as three int arrays of length ``4**n``.

    Each atom is assigned to none/A/B/C; atom 0 is the most significant
    digit, matching ``itertools.product`` order.
    """
    t = np.arange(4**n)
    A = np.zeros_like(t)
    B = np.zeros_like(t)
    C = np.zeros_like(t)
    for i in range(n):
        digit = (t // 4 ** (n - 1 - i)) % 4
        A |= (digit == 1).astype(t.dtype) << i
        B |= (digit == 2).astype(t.dtype) << i
        C |= (digit == 3).astype(t.dtype) << i
    for arr in (A, B, C):
        arr.setflags(write=False)
    return A, B, C


@lru_cache(maxsize=None)
def disjoint_pair_arrays(n: int):
    """All disjoint ordered pairs ``(A, B)``; ``3**n`` of them."""
    A, B, C = disjoint_triple_arrays(n)
    keep = C == 0
    return A[keep], B[keep]


def enumerate_disjoint_triples(space: EventSpace) -> Iterator[tuple]:
    n = space.n
    for digits in product(range(4), repeat=n):
        parts = [0, 0, 0, 0]
        for i, d in enumerate(digits):
            parts[d] |= 1 << i
        yield parts[1], parts[2], parts[3]


@dataclass(frozen=True, eq=False)
class QMeasure:
    """A nonnegative set function stored as a dense ``2**n`` table."""

    space: EventSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.space.n_events,):
            raise ValueError(f"expected {self.space.n_events} values, got shape {v.shape}")
        if v[0] != 0:
            raise ValueError(f"mu(empty set) must be 0, got {v[0]}")
        if np.any(v < 0):
            i = int(np.argmin(v))
            raise ValueError(f"q-measure values must be nonnegative; mu({self.space.describe(i)}) = {v[i]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, space: EventSpace, fn) -> "QMeasure":
        return cls(space, np.array([fn(A) for A in range(space.n_events)], dtype=float))

    @property
    def n(self) -> int:
        return self.space.n

    def __call__(self, A: int) -> float:
        return float(self.values[self.space.check(A)])

    def singletons(self) -> np.ndarray:
        return self.values[1 << np.arange(self.n)]


class CheckVerdict(NamedTuple):
    holds: bool
    worst_violation: float
    witness: Optional[tuple]


def _mu_scale(mu: QMeasure) -> float:
    return max(1.0, float(mu.values[mu.space.full]))


def grade2_residuals(mu: QMeasure):
    A, B, C = disjoint_triple_arrays(mu.n)
    v = mu.values
    r = v[A | B | C] - v[A | B] - v[A | C] - v[B | C] + v[A] + v[B] + v[C]
    return r, (A, B, C)


def grade2_check(mu: QMeasure, tol: Tolerance = DEFAULT_TOL) -> CheckVerdict:
    """Three-set inclusion-exclusion over every mutually disjoint triple."""
    r, (A, B, C) = grade2_residuals(mu)
    k = int(np.argmax(np.abs(r)))
    worst = float(abs(r[k]))
    holds = worst <= tol.abs * _mu_scale(mu)
    return CheckVerdict(holds, worst, None if holds else (int(A[k]), int(B[k]), int(C[k])))


def grade2_pairwise_check(mu: QMeasure, tol: Tolerance = DEFAULT_TOL) -> CheckVerdict:
    """Equivalent two-set form, checked over all ordered pairs of events."""
    N = mu.space.n_events
    full = mu.space.full
    v = mu.values
    A = np.arange(N)[:, None]
    B = np.arange(N)[None, :]
    Ac, Bc = full & ~A, full & ~B
    r = v[A | B] - (v[A] + v[B] - v[A & B] + v[(A & Bc) | (Ac & B)] - v[A & Bc] - v[Ac & B])
    k = int(np.argmax(np.abs(r)))
    worst = float(np.abs(r).flat[k])
    holds = worst <= tol.abs * _mu_scale(mu)
    return CheckVerdict(holds, worst, None if holds else tuple(int(x) for x in divmod(k, N)))


@dataclass(frozen=True, eq=False)
class InterferenceData:
    I: np.ndarray
    Dmat: np.ndarray

    @property
    def unhalved(self) -> np.ndarray:
        """Diagonal ``mu(w_i)`` with off-diagonal ``I_ij`` (not halved)."""
        return np.diag(np.diag(self.Dmat)) + self.I


def interference(mu: QMeasure) -> InterferenceData:
    n = mu.n
    single = mu.singletons()
    I = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            I[i, j] = I[j, i] = mu.values[(1 << i) | (1 << j)] - single[i] - single[j]
    return InterferenceData(I, np.diag(single) + I / 2)


def delta(mu: QMeasure, A: int, B: int) -> float:
    A, B = mu.space.check(A), mu.space.check(B)
    full = mu.space.full
    v = mu.values
    return 0.5 * (v[A | B] + v[A & B] - v[A & (full & ~B)] - v[(full & ~A) & B])


def delta_matrix(mu: QMeasure, events: Optional[Sequence[int]] = None) -> np.ndarray:
    """``[delta(A_i, A_j)]`` for the given events (all ``2**n`` by default)."""
    full = mu.space.full
    ev = np.arange(mu.space.n_events) if events is None else np.asarray(events, dtype=np.int64)
    A, B = ev[:, None], ev[None, :]
    v = mu.values
    return 0.5 * (v[A | B] + v[A & B] - v[A & (full & ~B)] - v[(full & ~A) & B])
