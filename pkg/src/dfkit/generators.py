"""Seeded random instances for property tests and benchmarks."""

import numpy as np

from .events import EventSpace, QMeasure, indicator_matrix
from .functional import validate
from .history import HistoryScenario
from .opmeasure import OperatorValuedMeasure


def complex_normal(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    Z = complex_normal(rng, n, n)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_psd(rng, n: int, rank=None) -> np.ndarray:
    rank = n if rank is None else rank
    A = complex_normal(rng, rank, n)
    return A.conj().T @ A


def random_functional(rng, n: int, rank=None, normalized=False):
    M = random_psd(rng, n, rank)
    if normalized:
        M = M / M.sum().real
    return validate(M, normalized_expected=normalized)


def random_vector_measure(rng, n: int, dim: int) -> np.ndarray:
    return complex_normal(rng, n, dim)


def qmeasure_from_vectors(vectors) -> QMeasure:
    """``mu(A) = ||sum_{i in A} e_i||^2``."""
    V = np.asarray(vectors)
    n = V.shape[0]
    EV = indicator_matrix(n) @ V
    vals = np.sum(np.abs(EV) ** 2, axis=1)
    vals[0] = 0.0
    return QMeasure(EventSpace.of_size(n), vals)


def qmeasure_from_quadratic_form(S) -> QMeasure:
    """``mu(A) = 1_A^T S 1_A`` for real symmetric ``S``; raises if some value is negative."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    X = indicator_matrix(n)
    vals = np.einsum("ai,ij,aj->a", X, S, X)
    vals[0] = 0.0
    vals[np.abs(vals) < 1e-14] = 0.0
    return QMeasure(EventSpace.of_size(n), vals)


def random_qmeasure(rng, n: int, max_tries: int = 1000) -> QMeasure:
    """A grade-2 additive, nonnegative set function; strongly positive or not."""
    for _ in range(max_tries):
        S = rng.standard_normal((n, n))
        S = (S + S.T) / 2
        S[np.diag_indices(n)] = np.abs(np.diag(S)) + rng.uniform(0, n, n)
        try:
            return qmeasure_from_quadratic_form(S)
        except ValueError:
            continue
    raise RuntimeError("could not draw a nonnegative q-measure")


def random_scenario(rng, n_sites: int, n_times: int, structured: bool = False) -> HistoryScenario:
    """Haar steps and a random state, or (``structured``) permutation-phase steps and a basis state."""
    if structured:
        steps = []
        for _ in range(n_times - 1):
            perm = np.eye(n_sites)[rng.permutation(n_sites)]
            steps.append(perm * np.exp(2j * np.pi * rng.random(n_sites)))
        psi = np.zeros(n_sites, dtype=complex)
        psi[rng.integers(n_sites)] = 1
    else:
        steps = [random_unitary(rng, n_sites) for _ in range(n_times - 1)]
        psi = complex_normal(rng, n_sites)
        psi /= np.linalg.norm(psi)
    return HistoryScenario(n_sites, n_times, np.array(steps), psi)


def random_opmeasure(rng, n: int, m: int) -> OperatorValuedMeasure:
    return OperatorValuedMeasure(complex_normal(rng, n, m, m))
