"""Strong positivity of q-measures and their Hilbert-space reconstruction."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConsistencyError, NotGrade2Additive, NotStronglyPositive
from .events import QMeasure, delta_matrix, grade2_check, interference
from .linalg import DEFAULT_TOL, Tolerance, gram_factorize, psd_check
from .representations import VectorRep

DELTA_MAX_ATOMS = 10

CONVENTION_NOTE = (
    "decoherence matrix uses D_ij = I_ij/2 off the diagonal; "
    "unhalved_eigenvalues use D_ij = I_ij for comparison only"
)


@dataclass(frozen=True, eq=False)
class StrongPositivityVerdict:
    strongly_positive: bool
    atom_eigenvalues: np.ndarray
    delta_eigenvalues: Optional[np.ndarray]
    unhalved_eigenvalues: np.ndarray
    unhalved_psd: bool
    convention_note: str

    @property
    def conventions_disagree(self) -> bool:
        return self.strongly_positive != self.unhalved_psd


def strong_positivity(mu: QMeasure, tol: Tolerance = DEFAULT_TOL) -> StrongPositivityVerdict:
    """PSD test of the decoherence matrix, cross-checked against the full delta matrix.

    Raises :class:`NotGrade2Additive` when ``mu`` is not a q-measure and
    :class:`ConsistencyError` if the two forms of the test disagree.
    """
    g2 = grade2_check(mu, tol)
    if not g2.holds:
        raise NotGrade2Additive(
            f"not grade-2 additive: residual {g2.worst_violation:.3e} at {g2.witness}",
            violations=[{"check": "grade2", "residual": g2.worst_violation, "witness": list(g2.witness)}],
        )
    data = interference(mu)
    atom = psd_check(data.Dmat, tol)
    unhalved = psd_check(data.unhalved, tol)
    delta_eigs = None
    if mu.n <= DELTA_MAX_ATOMS:
        dv = psd_check(delta_matrix(mu), tol)
        delta_eigs = dv.eigenvalues
        if dv.is_psd != atom.is_psd:
            raise ConsistencyError(
                f"atom form (min {atom.min_eigenvalue:.3e}) and delta form "
                f"(min {dv.min_eigenvalue:.3e}) of strong positivity disagree"
            )
    note = CONVENTION_NOTE
    if atom.is_psd != unhalved.is_psd:
        note += "; the two conventions give different verdicts for this q-measure"
    return StrongPositivityVerdict(
        strongly_positive=atom.is_psd,
        atom_eigenvalues=atom.eigenvalues,
        delta_eigenvalues=delta_eigs,
        unhalved_eigenvalues=unhalved.eigenvalues,
        unhalved_psd=unhalved.is_psd,
        convention_note=note,
    )


def build_qmeasure_rep(mu: QMeasure, tol: Tolerance = DEFAULT_TOL) -> VectorRep:
    """Vector-valued measure with ``mu(A) = ||E(A)||^2`` for every event.

    Eigenvalues of the decoherence matrix inside the tolerance band are
    treated as zero, so boundary cases still factor.
    """
    verdict = strong_positivity(mu, tol)
    if not verdict.strongly_positive:
        raise NotStronglyPositive(
            f"decoherence matrix has eigenvalue {verdict.atom_eigenvalues[-1]:.6g} < 0"
        )
    # gram_factorize keeps only eigenvalues above tol.rel * max, which clamps the band
    rep = VectorRep(gram_factorize(interference(mu).Dmat, tol))
    norms = np.sum(np.abs(rep.event_vectors()) ** 2, axis=1)
    err = float(np.max(np.abs(norms - mu.values)))
    if err > 1e3 * tol.abs * max(1.0, float(mu.values.max())):
        raise ConsistencyError(f"reconstruction misses mu by {err:.3e}")
    return rep


class IdentityVerdict(NamedTuple):
    holds: bool
    lhs: float
    rhs: float


def pair_reconstruction_identity(mu: QMeasure, A: int, tol: Tolerance = DEFAULT_TOL) -> IdentityVerdict:
    """``mu(A) = sum_{i<j in A} mu({i,j}) - (|A|-2) sum_{i in A} mu({i})``."""
    members = mu.space.members(A)
    m = len(members)
    pairs = sum(mu.values[(1 << i) | (1 << j)] for k, i in enumerate(members) for j in members[k + 1:])
    singles = sum(mu.values[1 << i] for i in members)
    rhs = float(pairs - (m - 2) * singles)
    lhs = float(mu.values[A])
    scale = max(1.0, float(np.abs(mu.values).max())) * max(1, m * m)
    return IdentityVerdict(abs(lhs - rhs) <= tol.abs * scale, lhs, rhs)

