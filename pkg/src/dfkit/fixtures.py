"""Worked examples used as test fixtures and by ``dfkit fixture``."""

import numpy as np

from .events import EventSpace, QMeasure
from .representations import OperatorRep

# Two-atom functional with atom matrix (1/5)[[1, 1], [1, 2]].
TWO_ATOM_MATRIX = np.array([[1, 1], [1, 2]], dtype=complex) / 5
TWO_ATOM_LABELS = ("1", "2")


def two_atom_functional():
    from .functional import validate

    return validate(TWO_ATOM_MATRIX, normalized_expected=True, space=EventSpace(TWO_ATOM_LABELS))


def two_atom_alternative_rep() -> OperatorRep:
    """``F(1) = c|e1><e1|``, ``F(2) = c I`` with ``c = sqrt(2/5)``, ``phi = (1, 1)/sqrt(2)``."""
    c = np.sqrt(2 / 5)
    F1 = c * np.array([[1, 0], [0, 0]], dtype=complex)
    F2 = c * np.eye(2, dtype=complex)
    phi = np.array([1, 1], dtype=complex) / np.sqrt(2)
    return OperatorRep(np.array([F1, F2]), phi)


def interference_only_qmeasure() -> QMeasure:
    """Two atoms, ``mu(Omega) = 1`` and zero on every smaller event."""
    return QMeasure(EventSpace.of_size(2), np.array([0, 0, 0, 1.0]))


def three_atom_qmeasure() -> QMeasure:
    """Three atoms, ``mu = 1`` on every event except the empty set and ``Omega``."""
    return QMeasure(EventSpace.of_size(3), np.array([0, 1, 1, 1, 1, 1, 1, 0.0]))


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def hadamard_scenario():
    """Two sites, two times, one Hadamard step, particle starting at site 0."""
    from .history import HistoryScenario

    return HistoryScenario(2, 2, HADAMARD[None, :, :], np.array([1, 0], dtype=complex))
