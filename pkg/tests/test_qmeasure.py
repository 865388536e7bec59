import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfkit.errors import NotGrade2Additive, NotStronglyPositive
from dfkit.events import EventSpace, QMeasure, delta_matrix, grade2_check, indicator_matrix
from dfkit.fixtures import interference_only_qmeasure, three_atom_qmeasure
from dfkit.generators import (
    complex_normal,
    qmeasure_from_quadratic_form,
    qmeasure_from_vectors,
    random_qmeasure,
)
from dfkit.qmeasure import build_qmeasure_rep, pair_reconstruction_identity, strong_positivity


def norms_squared(rep):
    return np.sum(np.abs(rep.event_vectors()) ** 2, axis=1)


class TestStrongPositivity:
    def test_first_example(self):
        v = strong_positivity(interference_only_qmeasure())
        assert not v.strongly_positive
        np.testing.assert_allclose(v.atom_eigenvalues, [0.5, -0.5], atol=1e-12)
        np.testing.assert_allclose(v.unhalved_eigenvalues, [1, -1], atol=1e-12)
        assert not v.conventions_disagree

    def test_second_example_conventions(self):
        v = strong_positivity(three_atom_qmeasure())
        np.testing.assert_allclose(v.atom_eigenvalues, [1.5, 1.5, 0], atol=1e-12)
        np.testing.assert_allclose(v.unhalved_eigenvalues, [2, 2, -1], atol=1e-12)
        assert v.strongly_positive and not v.unhalved_psd
        assert v.conventions_disagree
        assert "different verdicts" in v.convention_note

    def test_additive(self):
        p = np.array([0.3, 0.0, 1.2, 0.5])
        mu = QMeasure(EventSpace.of_size(4), indicator_matrix(4) @ p)
        v = strong_positivity(mu)
        assert v.strongly_positive
        np.testing.assert_allclose(v.atom_eigenvalues, sorted(p, reverse=True), atol=1e-12)

    def test_vector_measure(self, rng):
        mu = qmeasure_from_vectors(complex_normal(rng, 5, 3))
        v = strong_positivity(mu)
        assert v.strongly_positive
        assert v.delta_eigenvalues.shape == (32,)

    def test_requires_grade2(self):
        values = np.zeros(8)
        values[7] = 1
        with pytest.raises(NotGrade2Additive):
            strong_positivity(QMeasure(EventSpace.of_size(3), values))


class TestReconstruction:
    def test_additive(self):
        p = np.array([0.25, 0.5, 0.25])
        mu = QMeasure(EventSpace.of_size(3), indicator_matrix(3) @ p)
        rep = build_qmeasure_rep(mu)
        np.testing.assert_allclose(norms_squared(rep), mu.values, atol=1e-12)
        G = rep.gram()
        np.testing.assert_allclose(G - np.diag(np.diag(G)), 0, atol=1e-12)

    def test_planar_configuration(self):
        mu = three_atom_qmeasure()
        rep = build_qmeasure_rep(mu)
        assert rep.dim == 2
        G = rep.gram()
        np.testing.assert_allclose(np.diag(G).real, 1, atol=1e-12)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert G[i, j].real == pytest.approx(-0.5, abs=1e-12)
        assert np.linalg.norm(rep.event_vector(7)) ** 2 < 1e-12
        np.testing.assert_allclose(norms_squared(rep), mu.values, atol=1e-12)

    def test_rank_one(self, rng):
        # a common phase keeps Re(nu nu*) at rank one
        nu = np.exp(0.3j) * rng.standard_normal((4, 1))
        mu = qmeasure_from_vectors(nu)
        rep = build_qmeasure_rep(mu)
        assert rep.dim == 1
        np.testing.assert_allclose(norms_squared(rep), mu.values, atol=1e-12)

    def test_complex_amplitude_needs_two_dimensions(self, rng):
        # Re and Im parts of nu span a real plane
        nu = complex_normal(rng, 4, 1)
        rep = build_qmeasure_rep(qmeasure_from_vectors(nu))
        assert rep.dim == 2
        np.testing.assert_allclose(norms_squared(rep), qmeasure_from_vectors(nu).values, atol=1e-12)

    def test_not_strongly_positive(self):
        with pytest.raises(NotStronglyPositive):
            build_qmeasure_rep(interference_only_qmeasure())


class TestPairIdentity:
    def test_pair_is_trivial(self, rng):
        mu = random_qmeasure(rng, 4)
        v = pair_reconstruction_identity(mu, 0b0110)
        assert v.holds and v.lhs == v.rhs

    def test_second_example(self):
        v = pair_reconstruction_identity(three_atom_qmeasure(), 0b111)
        assert v.holds
        assert (v.lhs, v.rhs) == (0, 0)

    def test_random_tables(self, rng):
        for _ in range(50):
            mu = random_qmeasure(rng, 5)
            for A in range(32):
                if bin(A).count("1") >= 2:
                    v = pair_reconstruction_identity(mu, A)
                    assert abs(v.lhs - v.rhs) < 1e-10 and v.holds

    def test_fails_without_grade2(self):
        values = np.zeros(8)
        values[7] = 1
        v = pair_reconstruction_identity(QMeasure(EventSpace.of_size(3), values), 7)
        assert not v.holds


def test_quadratic_form_rejects_negative():
    with pytest.raises(ValueError):
        qmeasure_from_quadratic_form(np.array([[1.0, -2.0], [-2.0, 1.0]]))


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 8))
def test_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    mu = random_qmeasure(rng, n)
    v = strong_positivity(mu)
    if v.strongly_positive:
        rep = build_qmeasure_rep(mu)
        err = np.max(np.abs(norms_squared(rep) - mu.values))
        assert err <= 1e-9 * max(1, mu.values.max())
    else:
        with pytest.raises(NotStronglyPositive):
            build_qmeasure_rep(mu)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 7), dim=st.integers(1, 4))
def test_vector_measure_forward_direction(seed, n, dim):
    rng = np.random.default_rng(seed)
    V = complex_normal(rng, n, dim)
    mu = qmeasure_from_vectors(V)
    assert grade2_check(mu).holds
    assert strong_positivity(mu).strongly_positive
    EV = indicator_matrix(n) @ V
    re_gram = (EV @ EV.conj().T).real
    scale = max(1, mu.values.max())
    assert np.max(np.abs(delta_matrix(mu) - re_gram)) <= 1e-9 * scale
