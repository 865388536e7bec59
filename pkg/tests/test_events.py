import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfkit.errors import EventOutOfRange
from dfkit.events import (
    EventSpace,
    QMeasure,
    delta,
    delta_matrix,
    disjoint_pair_arrays,
    enumerate_disjoint_triples,
    grade2_check,
    grade2_pairwise_check,
    indicator_matrix,
    interference,
)
from dfkit.fixtures import interference_only_qmeasure, three_atom_qmeasure
from dfkit.generators import complex_normal, qmeasure_from_vectors, random_qmeasure

import oracles


def additive(p):
    n = len(p)
    return QMeasure(EventSpace.of_size(n), indicator_matrix(n) @ np.asarray(p, dtype=float))


def from_table(values):
    n = int(np.log2(len(values)))
    return QMeasure(EventSpace.of_size(n), values)


class TestEventSpace:
    def test_empty_space_rejected(self):
        with pytest.raises(ValueError):
            EventSpace(())

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            EventSpace(("a", "a"))

    def test_max_atoms(self):
        with pytest.raises(ValueError):
            EventSpace.of_size(13)
        assert EventSpace.of_size(13, max_atoms=13).n == 13

    def test_bitmask_encoding(self):
        S = EventSpace(("a", "b", "c"))
        assert S.event(["a", "c"]) == 0b101
        assert S.event([1]) == 0b010
        assert S.members(0b110) == [1, 2]
        assert S.complement(0b001) == 0b110
        assert S.describe(0b011) == "{a,b}"

    @pytest.mark.parametrize("A", [-1, 8, 1.5])
    def test_out_of_range(self, A):
        with pytest.raises(EventOutOfRange):
            EventSpace.of_size(3).check(A)


class TestTriples:
    @pytest.mark.parametrize("n,count", [(1, 4), (2, 16), (3, 64)])
    def test_counts(self, n, count):
        triples = list(enumerate_disjoint_triples(EventSpace.of_size(n)))
        assert len(triples) == count
        assert len(set(triples)) == count
        assert all(not (A & B or A & C or B & C) for A, B, C in triples)

    def test_n1_by_hand(self):
        assert sorted(enumerate_disjoint_triples(EventSpace.of_size(1))) == [
            (0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]

    def test_pairs(self):
        A, B = disjoint_pair_arrays(3)
        assert len(A) == 27
        assert not np.any(A & B)


class TestQMeasure:
    def test_empty_must_vanish(self):
        with pytest.raises(ValueError):
            QMeasure(EventSpace.of_size(1), [0.1, 1])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            QMeasure(EventSpace.of_size(1), [0, -1])

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            QMeasure(EventSpace.of_size(2), [0, 1, 1])


class TestGrade2:
    def test_additive_measure(self):
        mu = additive([0.2, 0.3, 0.5])
        assert grade2_check(mu).holds
        assert grade2_pairwise_check(mu).holds

    def test_complex_measure_modulus_squared(self, rng):
        nu = complex_normal(rng, 4, 1)
        mu = qmeasure_from_vectors(nu)
        f = oracles.set_function(mu.values, 4)
        # oracle recomputes |nu(A)|^2 from the raw sums
        g = lambda S: abs(sum(nu[i, 0] for i in S)) ** 2
        assert all(abs(f(S) - g(S)) < 1e-12 for S in oracles.subsets(4))
        assert oracles.grade2_residual(g, 4) < 1e-12
        assert grade2_check(mu).holds

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_cardinality_squared(self, n):
        mu = QMeasure.from_function(EventSpace.of_size(n), lambda A: bin(A).count("1") ** 2)
        assert oracles.grade2_residual(lambda S: len(S) ** 2, n) == 0
        assert grade2_check(mu).holds
        assert grade2_pairwise_check(mu).holds

    def test_top_only_fails_with_witness(self):
        values = np.zeros(8)
        values[7] = 1
        v = grade2_check(from_table(values))
        assert not v.holds
        assert v.worst_violation == 1
        assert v.witness == (0b001, 0b010, 0b100)

    def test_exhaustive_agreement_small(self):
        # every 0/1 table on two atoms with mu(empty) = 0
        for bits in range(8):
            values = [0] + [(bits >> k) & 1 for k in range(3)]
            mu = from_table(values)
            assert grade2_check(mu).holds == grade2_pairwise_check(mu).holds

    def test_random_four_atom_agreement(self, rng):
        agree = 0
        for t in range(1000):
            if t % 2:
                mu = random_qmeasure(rng, 4)
            else:
                mu = from_table(np.concatenate([[0], rng.uniform(0, 1, 15)]))
            a, b = grade2_check(mu), grade2_pairwise_check(mu)
            agree += a.holds == b.holds
        assert agree == 1000

    def test_residual_matches_oracle(self, rng):
        for _ in range(5):
            mu = from_table(np.concatenate([[0], rng.uniform(0, 1, 15)]))
            f = oracles.set_function(mu.values, 4)
            assert grade2_check(mu).worst_violation == pytest.approx(oracles.grade2_residual(f, 4), abs=1e-14)


class TestInterference:
    def test_first_example(self):
        data = interference(interference_only_qmeasure())
        np.testing.assert_array_equal(data.I, [[0, 1], [1, 0]])
        np.testing.assert_array_equal(data.Dmat, [[0, 0.5], [0.5, 0]])
        np.testing.assert_array_equal(data.unhalved, [[0, 1], [1, 0]])

    def test_second_example(self):
        data = interference(three_atom_qmeasure())
        expected_I = -(np.ones((3, 3)) - np.eye(3))
        np.testing.assert_array_equal(data.I, expected_I)
        np.testing.assert_array_equal(data.Dmat, np.eye(3) + expected_I / 2)
        np.testing.assert_array_equal(data.unhalved, np.eye(3) + expected_I)

    def test_additive_has_no_interference(self):
        data = interference(additive([1, 2, 3, 4]))
        np.testing.assert_array_equal(data.I, np.zeros((4, 4)))
        np.testing.assert_array_equal(data.Dmat, np.diag([1, 2, 3, 4]))


class TestDelta:
    def test_diagonal(self, rng):
        mu = random_qmeasure(rng, 4)
        for A in range(16):
            assert delta(mu, A, A) == pytest.approx(mu(A), abs=1e-12)

    def test_atoms_give_half_interference(self, rng):
        mu = random_qmeasure(rng, 4)
        data = interference(mu)
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert delta(mu, 1 << i, 1 << j) == pytest.approx(data.I[i, j] / 2, abs=1e-12)

    def test_additive_gives_intersection(self):
        mu = additive([0.1, 0.2, 0.3])
        for A in range(8):
            for B in range(8):
                assert delta(mu, A, B) == pytest.approx(mu(A & B), abs=1e-15)

    def test_matrix_matches_oracle(self, rng):
        mu = random_qmeasure(rng, 3)
        f = oracles.set_function(mu.values, 3)
        Dm = delta_matrix(mu)
        for A in oracles.subsets(3):
            for B in oracles.subsets(3):
                assert Dm[oracles.mask(A), oracles.mask(B)] == pytest.approx(oracles.delta(f, A, B, 3), abs=1e-12)

    def test_subset_of_events(self, rng):
        mu = random_qmeasure(rng, 3)
        ev = [1, 6, 7]
        np.testing.assert_allclose(delta_matrix(mu, ev), delta_matrix(mu)[np.ix_(ev, ev)])


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 6), quad=st.booleans())
def test_grade2_forms_agree(seed, n, quad):
    rng = np.random.default_rng(seed)
    if quad:
        mu = random_qmeasure(rng, n)
    else:
        mu = from_table(np.concatenate([[0], rng.uniform(0, 1, 2**n - 1)]))
    assert grade2_check(mu).holds == grade2_pairwise_check(mu).holds


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 5))
def test_delta_symmetric_and_additive(seed, n):
    rng = np.random.default_rng(seed)
    mu = random_qmeasure(rng, n)
    Dm = delta_matrix(mu)
    scale = max(1, mu(mu.space.full))
    assert np.max(np.abs(Dm - Dm.T)) <= 1e-12 * scale
    A, B = disjoint_pair_arrays(n)
    for C in range(2**n):
        err = np.abs(Dm[A | B, C] - Dm[A, C] - Dm[B, C])
        assert np.all(err <= 1e-9 * scale)


@settings(max_examples=30, deadline=None)
@given(p=st.lists(st.floats(0, 10), min_size=1, max_size=6))
def test_additive_dmat_diagonal(p):
    data = interference(additive(p))
    off = data.Dmat - np.diag(np.diag(data.Dmat))
    assert np.max(np.abs(off)) <= 1e-12 * max(1, sum(p))
