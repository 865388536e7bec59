import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfkit.errors import NotHermitian, NotPSD, NotSquare
from dfkit.generators import complex_normal, random_psd, random_unitary
from dfkit.linalg import (
    Tolerance,
    gram,
    gram_factorize,
    hermitian_eigen,
    inner,
    is_unitary,
    numerical_rank,
    psd_check,
)

SEC3 = np.array([[1, 1], [1, 2]]) / 5
SWAP = np.array([[0, 1], [1, 0]])
ANTI3 = np.array([[1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def test_inner_is_linear_in_first_slot():
    x = np.array([1j, 0])
    y = np.array([1, 0])
    assert inner(2j * x, y) == 2j * inner(x, y)
    assert inner(x, 2j * y) == -2j * inner(x, y)


class TestHermitianEigen:
    def test_identity(self):
        w, _ = hermitian_eigen(np.eye(2))
        np.testing.assert_allclose(w, [1, 1])

    def test_swap_matrix(self):
        w, _ = hermitian_eigen(SWAP)
        np.testing.assert_allclose(w, [1, -1], atol=1e-15)

    def test_random_reconstruction(self, rng):
        A = complex_normal(rng, 6, 6)
        M = A + A.conj().T
        w, V = hermitian_eigen(M)
        assert np.all(np.diff(w) <= 0)
        assert np.max(np.abs(V @ np.diag(w) @ V.conj().T - M)) < 1e-10
        assert np.max(np.abs(V.conj().T @ V - np.eye(6))) < 1e-12

    def test_rejects_non_square(self):
        with pytest.raises(NotSquare):
            hermitian_eigen(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eigen(np.array([[0, 1], [0, 0]]))

    def test_symmetrizes_small_asymmetry(self):
        M = np.array([[1, 1e-12], [0, 1]])
        w, _ = hermitian_eigen(M)
        np.testing.assert_allclose(w, [1 + 5e-13, 1 - 5e-13], atol=1e-15)


class TestPSDCheck:
    def test_swap_not_psd(self):
        v = psd_check(SWAP)
        assert not v.is_psd
        assert v.min_eigenvalue == pytest.approx(-1)

    def test_three_atom_unhalved_not_psd(self):
        v = psd_check(ANTI3)
        assert not v.is_psd
        np.testing.assert_allclose(v.eigenvalues, [2, 2, -1], atol=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_identity(self, n):
        v = psd_check(np.eye(n))
        assert v.is_psd and v.min_eigenvalue == pytest.approx(1)


class TestNumericalRank:
    def test_sec3_matrix_full_rank(self):
        # det = 1/25 > 0 and trace > 0, so both eigenvalues are positive
        assert np.linalg.det(SEC3) == pytest.approx(1 / 25)
        assert numerical_rank(SEC3) == 2

    def test_all_ones(self):
        assert numerical_rank(np.ones((3, 3))) == 1

    def test_zero(self):
        assert numerical_rank(np.zeros((4, 4))) == 0


class TestGramFactorize:
    def test_sec3_values(self):
        e = gram_factorize(SEC3)
        assert e.shape == (2, 2)
        assert inner(e[0], e[0]) == pytest.approx(0.2, abs=1e-14)
        assert inner(e[0], e[1]) == pytest.approx(0.2, abs=1e-14)
        assert inner(e[1], e[1]) == pytest.approx(0.4, abs=1e-14)

    def test_identity_orthonormal(self):
        e = gram_factorize(np.eye(4))
        np.testing.assert_allclose(gram(e), np.eye(4), atol=1e-14)

    def test_random_reconstruction(self, rng):
        A = complex_normal(rng, 5, 5)
        D = A.conj().T @ A
        e = gram_factorize(D)
        recomputed = np.array([[inner(e[i], e[j]) for j in range(5)] for i in range(5)])
        assert np.max(np.abs(recomputed - D)) < 1e-10

    def test_rank_deficient_dimension(self, rng):
        D = random_psd(rng, 6, rank=2)
        e = gram_factorize(D)
        assert e.shape == (6, 2)
        assert numerical_rank(gram(e)) == 2

    def test_zero_matrix_gives_dim_zero(self):
        e = gram_factorize(np.zeros((3, 3)))
        assert e.shape == (3, 0)
        np.testing.assert_array_equal(gram(e), np.zeros((3, 3)))

    def test_not_psd(self):
        with pytest.raises(NotPSD) as info:
            gram_factorize(SWAP)
        assert info.value.violations[0]["min_eigenvalue"] == pytest.approx(-1)


class TestIsUnitary:
    def test_identity(self):
        assert is_unitary(np.eye(3))

    def test_scaling(self):
        assert not is_unitary(np.diag([1, 2]))

    def test_dft2(self):
        U = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        # U*U = (1/2)[[2, 0], [0, 2]] = I
        assert is_unitary(U)

    def test_not_square(self):
        with pytest.raises(NotSquare):
            is_unitary(np.ones((2, 3)))

    def test_haar(self, rng):
        assert is_unitary(random_unitary(rng, 5))


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 8), rank=st.integers(0, 8))
def test_gram_round_trip_property(seed, n, rank):
    rng = np.random.default_rng(seed)
    M = random_psd(rng, n, min(rank, n)) * rng.uniform(0.1, 10)
    e = gram_factorize(M)
    G = gram(e)
    assert np.max(np.abs(G - M)) <= 1e-9 * max(1, np.max(np.abs(M)))
    assert numerical_rank(G) == numerical_rank(M)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 6), c=st.floats(1e-3, 1e3), psd=st.booleans())
def test_psd_verdict_scale_covariant(seed, n, c, psd):
    rng = np.random.default_rng(seed)
    M = random_psd(rng, n) + 0.1 * np.eye(n)
    if not psd:
        M = M - (np.linalg.eigvalsh(M)[0] + 0.5) * np.eye(n)
    assert psd_check(c * M).is_psd == psd_check(M).is_psd == psd


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 10))
def test_eigenvalue_sum_is_trace(seed, n):
    rng = np.random.default_rng(seed)
    A = complex_normal(rng, n, n)
    M = A + A.conj().T
    w, _ = hermitian_eigen(M)
    tr = np.trace(M).real
    assert abs(w.sum() - tr) <= 1e-10 * max(1, abs(tr))


def test_tolerance_rejects_negative():
    with pytest.raises(ValueError):
        Tolerance(rel=-1)
