import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from entcert.errors import DimensionError, ShapeError
from entcert.qcore import (
    DensityMatrix,
    QubitPairMapping,
    apply_pair_mapping,
    tensor_product,
    validate_density,
)

PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


class TestTensorProduct:
    def test_identities(self):
        np.testing.assert_array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_separable_plus_plus(self):
        plus = np.array([1, 1]) / np.sqrt(2)
        np.testing.assert_allclose(tensor_product(plus, plus), np.full(4, 0.5), atol=1e-15)

    def test_first_operand_is_most_significant(self):
        e1 = np.array([0, 1])
        e0 = np.array([1, 0])
        # |1>|0> sits at index 1*2 + 0
        assert np.argmax(np.abs(tensor_product(e1, e0))) == 2

    def test_bell_pair_squared_after_mapping(self):
        out = apply_pair_mapping(tensor_product(PHI_PLUS, PHI_PLUS))
        expected = np.zeros(16)
        expected[[0, 5, 10, 15]] = 0.5
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_cap(self):
        with pytest.raises(DimensionError):
            tensor_product(np.eye(64), np.eye(128))

    @settings(max_examples=30, deadline=None)
    @given(
        arrays(np.int64, (2, 2), elements=st.integers(-50, 50)),
        arrays(np.int64, (3, 2), elements=st.integers(-50, 50)),
        arrays(np.int64, (2, 3), elements=st.integers(-50, 50)),
    )
    def test_associative_exact(self, a, b, c):
        # integer-valued entries: every product is exactly representable
        left = tensor_product(tensor_product(a, b), c)
        right = tensor_product(a, tensor_product(b, c))
        np.testing.assert_array_equal(left, right)

    @settings(max_examples=30, deadline=None)
    @given(
        arrays(np.float64, (2, 2), elements=st.floats(-3, 3)),
        arrays(np.float64, (2, 2), elements=st.floats(-3, 3)),
        arrays(np.float64, (2, 2), elements=st.floats(-3, 3)),
    )
    def test_associative_to_rounding(self, a, b, c):
        left = tensor_product(tensor_product(a, b), c)
        right = tensor_product(a, tensor_product(b, c))
        np.testing.assert_allclose(left, right, rtol=1e-15, atol=1e-300)


class TestPairMapping:
    def test_n1_is_identity(self):
        m = np.arange(16, dtype=complex).reshape(4, 4)
        np.testing.assert_array_equal(apply_pair_mapping(m), m)
        assert QubitPairMapping.interleaved(1).permutation == (0, 1)

    def test_mixed_state_mapping(self):
        cc = np.diag([0.5, 0, 0, 0.5])
        out = apply_pair_mapping(tensor_product(cc, cc))
        expected = np.zeros((16, 16))
        for j in range(4):
            expected[5 * j, 5 * j] = 0.25
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_n2_permutation(self):
        # slots (alpha beta gamma delta) -> (alpha gamma | beta delta)
        assert QubitPairMapping.interleaved(2).permutation == (0, 2, 1, 3)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_inverse_restores_exactly(self, n, rng):
        m = rng.normal(size=(4**n, 4**n)) + 1j * rng.normal(size=(4**n, 4**n))
        mp = QubitPairMapping.interleaved(n)
        back = apply_pair_mapping(apply_pair_mapping(m, mp), mp.inverse())
        np.testing.assert_array_equal(back, m)

    def test_preserves_spectrum(self, rng):
        g = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        out = apply_pair_mapping(rho)
        np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-12)
        assert np.trace(out) == pytest.approx(1.0)

    def test_density_matrix_kind_preserved(self):
        rho = DensityMatrix(np.eye(16) / 16, 4)
        assert isinstance(apply_pair_mapping(rho), DensityMatrix)

    @pytest.mark.parametrize("dim", [8, 9, 32])
    def test_not_power_of_four(self, dim):
        with pytest.raises(DimensionError):
            apply_pair_mapping(np.eye(dim))

    def test_not_a_bijection(self):
        with pytest.raises(ValueError):
            QubitPairMapping(2, (0, 0, 1, 2))


class TestValidateDensity:
    def test_maximally_mixed(self):
        rep = validate_density(DensityMatrix(np.eye(4) / 4, 2))
        assert rep.passed
        assert rep.min_eigenvalue == pytest.approx(0.25)

    def test_bell_projector(self):
        rep = validate_density(DensityMatrix.from_ket(PHI_PLUS, 2))
        assert rep.passed
        np.testing.assert_allclose(rep.eigenvalues, [0, 0, 0, 1], atol=1e-12)

    def test_shifted_bell_fails(self):
        m = np.outer(PHI_PLUS, PHI_PLUS) - 0.01 * np.eye(4)
        # eigenvalues of |Phi+><Phi+| - 0.01 I: {0.99, -0.01 (x3)}
        rep = validate_density(DensityMatrix(m, 2))
        assert not rep.passed
        assert rep.trace_defect == pytest.approx(0.04)
        assert rep.min_eigenvalue == pytest.approx(-0.01)

    def test_non_square(self):
        with pytest.raises(ShapeError):
            validate_density(np.ones((4, 3)))

    def test_non_hermitian_detected(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1j
        rep = validate_density(m)
        assert not rep.passed
        assert rep.hermiticity_defect == pytest.approx(0.1)


class TestDensityMatrix:
    def test_rejects_nan(self):
        m = np.eye(4) / 4
        m[0, 0] = np.nan
        with pytest.raises(ArithmeticError):
            DensityMatrix(m, 2)

    def test_immutable(self):
        rho = DensityMatrix(np.eye(4) / 4, 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            DensityMatrix(np.eye(9) / 9, 2)
