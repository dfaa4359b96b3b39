import math

import numpy as np
import pytest

from entcert.bases import BasisPair, computational_basis, named_pair, sigma_x_basis
from entcert.errors import DimensionError, EmptyDataError, NumericalError
from entcert.measure import (
    DEFAULT_N_TOTAL,
    CountsTable,
    JointProbTable,
    joint_probabilities,
    normalize_counts,
    simulate_counts,
)
from entcert.states import max_entangled, random_separable, rho_a, rho_c, rho_w

S14_COUNTS = np.array([[1000, 4000], [4500, 500]])


def brute_joint(rho, pair):
    """<a|<b| rho |a>|b> with explicit Kronecker products."""
    d = pair.dim
    out = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            v = np.kron(pair.system1.vectors[a], pair.system2.vectors[b])
            out[a, b] = np.real(v.conj() @ rho.matrix @ v)
    return out


class TestJointProbabilities:
    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("p", [0.0, 0.4, 1.0])
    def test_werner_computational(self, d, p):
        cells = joint_probabilities(rho_w(d, p), named_pair("comp", d)).cells
        expected = p / d * np.eye(d) + (1 - p) / d**2
        np.testing.assert_allclose(cells, expected, atol=1e-14)

    @pytest.mark.parametrize("d", [3, 4, 5, 8])
    def test_fourier_same_basis_is_anticorrelated(self, d):
        from entcert.bases import fourier_basis

        f = fourier_basis(d)
        cells = joint_probabilities(max_entangled(d), BasisPair(f, f)).cells
        expected = np.zeros((d, d))
        for k in range(d):
            expected[k, (-k) % d] = 1 / d
        np.testing.assert_allclose(cells, expected, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_sigma_x_perfectly_correlated(self, n):
        sx = sigma_x_basis(n)
        d = 2**n
        cells = joint_probabilities(max_entangled(d), BasisPair(sx, sx)).cells
        np.testing.assert_allclose(cells, np.eye(d) / d, atol=1e-12)

    @pytest.mark.parametrize("name", ["comp", "sx", "fourier", "sy"])
    def test_matches_brute_force(self, name, rng):
        d = 4
        rho = random_separable(d, rng)
        pair = named_pair(name, d)
        np.testing.assert_allclose(joint_probabilities(rho, pair).cells, brute_joint(rho, pair), atol=1e-13)

    def test_rho_a_against_brute_force(self):
        pair = named_pair("fourier", 8)
        rho = rho_a(8, 0.3)
        np.testing.assert_allclose(joint_probabilities(rho, pair).cells, brute_joint(rho, pair), atol=1e-13)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_system1_marginal_matches_reduced_state(self, d, rng):
        rho = random_separable(d, rng)
        r = rho.matrix.reshape(d, d, d, d)
        rho1 = np.einsum("ijkj->ik", r)
        for name in ("comp", "fourier"):
            pair = named_pair(name, d)
            A = pair.system1.vectors
            expected = np.real(np.einsum("ai,ik,ak->a", A.conj(), rho1, A))
            marg = joint_probabilities(rho, pair).marginals[0]
            np.testing.assert_allclose(marg, expected, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            joint_probabilities(max_entangled(2), named_pair("comp", 3))

    def test_broken_state_raises(self):
        from entcert.qcore import DensityMatrix

        bad = DensityMatrix(2 * max_entangled(2).matrix, 2)
        with pytest.raises(NumericalError):
            joint_probabilities(bad, named_pair("comp", 2))

    def test_labels_carried(self):
        t = joint_probabilities(rho_c(2, 0.5), named_pair("sx", 2))
        assert t.labels == ("sx", "sx*")


class TestJointProbTable:
    def test_clips_tiny_negatives(self):
        t = JointProbTable(np.array([[0.5, -1e-13], [0.0, 0.5]]))
        assert t.cells.min() == 0.0

    def test_rejects_negative(self):
        with pytest.raises(NumericalError):
            JointProbTable(np.array([[0.6, -0.1], [0.0, 0.5]]))

    def test_rejects_bad_sum(self):
        with pytest.raises(NumericalError):
            JointProbTable(np.full((2, 2), 0.3))

    def test_sum_tolerance_edge(self):
        tiny = np.array([[0.5, 0.0], [0.0, 0.5 + 5e-11]])
        np.testing.assert_allclose(JointProbTable(tiny).cells.sum(), 1.0, atol=1e-15)
        with pytest.raises(NumericalError):
            JointProbTable(np.array([[0.5, 0.0], [0.0, 0.5 + 1e-9]]))


class TestSimulateCounts:
    def test_single_cell(self):
        t = JointProbTable(np.array([[1.0, 0], [0, 0]]))
        c = simulate_counts(t, 10000, seed=3)
        assert c.counts[0, 1] == c.counts[1, 0] == c.counts[1, 1] == 0
        # Poisson(10000): mean 10000, sd 100
        assert abs(c.counts[0, 0] - 10000) < 600

    def test_deterministic_for_fixed_seed(self):
        t = joint_probabilities(rho_w(4, 0.6), named_pair("comp", 4))
        a = simulate_counts(t, 8000, seed=11)
        b = simulate_counts(t, 8000, seed=11)
        np.testing.assert_array_equal(a.counts, b.counts)
        assert a.seed == 11 and a.n_nominal == 8000

    def test_default_total(self):
        assert DEFAULT_N_TOTAL == 8000

    def test_mean_within_five_standard_errors(self):
        t = joint_probabilities(rho_w(2, 0.7), named_pair("comp", 2))
        n = 10**6
        rng = np.random.default_rng(5)
        draws = np.array([simulate_counts(t, n, rng).counts for _ in range(1000)], dtype=float)
        mean = draws.mean(axis=0)
        se = np.sqrt(n * t.cells / 1000)
        assert np.all(np.abs(mean - n * t.cells) < 5 * se)

    def test_rejects_zero_total(self):
        with pytest.raises(ValueError):
            simulate_counts(JointProbTable(np.eye(2) / 2), 0)


class TestNormalizeCounts:
    def test_worked_example_probabilities(self):
        table, _ = normalize_counts(CountsTable(S14_COUNTS))
        np.testing.assert_allclose(table.cells.ravel(), [0.10, 0.40, 0.45, 0.05], atol=1e-15)

    def test_worked_example_uncertainties(self):
        _, dp = normalize_counts(CountsTable(S14_COUNTS))
        expected = [
            0.10 * (math.sqrt(1000) / 1000 + math.sqrt(10000) / 10000),
            0.40 * (math.sqrt(4000) / 4000 + math.sqrt(10000) / 10000),
            0.45 * (math.sqrt(4500) / 4500 + math.sqrt(10000) / 10000),
            0.05 * (math.sqrt(500) / 500 + math.sqrt(10000) / 10000),
        ]
        np.testing.assert_allclose(dp.ravel(), expected, rtol=1e-14)

    def test_uniform(self):
        table, dp = normalize_counts(CountsTable(np.full((2, 2), 2500)))
        np.testing.assert_allclose(table.cells, 0.25)
        np.testing.assert_allclose(dp, 0.25 * (1 / 50 + 1 / 100), rtol=1e-14)

    def test_single_cell(self):
        n = 40000
        table, dp = normalize_counts(CountsTable(np.array([[n, 0], [0, 0]])))
        assert table.cells[0, 0] == 1.0
        assert dp[0, 0] == pytest.approx(2 / math.sqrt(n))
        assert dp[1, 1] == 0.0

    def test_empty(self):
        with pytest.raises(EmptyDataError):
            normalize_counts(CountsTable(np.zeros((2, 2), dtype=int)))

    def test_counts_validation(self):
        with pytest.raises(ValueError):
            CountsTable(np.array([[1, -1], [0, 0]]))
        with pytest.raises(ValueError):
            CountsTable(np.array([[1.5, 0], [0, 0]]))
