"""Measurements: square-root, Helstrom, MPE fixed point, factorization."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from jdrlab import (
    Codebook,
    ProjectiveMeasurement,
    accessible_information,
    alphabet_of,
    bpsk_codebook,
    complete_basis,
    direct_outcome_distribution,
    factor_measurement,
    factored_outcome_distribution,
    factorization_residuals,
    gram,
    helstrom_binary,
    mpe_fixed_point,
    outcome_probabilities,
    single_symbol_codebook,
    square_root_measurement,
)
from jdrlab.exceptions import ConvergenceError, RankDeficiencyError
from jdrlab.optics import random_bpsk_codebook, two_symbol_codebook


def helstrom_oracle(gamma, p0):
    return 0.5 * (1 - math.sqrt(1 - 4 * p0 * (1 - p0) * gamma * gamma))


def srm_probabilities_oracle(cb):
    """P(j|k) = |(G_w^{1/2})_{jk}|^2 / p_k via the weighted-Gram square root."""
    gw = gram(cb, weighted=True).entries
    lam, vec = np.linalg.eigh(gw)
    root = vec @ np.diag(np.sqrt(np.clip(lam, 0, None))) @ vec.conj().T
    return (np.abs(root) ** 2 / cb.priors[None, :]).T


def h2(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x) if 0 < x < 1 else 0.0


class TestHelstromBinary:
    def test_orthogonal_states(self):
        assert helstrom_binary(0.0, 0.5) == 0.0

    def test_certain_prior(self):
        assert helstrom_binary(0.7, 1.0) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("gamma,p0", [(0.3, 0.5), (0.9, 0.2), (0.5, 0.7)])
    def test_closed_form(self, gamma, p0):
        assert_allclose(helstrom_binary(gamma, p0), helstrom_oracle(gamma, p0),
                        rtol=1e-14)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            helstrom_binary(1.2, 0.5)
        with pytest.raises(ValueError):
            helstrom_binary(0.5, -0.1)


class TestSquareRootMeasurement:
    def test_near_orthogonal_identity_outcomes(self):
        cb = Codebook([[6.0], [-6.0]])
        _, outcomes = square_root_measurement(cb)
        assert_allclose(outcomes.probabilities, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 0.9])
    def test_binary_error_attains_helstrom(self, gamma):
        nbar = -math.log(gamma) / 2
        cb = bpsk_codebook(math.sqrt(nbar))
        _, outcomes = square_root_measurement(cb)
        error = 1 - outcomes.success_probability(cb.priors)
        assert_allclose(error, helstrom_oracle(gamma, 0.5), atol=1e-10)

    def test_matches_weighted_gram_square_root(self):
        rng = np.random.default_rng(17)
        words = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        pri = rng.random(4)
        cb = Codebook(list(words), pri / pri.sum())
        _, outcomes = square_root_measurement(cb)
        assert_allclose(outcomes.probabilities, srm_probabilities_oracle(cb),
                        atol=1e-10)

    def test_hadamard_codebook_geometric_uniformity(self):
        from jdrlab.optics import hadamard_codebook
        cb = hadamard_codebook(3, math.sqrt(0.1))
        _, outcomes = square_root_measurement(cb)
        diag = np.diagonal(outcomes.probabilities)
        assert np.ptp(diag) < 1e-10

    def test_measurement_vectors_orthonormal(self):
        cb = two_symbol_codebook(math.sqrt(0.2), 0.3)
        measurement, _ = square_root_measurement(cb)
        v = measurement.vectors
        assert_allclose(v @ v.conj().T, np.eye(3), atol=1e-12)

    def test_rank_deficient_rejected(self):
        with pytest.raises(RankDeficiencyError):
            square_root_measurement(Codebook([[0.4], [0.4]]))

    def test_codeword_permutation_equivariance(self):
        nbar = 0.2
        a = math.sqrt(nbar)
        words = [[a, a], [a, -a], [-a, a]]
        pri = [0.5, 0.3, 0.2]
        _, base = square_root_measurement(Codebook(words, pri))
        perm = [2, 0, 1]
        _, permuted = square_root_measurement(
            Codebook([words[i] for i in perm], [pri[i] for i in perm]))
        want = base.probabilities[np.ix_(perm, perm)]
        assert_allclose(permuted.probabilities, want, atol=1e-12)


class TestMpeFixedPoint:
    def test_binary_matches_helstrom(self):
        nbar = 0.1
        cb = bpsk_codebook(math.sqrt(nbar))
        res = mpe_fixed_point(cb, tol=1e-8)
        want = helstrom_oracle(math.exp(-2 * nbar), 0.5)
        assert abs((1 - res.success_probability) - want) < 1e-8
        assert res.certificate >= -1e-8

    def test_unequal_prior_binary(self):
        nbar = 0.15
        cb = bpsk_codebook(math.sqrt(nbar), p0=0.75)
        res = mpe_fixed_point(cb, tol=1e-9, max_iter=5000)
        want = helstrom_oracle(math.exp(-2 * nbar), 0.75)
        assert abs((1 - res.success_probability) - want) < 1e-8

    def test_beats_square_root_measurement(self):
        cb = two_symbol_codebook(math.sqrt(0.08), 1 / 3)
        _, srm = square_root_measurement(cb)
        res = mpe_fixed_point(cb, tol=1e-8)
        assert res.success_probability >= srm.success_probability(cb.priors) - 1e-8

    def test_near_orthogonal_triple_zero_error(self):
        cb = Codebook([[6.0, 6.0], [6.0, -6.0], [-6.0, 6.0]])
        res = mpe_fixed_point(cb)
        assert 1 - res.success_probability < 1e-12

    def test_success_history_nondecreasing(self):
        res = mpe_fixed_point(two_symbol_codebook(math.sqrt(0.05), 0.45), tol=1e-10,
                              max_iter=5000)
        assert np.all(np.diff(res.success_history) >= -1e-12)

    def test_iteration_cap_raises_and_carries_best(self):
        with pytest.raises(ConvergenceError) as exc:
            mpe_fixed_point(two_symbol_codebook(math.sqrt(0.05), 1 / 3),
                            tol=1e-13, max_iter=2)
        assert exc.value.result is not None
        assert exc.value.result.success_probability > 0.5

    def test_single_state_rejected(self):
        with pytest.raises(ValueError):
            mpe_fixed_point(Codebook([[0.3]]))

    def test_rank_deficient_rejected(self):
        with pytest.raises(RankDeficiencyError):
            mpe_fixed_point(Codebook([[0.3], [0.3]]))

    def test_warm_start_from_previous_solution(self):
        cb = two_symbol_codebook(math.sqrt(0.05), 0.4)
        cold = mpe_fixed_point(cb, tol=1e-9, max_iter=5000)
        warm = mpe_fixed_point(cb, tol=1e-9, max_iter=5000,
                               initial=cold.measurement)
        assert warm.iterations <= 1
        assert_allclose(warm.success_probability, cold.success_probability,
                        atol=1e-10)

    def test_warm_start_shape_checked(self):
        cb = two_symbol_codebook(math.sqrt(0.05), 0.4)
        other = square_root_measurement(bpsk_codebook(0.4))[0]
        with pytest.raises(ValueError):
            mpe_fixed_point(cb, initial=other)


class TestAccessibleInformation:
    def test_near_orthogonal_pair_one_bit(self):
        cb = Codebook([[6.0], [-6.0]])
        measurement, _ = square_root_measurement(cb)
        assert_allclose(accessible_information(cb, measurement), 1.0, atol=1e-10)

    def test_binary_mpe_capacity(self):
        nbar = 0.2
        cb = bpsk_codebook(math.sqrt(nbar))
        res = mpe_fixed_point(cb, tol=1e-10, max_iter=5000)
        q = helstrom_oracle(math.exp(-2 * nbar), 0.5)
        assert_allclose(accessible_information(cb, res.measurement), 1 - h2(q),
                        atol=1e-9)

    def test_blind_single_vector_measurement_yields_nothing(self):
        # both codewords share one span direction; measure the orthogonal one
        cb = Codebook([[0.4], [0.4]])
        blind = ProjectiveMeasurement(np.array([[0.0, 1.0]], dtype=complex))
        assert accessible_information(cb, blind) == pytest.approx(0.0, abs=1e-12)

    def test_outcome_probabilities_row_stochastic(self):
        cb = two_symbol_codebook(math.sqrt(0.3), 0.25)
        measurement, _ = square_root_measurement(cb)
        probs = outcome_probabilities(measurement, cb)
        assert_allclose(probs.sum(axis=1), np.ones(3), atol=1e-10)

    def test_outcome_probabilities_raw_option(self):
        # without completion a partial measurement leaves probability behind
        cb = bpsk_codebook(0.4)
        full, _ = square_root_measurement(cb)
        partial = ProjectiveMeasurement(full.vectors[:1])
        raw = outcome_probabilities(partial, cb, complete=False)
        assert raw.shape == (2, 1)
        assert raw.sum(axis=1).max() < 1.0
        completed = outcome_probabilities(partial, cb)
        assert completed.shape == (2, 2)
        assert_allclose(completed.sum(axis=1), np.ones(2), atol=1e-12)

    def test_measurement_on_narrower_span_rejected(self):
        cb = two_symbol_codebook(math.sqrt(0.3), 0.25)
        binary, _ = square_root_measurement(bpsk_codebook(0.4))
        with pytest.raises(ValueError):
            outcome_probabilities(binary, cb)


class TestCompleteBasis:
    def test_full_basis_unchanged(self):
        basis = np.eye(3, dtype=complex)
        assert_allclose(complete_basis(basis), basis)

    def test_extends_partial_rows(self):
        cb = two_symbol_codebook(1.0, 1 / 3)
        measurement, _ = square_root_measurement(cb)
        partial = np.hstack([measurement.vectors,
                             np.zeros((3, 1), dtype=complex)])
        full = complete_basis(partial)
        assert full.shape == (4, 4)
        assert_allclose(full[:3], partial, atol=1e-12)
        assert_allclose(full @ full.conj().T, np.eye(4), atol=1e-10)

    def test_empty_partial_gives_any_orthonormal_basis(self):
        full = complete_basis(np.zeros((0, 3), dtype=complex), dim=3)
        assert_allclose(full @ full.conj().T, np.eye(3), atol=1e-12)

    def test_dimension_overflow(self):
        with pytest.raises(ValueError):
            complete_basis(np.eye(4)[:, :3])

    def test_non_orthonormal_rejected(self):
        with pytest.raises(ValueError):
            complete_basis(np.array([[1.0, 1.0]]) / 1.1)


def _symbol_measurement_for(cb):
    return square_root_measurement(single_symbol_codebook(alphabet_of(cb)))[0]


class TestFactorMeasurement:
    @pytest.mark.parametrize("length,size,seed", [(2, 3, 0), (2, 4, 1), (3, 4, 2),
                                                  (3, 8, 3)])
    def test_factored_equals_direct(self, length, size, seed):
        cb = random_bpsk_codebook(length, size, alpha=1.0, seed=seed)
        fm = factor_measurement(cb, _symbol_measurement_for(cb))
        direct = direct_outcome_distribution(fm, cb)
        factored = factored_outcome_distribution(fm, cb)
        tv = 0.5 * np.abs(direct - factored).sum(axis=1).max()
        assert tv < 1e-10
        assert_allclose(direct.sum(axis=1), np.ones(size), atol=1e-10)

    def test_unitarity(self):
        cb = random_bpsk_codebook(3, 4, alpha=0.8, seed=5)
        fm = factor_measurement(cb, _symbol_measurement_for(cb))
        u = fm.unitary
        assert np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() < 1e-10

    def test_codeword_outcomes_match_srm(self):
        # the joint basis starts with the square-root-measurement vectors, so
        # the first K outcome columns must reproduce the span-space statistics
        cb = random_bpsk_codebook(2, 3, alpha=0.7, seed=9)
        fm = factor_measurement(cb, _symbol_measurement_for(cb))
        direct = direct_outcome_distribution(fm, cb)
        _, srm = square_root_measurement(cb)
        assert_allclose(direct[:, :cb.size], srm.probabilities, atol=1e-10)

    def test_residual_helper_agrees(self):
        cb = random_bpsk_codebook(2, 4, alpha=1.2, seed=4)
        fm = factor_measurement(cb, _symbol_measurement_for(cb))
        tv, unit = factorization_residuals(fm, cb)
        assert tv < 1e-10
        assert unit < 1e-10

    def test_near_orthogonal_codebook_gives_permutation_unitary(self):
        # strongly distinguishable symbols: codewords are already product
        # measurement vectors, so the unitary reduces to a signed permutation
        cb = random_bpsk_codebook(2, 4, alpha=3.5, seed=2)
        fm = factor_measurement(cb, _symbol_measurement_for(cb))
        mags = np.abs(fm.unitary)
        perm_defect = np.abs(np.sort(mags, axis=1)[:, :-1]).max()
        assert perm_defect < 1e-6
        assert_allclose(np.sort(mags, axis=1)[:, -1], np.ones(4), atol=1e-6)

    def test_dimension_cap(self):
        cb = random_bpsk_codebook(4, 4, alpha=1.0, seed=0)
        with pytest.raises(ValueError):
            factor_measurement(cb, _symbol_measurement_for(cb), dimension_cap=8)

    def test_duplicate_codewords_rejected(self):
        cb = Codebook([[1.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
        with pytest.raises(RankDeficiencyError):
            factor_measurement(cb, _symbol_measurement_for(cb))

    def test_mpe_joint_basis_option(self):
        cb = random_bpsk_codebook(2, 3, alpha=0.6, seed=3)
        fm = factor_measurement(cb, _symbol_measurement_for(cb),
                                joint_basis="mpe")
        tv, unit = factorization_residuals(fm, cb)
        assert tv < 1e-10
        assert unit < 1e-10
        # leading outcomes now reproduce the minimum-error statistics
        direct = direct_outcome_distribution(fm, cb)
        res = mpe_fixed_point(cb)
        assert_allclose(direct[:, :cb.size], res.outcomes.probabilities,
                        atol=1e-10)

    def test_unknown_joint_basis_rejected(self):
        cb = random_bpsk_codebook(2, 3, alpha=0.6, seed=3)
        with pytest.raises(ValueError):
            factor_measurement(cb, _symbol_measurement_for(cb),
                               joint_basis="random")
