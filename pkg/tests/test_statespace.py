"""Coherent-state geometry: overlaps, Gram matrices, span bases, entropy."""

import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from jdrlab import (
    Codebook,
    Codeword,
    CoherentAmplitude,
    bpsk_codebook,
    codeword_inner,
    ensemble_entropy,
    gram,
    inner_product,
    orthonormalize,
    span_embedding,
)


def overlap_oracle(a, b):
    """Straight evaluation of exp(-|a|^2/2 - |b|^2/2 + conj(a) b)."""
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


def h2_oracle(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x) if 0 < x < 1 else 0.0


def hadamard_rows_oracle(l):
    """Sylvester +-1 rows via doubling, independent of the library's kron."""
    rows = [[1]]
    for _ in range(l):
        rows = [r + r for r in rows] + [r + [-v for v in r] for r in rows]
    return rows


class TestCoherentAmplitude:
    def test_mean_photons(self):
        amp = CoherentAmplitude(0.3 + 0.4j)
        assert_allclose(amp.mean_photons, 0.25)

    def test_identical_states_overlap_one(self):
        assert_allclose(inner_product(0.7 - 0.2j, 0.7 - 0.2j), 1.0, atol=1e-15)

    def test_antipodal_overlap(self):
        nbar = 0.37
        alpha = math.sqrt(nbar)
        assert_allclose(inner_product(alpha, -alpha), math.exp(-2 * nbar), rtol=1e-14)

    def test_vacuum_overlap(self):
        alpha = 0.9
        assert_allclose(inner_product(0, alpha), math.exp(-(alpha ** 2) / 2), rtol=1e-14)

    def test_against_oracle_and_bounded(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a, b = (complex(*v) for v in rng.normal(size=(2, 2)))
            got = inner_product(a, b)
            assert_allclose(got, overlap_oracle(a, b), rtol=1e-13)
            assert abs(got) <= 1.0 + 1e-12

    def test_accepts_wrapped_amplitudes(self):
        assert inner_product(CoherentAmplitude(0.5), CoherentAmplitude(0.5)) == \
            pytest.approx(1.0)


class TestCodewordInner:
    def test_identical(self):
        assert_allclose(codeword_inner([0.4, 0.4], [0.4, 0.4]), 1.0, atol=1e-15)

    def test_tensor_product_of_modes(self):
        alpha = math.sqrt(0.3)
        got = codeword_inner([alpha, alpha], [alpha, -alpha])
        assert_allclose(got, math.exp(-2 * 0.3), rtol=1e-13)

    def test_matches_per_mode_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            c1, c2 = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
            want = 1.0
            for a, b in zip(c1, c2):
                want *= overlap_oracle(complex(a), complex(b))
            assert_allclose(codeword_inner(c1, c2), want, rtol=1e-12)

    def test_hadamard_code_rows(self):
        # distance-4 rows of the (7, 8, 4) code contribute e^{-2 nbar} four times
        nbar = 0.09
        alpha = math.sqrt(nbar)
        rows = hadamard_rows_oracle(3)
        words = [[alpha * v for v in row[1:]] for row in rows]
        got = codeword_inner(words[1], words[2])
        assert_allclose(got, math.exp(-8 * nbar), rtol=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            codeword_inner([0.1], [0.1, 0.1])


class TestCodebook:
    def test_priors_default_uniform(self):
        cb = Codebook([[0.1], [0.2], [0.3]])
        assert_allclose(cb.priors, [1 / 3] * 3)

    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValueError):
            Codebook([[0.1], [0.2]], [0.6, 0.6])

    def test_priors_nonnegative(self):
        with pytest.raises(ValueError):
            Codebook([[0.1], [0.2]], [1.5, -0.5])

    def test_mixed_lengths_rejected(self):
        with pytest.raises(ValueError):
            Codebook([[0.1, 0.2], [0.3]])

    def test_codeword_requires_modes(self):
        with pytest.raises(ValueError):
            Codeword([])


class TestGram:
    def test_near_orthogonal_codewords_identity(self):
        cb = Codebook([[6.0], [-6.0]])
        assert_allclose(gram(cb).entries, np.eye(2), atol=1e-12)

    def test_bpsk_pair(self):
        nbar = 0.2
        cb = bpsk_codebook(math.sqrt(nbar))
        s = math.exp(-2 * nbar)
        assert_allclose(gram(cb).entries, [[1, s], [s, 1]], rtol=1e-14)

    def test_two_symbol_ensemble_off_diagonals(self):
        nbar = 0.15
        a = math.sqrt(nbar)
        cb = Codebook([[a, a], [a, -a], [-a, a]])
        g = gram(cb).entries
        s2, s4 = math.exp(-2 * nbar), math.exp(-4 * nbar)
        assert_allclose(g[0, 1], s2, rtol=1e-13)
        assert_allclose(g[0, 2], s2, rtol=1e-13)
        assert_allclose(g[1, 2], s4, rtol=1e-13)

    def test_hermitian_psd_and_weighted_trace(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            k = rng.integers(2, 6)
            words = rng.normal(size=(k, 3)) + 1j * rng.normal(size=(k, 3))
            pri = rng.random(k)
            cb = Codebook(list(words), pri / pri.sum())
            g = gram(cb, weighted=True)
            assert np.abs(g.entries - g.entries.conj().T).max() < 1e-12
            lam = g.eigenvalues()
            assert lam.min() > -1e-10
            assert_allclose(lam.sum(), 1.0, atol=1e-10)
            g.validate_psd()


class TestOrthonormalize:
    def test_near_orthogonal_gives_permutation_like_basis(self):
        cb = Codebook([[6.0], [-6.0]])
        basis = orthonormalize(cb)
        assert basis.rank == 2
        assert_allclose(np.abs(basis.coefficients), np.eye(2), atol=1e-8)

    def test_roundtrip_reproduces_gram(self):
        cb = bpsk_codebook(math.sqrt(0.05))
        basis, coords = span_embedding(cb)
        g = gram(cb).entries
        # coordinates reproduce the Gram matrix
        assert_allclose(coords.conj().T @ coords, g, atol=1e-10)
        # basis vectors e_i = sum_k B[i,k] c_k are orthonormal:
        # <e_i|e_j> = (conj(B) G B^T)_{ij} = delta_ij
        b = basis.coefficients
        assert_allclose(b.conj() @ g @ b.T, np.eye(basis.rank), atol=1e-10)

    def test_duplicate_codeword_collapses_rank(self):
        cb = Codebook([[0.4], [0.4]])
        assert orthonormalize(cb).rank == 1

    def test_ill_conditioned_span_still_orthonormal(self):
        cb = Codebook([[1e-3, 1e-3], [1e-3, -1e-3], [-1e-3, 1e-3]])
        basis, coords = span_embedding(cb)
        assert basis.rank == 3
        g = gram(cb).entries
        assert_allclose(basis.coefficients.conj() @ g @ basis.coefficients.T,
                        np.eye(3), atol=1e-10)
        assert_allclose(coords.conj().T @ coords, g, atol=1e-10)

    def test_complex_amplitudes_roundtrip(self):
        rng = np.random.default_rng(23)
        words = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        cb = Codebook(list(0.5 * words))
        basis, coords = span_embedding(cb)
        g = gram(cb).entries
        assert_allclose(coords.conj().T @ coords, g, atol=1e-10)
        assert_allclose(basis.coefficients.conj() @ g @ basis.coefficients.T,
                        np.eye(basis.rank), atol=1e-10)


class TestEnsembleEntropy:
    def test_single_state_zero(self):
        assert ensemble_entropy(Codebook([[0.8]])) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("nbar", [0.01, 0.1, 1.0])
    def test_bpsk_closed_form(self, nbar):
        cb = bpsk_codebook(math.sqrt(nbar))
        want = h2_oracle((1 + math.exp(-2 * nbar)) / 2)
        assert_allclose(ensemble_entropy(cb), want, atol=1e-10)

    def test_orthogonal_pair_one_bit(self):
        assert_allclose(ensemble_entropy(Codebook([[6.0], [-6.0]])), 1.0, atol=1e-10)

    def test_global_phase_invariance(self):
        nbar = 0.3
        alpha = math.sqrt(nbar)
        base = ensemble_entropy(Codebook([[alpha, alpha], [alpha, -alpha]]))
        phased = ensemble_entropy(Codebook(
            [[alpha * cmath.exp(0.7j), alpha * cmath.exp(0.7j)], [alpha, -alpha]]))
        assert_allclose(phased, base, atol=1e-12)

    def test_unequal_priors(self):
        # eigenvalues of the weighted Gram feed straight into the entropy
        cb = bpsk_codebook(math.sqrt(0.2), p0=0.8)
        lam = gram(cb, weighted=True).eigenvalues()
        want = sum(-v * math.log2(v) for v in lam if v > 0)
        assert_allclose(ensemble_entropy(cb), want, atol=1e-12)
