"""Coherent-state geometry: overlaps, Gram matrices, span bases, ensemble entropy.

Everything here works with the inner products of the states only, so codebooks
of arbitrary length live in the K-dimensional geometry of their Gram matrix
rather than in an infinite-dimensional mode space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative spectral cutoff below which a Gram-matrix direction is treated as
# null. Codebooks become nearly degenerate as the photon number goes to zero,
# so the cutoff is relative to the largest eigenvalue.
RANK_CUTOFF = 1e-10

HERMITICITY_TOL = 1e-12
PRIOR_TOL = 1e-12


def _as_amplitude(value) -> complex:
    if isinstance(value, CoherentAmplitude):
        return value.value
    return complex(value)


@dataclass(frozen=True)
class CoherentAmplitude:
    """Complex field amplitude of a coherent state."""

    value: complex

    @property
    def mean_photons(self) -> float:
        """Mean photon number |value|^2 of the state."""
        return abs(self.value) ** 2


@dataclass(frozen=True, eq=False)
class Codeword:
    """An ordered tuple of coherent-state amplitudes, one per mode."""

    amplitudes: np.ndarray

    def __init__(self, amplitudes):
        if isinstance(amplitudes, Codeword):
            amplitudes = amplitudes.amplitudes
        items = np.atleast_1d(amplitudes)
        if items.ndim != 1 or items.size < 1:
            raise ValueError("a codeword needs at least one mode")
        arr = np.array([_as_amplitude(a) for a in items], dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    def __len__(self) -> int:
        return self.amplitudes.size

    @property
    def modes(self) -> tuple[CoherentAmplitude, ...]:
        return tuple(CoherentAmplitude(a) for a in self.amplitudes)

    @property
    def mean_photons(self) -> float:
        """Total mean photon number across all modes."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True, eq=False)
class Codebook:
    """K codewords of equal length together with a prior distribution."""

    codewords: tuple[Codeword, ...]
    priors: np.ndarray

    def __init__(self, codewords, priors=None):
        words = tuple(Codeword(c) for c in codewords)
        if not words:
            raise ValueError("a codebook needs at least one codeword")
        n = len(words[0])
        if any(len(w) != n for w in words):
            raise ValueError("all codewords must have the same length")
        if priors is None:
            pri = np.full(len(words), 1.0 / len(words))
        else:
            pri = np.asarray(priors, dtype=float)
        if pri.shape != (len(words),):
            raise ValueError(
                f"priors shape {pri.shape} does not match {len(words)} codewords")
        if np.any(pri < 0):
            raise ValueError("priors must be nonnegative")
        if abs(pri.sum() - 1.0) > PRIOR_TOL:
            raise ValueError(f"priors must sum to 1 (got {pri.sum()!r})")
        pri = pri.copy()
        pri.setflags(write=False)
        object.__setattr__(self, "codewords", words)
        object.__setattr__(self, "priors", pri)

    @property
    def size(self) -> int:
        """Number of codewords K."""
        return len(self.codewords)

    @property
    def length(self) -> int:
        """Number of modes per codeword."""
        return len(self.codewords[0])

    @property
    def amplitude_matrix(self) -> np.ndarray:
        """K x n complex matrix with one codeword per row."""
        return np.array([w.amplitudes for w in self.codewords])

    @classmethod
    def equiprobable(cls, codewords) -> "Codebook":
        return cls(codewords)


def bpsk_codebook(alpha, p0: float = 0.5) -> Codebook:
    """Binary phase-shift keyed pair {|alpha>, |-alpha>} with prior p0 on +alpha."""
    a = _as_amplitude(alpha)
    return Codebook([[a], [-a]], [p0, 1.0 - p0])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Hermitian matrix of pairwise codeword overlaps.

    When ``weighted`` the entries carry the priors, G[j,k] =
    sqrt(p_j p_k) <c_j|c_k>, so the eigenvalues coincide with those of the
    ensemble density operator.
    """

    entries: np.ndarray
    weighted: bool = False

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.abs(e - e.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("Gram matrix must be Hermitian")
        if not self.weighted and np.abs(np.diag(e) - 1.0).max() > HERMITICITY_TOL:
            raise ValueError("unweighted Gram matrix must have unit diagonal")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def validate_psd(self, tol: float = 1e-10) -> None:
        """Raise if the matrix has an eigenvalue below -tol."""
        lo = float(self.eigenvalues().min())
        if lo < -tol:
            raise ValueError(f"Gram matrix is not positive semidefinite ({lo})")


@dataclass(frozen=True, eq=False)
class SpanBasis:
    """Orthonormal basis of the span of a codebook.

    ``coefficients`` is rank x K: row i gives the expansion of basis vector
    e_i as a combination of the codewords.
    """

    coefficients: np.ndarray
    rank: int

    @property
    def size(self) -> int:
        return self.coefficients.shape[1]


def inner_product(a, b) -> complex:
    """Overlap <a|b> of two coherent states.

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b), so |<a|b>| <= 1 with equality
    only for identical amplitudes.
    """
    av, bv = _as_amplitude(a), _as_amplitude(b)
    return complex(np.exp(-0.5 * abs(av) ** 2 - 0.5 * abs(bv) ** 2 + np.conj(av) * bv))


def codeword_inner(c1, c2) -> complex:
    """Overlap of two tensor-product codewords (product of per-mode overlaps)."""
    w1, w2 = Codeword(c1), Codeword(c2)
    if len(w1) != len(w2):
        raise ValueError(f"codeword lengths differ: {len(w1)} != {len(w2)}")
    a, b = w1.amplitudes, w2.amplitudes
    log_overlap = np.sum(-0.5 * np.abs(a) ** 2 - 0.5 * np.abs(b) ** 2 + a.conj() * b)
    return complex(np.exp(log_overlap))


def gram(cb: Codebook, weighted: bool = False) -> GramMatrix:
    """Pairwise overlap matrix of a codebook, optionally prior-weighted."""
    amps = cb.amplitude_matrix
    energies = np.sum(np.abs(amps) ** 2, axis=1)
    cross = amps.conj() @ amps.T
    entries = np.exp(-0.5 * (energies[:, None] + energies[None, :]) + cross)
    if weighted:
        root = np.sqrt(cb.priors)
        entries = root[:, None] * entries * root[None, :]
    return GramMatrix(entries, weighted=weighted)


def _span_decomposition(cb: Codebook) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the unweighted Gram, truncated to numerical rank.

    Returns (lam, V) keeping only eigenvalues above RANK_CUTOFF * max.
    """
    g = gram(cb).entries
    lam, vec = np.linalg.eigh(g)
    keep = lam > RANK_CUTOFF * lam.max()
    return lam[keep], vec[:, keep]


def orthonormalize(cb: Codebook) -> SpanBasis:
    """Orthonormal basis of span of the codewords, robust to rank deficiency.

    Basis vector i is e_i = sum_k coefficients[i, k] |c_k>; the construction
    diagonalizes the Gram matrix, which stays stable for the ill-conditioned
    ensembles that arise at very low photon numbers.
    """
    lam, vec = _span_decomposition(cb)
    coeff = vec.T / np.sqrt(lam)[:, None]
    return SpanBasis(coefficients=coeff, rank=coeff.shape[0])


def span_embedding(cb: Codebook) -> tuple[SpanBasis, np.ndarray]:
    """Span basis plus codeword coordinates in that basis.

    Returns (basis, coords) with coords of shape (rank, K); column k holds
    <e_i|c_k>, so coords.conj().T @ coords reproduces the Gram matrix.
    """
    lam, vec = _span_decomposition(cb)
    root = np.sqrt(lam)
    coeff = vec.T / root[:, None]
    coords = root[:, None] * vec.conj().T
    return SpanBasis(coefficients=coeff, rank=coeff.shape[0]), coords


def ensemble_entropy(cb: Codebook) -> float:
    """Von Neumann entropy, in bits, of the prior-weighted codeword ensemble.

    The density operator sum_k p_k |c_k><c_k| shares its nonzero spectrum with
    the weighted Gram matrix, so the entropy comes from a K x K eigenproblem.
    """
    lam = gram(cb, weighted=True).eigenvalues()
    lam = lam[lam > 0]
    return float(-(lam * np.log2(lam)).sum())
