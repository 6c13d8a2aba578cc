"""Optimal and structured measurements on pure-state ensembles.

Provides the square-root measurement, the binary Helstrom bound, a
certificate-carrying minimum-probability-of-error (MPE) solver, and the
factorization of a joint codeword measurement into a codeword unitary
followed by parallel single-symbol measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .capacity import mutual_information
from .exceptions import ConvergenceError, RankDeficiencyError
from .statespace import Codebook, span_embedding

ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Orthonormal measurement vectors, one per outcome, as rows in a span basis."""

    vectors: np.ndarray
    labels: tuple[str, ...] = ()

    def __init__(self, vectors, labels=None):
        v = np.atleast_2d(np.asarray(vectors, dtype=complex))
        overlap = v @ v.conj().T
        if np.abs(overlap - np.eye(v.shape[0])).max() > ORTHONORMALITY_TOL:
            raise ValueError("measurement vectors must be pairwise orthonormal")
        if labels is None:
            labels = tuple(str(i) for i in range(v.shape[0]))
        elif len(labels) != v.shape[0]:
            raise ValueError("one label per outcome vector required")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def num_outcomes(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class OutcomeMatrix:
    """Conditional outcome probabilities P(j|k), one row per input state."""

    probabilities: np.ndarray

    def __init__(self, probabilities):
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 2:
            raise ValueError("outcome matrix must be 2-D")
        if np.any(p < -ORTHONORMALITY_TOL) or np.any(p > 1.0 + ORTHONORMALITY_TOL):
            raise ValueError("outcome probabilities must lie in [0, 1]")
        if np.abs(p.sum(axis=1) - 1.0).max() > ORTHONORMALITY_TOL:
            raise ValueError("outcome matrix rows must sum to 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def success_probability(self, priors) -> float:
        """Average probability of outcome k on input k under the given priors."""
        pri = np.asarray(priors, dtype=float)
        diag = np.diagonal(self.probabilities)
        if pri.shape != diag.shape:
            raise ValueError("priors length must match the number of inputs")
        return float(pri @ diag)


def helstrom_binary(overlap_magnitude: float, p0: float) -> float:
    """Minimum error probability for two pure states with the given overlap.

    Equals (1 - sqrt(1 - 4 p0 (1-p0) overlap^2)) / 2 for prior p0 on the
    first state.
    """
    if not 0.0 <= overlap_magnitude <= 1.0:
        raise ValueError("overlap magnitude must lie in [0, 1]")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("prior must lie in [0, 1]")
    g2 = overlap_magnitude * overlap_magnitude
    return 0.5 * (1.0 - np.sqrt(1.0 - 4.0 * p0 * (1.0 - p0) * g2))


def _polar_orthonormal(a: np.ndarray) -> np.ndarray:
    """Unitary polar factor of stacked matrices (..., r, K), columns orthonormal."""
    u, _, vh = np.linalg.svd(a, full_matrices=False)
    return u @ vh


def _diag_amplitudes(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """<w_k|c_k> for stacked column sets: sum_i conj(w[...,i,k]) x[...,i,k]."""
    return np.einsum("...ik,...ik->...k", w.conj(), x)


def _ykl_residual(w: np.ndarray, x: np.ndarray, priors: np.ndarray) -> np.ndarray:
    """Most negative eigenvalue over k of (Lambda - p_k rho_k), stacked.

    Lambda = sum_k p_k rho_k Pi_k, hermitized; at the optimum the residual is
    nonnegative (Yuen-Kennedy-Lax conditions).
    """
    c = _diag_amplitudes(w, x)
    lam = np.einsum("...k,...ik,...jk->...ij", priors * c.conj(), x, w.conj())
    lam = 0.5 * (lam + np.swapaxes(lam.conj(), -1, -2))
    rho = np.einsum("...ik,...jk->...kij", x, x.conj())
    gap = lam[..., None, :, :] - priors[..., :, None, None] * rho
    eig = np.linalg.eigvalsh(gap)
    return eig[..., 0].min(axis=-1)


def _mpe_iterate(x: np.ndarray, priors: np.ndarray, tol: float, max_iter: int,
                 w0: np.ndarray | None = None, check_every: int = 1):
    """Fixed-point MPE iteration on stacked coordinates x (..., K, K).

    Each sweep replaces the measurement with the unitary polar factor of the
    states reweighted by p_k |<w_k|c_k>|, which preserves completeness and
    increases the success probability. Returns (w, success, residual,
    iterations, history); history only for unbatched input.
    """
    w = _polar_orthonormal(x * np.sqrt(priors)[..., None, :]) if w0 is None else w0
    batched = x.ndim > 2
    history = []
    residual = _ykl_residual(w, x, priors)
    iterations = 0
    for it in range(1, max_iter + 1):
        succ = (priors * np.abs(_diag_amplitudes(w, x)) ** 2).sum(axis=-1)
        if not batched:
            history.append(float(succ))
        if np.all(residual >= -tol):
            iterations = it - 1
            break
        c = _diag_amplitudes(w, x)
        w = _polar_orthonormal(x * (priors * np.abs(c))[..., None, :])
        iterations = it
        if it % check_every == 0 or it == max_iter:
            residual = _ykl_residual(w, x, priors)
    succ = (priors * np.abs(_diag_amplitudes(w, x)) ** 2).sum(axis=-1)
    if not batched and (not history or history[-1] != succ):
        history.append(float(succ))
    return w, succ, residual, iterations, np.asarray(history)


@dataclass(frozen=True, eq=False)
class MpeResult:
    """Converged MPE measurement with its optimality certificate."""

    measurement: ProjectiveMeasurement
    outcomes: OutcomeMatrix
    certificate: float
    success_probability: float
    iterations: int
    success_history: np.ndarray


def square_root_measurement(cb: Codebook):
    """Square-root measurement of a linearly independent pure-state codebook.

    The measurement vectors are the inverse-square-root-Gram combinations of
    the prior-weighted codewords, which are orthonormal exactly when the
    codewords are linearly independent; rank-deficient codebooks raise
    RankDeficiencyError.

    Returns (ProjectiveMeasurement, OutcomeMatrix).
    """
    basis, x = span_embedding(cb)
    if basis.rank < cb.size:
        raise RankDeficiencyError(
            f"codebook spans only {basis.rank} of {cb.size} dimensions")
    w = _polar_orthonormal(x * np.sqrt(cb.priors)[None, :])
    probs = np.abs(w.conj().T @ x) ** 2
    measurement = ProjectiveMeasurement(w.T)
    return measurement, OutcomeMatrix(probs.T)


def mpe_fixed_point(cb: Codebook, tol: float = 1e-8, max_iter: int = 1000,
                    initial: ProjectiveMeasurement | None = None) -> MpeResult:
    """Minimum-probability-of-error measurement of a pure-state codebook.

    Iterates a completeness-preserving measurement update, seeded from the
    square-root measurement, until the Yuen-Kennedy-Lax residual exceeds
    -tol. The residual is returned as the certificate; the success
    probability is nondecreasing across iterations (see success_history).

    Raises ConvergenceError, carrying the best iterate, when max_iter sweeps
    do not reach the tolerance.
    """
    if cb.size < 2:
        raise ValueError("state discrimination needs at least two codewords")
    basis, x = span_embedding(cb)
    if basis.rank < cb.size:
        raise RankDeficiencyError(
            f"codebook spans only {basis.rank} of {cb.size} dimensions")
    w0 = initial.vectors.T.astype(complex) if initial is not None else None
    if w0 is not None and w0.shape != x.shape:
        raise ValueError("initial measurement does not match the codebook span")
    w, succ, residual, iterations, history = _mpe_iterate(
        x, cb.priors, tol, max_iter, w0=w0)
    probs = np.abs(w.conj().T @ x) ** 2
    result = MpeResult(
        measurement=ProjectiveMeasurement(w.T),
        outcomes=OutcomeMatrix(probs.T),
        certificate=float(residual),
        success_probability=float(succ),
        iterations=iterations,
        success_history=history,
    )
    if residual < -tol:
        raise ConvergenceError(
            f"YKL residual {float(residual):.3e} above -{tol} not reached "
            f"after {max_iter} iterations", result=result)
    return result


def outcome_probabilities(measurement: ProjectiveMeasurement, cb: Codebook,
                          complete: bool = True) -> np.ndarray:
    """Conditional probabilities P(j|k) of a measurement applied to a codebook.

    The measurement vectors live in the codebook's span basis, padded with
    zeros if the measurement was defined on a completed larger basis. With
    ``complete`` a trailing column absorbs any probability the vectors do not
    capture, keeping rows stochastic.
    """
    basis, x = span_embedding(cb)
    dim = measurement.dimension
    if dim < basis.rank:
        raise ValueError(
            f"measurement dimension {dim} does not cover the span rank {basis.rank}")
    if dim > basis.rank:
        x = np.vstack([x, np.zeros((dim - basis.rank, cb.size), dtype=complex)])
    probs = (np.abs(measurement.vectors.conj() @ x) ** 2).T
    if complete:
        deficit = np.clip(1.0 - probs.sum(axis=1), 0.0, 1.0)
        if deficit.max() > ORTHONORMALITY_TOL:
            probs = np.column_stack([probs, deficit])
    return probs


def accessible_information(cb: Codebook, measurement: ProjectiveMeasurement) -> float:
    """Mutual information, in bits, of the channel a measurement induces on cb."""
    probs = outcome_probabilities(measurement, cb)
    rows = probs.sum(axis=1)
    return mutual_information(probs / rows[:, None], cb.priors)


def complete_basis(partial: np.ndarray, candidates: np.ndarray | None = None,
                   dim: int | None = None, tol: float = ORTHONORMALITY_TOL) -> np.ndarray:
    """Extend orthonormal rows to a full orthonormal basis of the ambient space.

    Candidate rows (ambient identity by default) are swept in index order and
    Gram-Schmidt appended, skipping any that are numerically dependent. The
    input rows are returned unchanged as the leading block.
    """
    part = np.asarray(partial, dtype=complex)
    if part.ndim != 2:
        part = np.atleast_2d(part)
    if candidates is not None:
        candidates = np.asarray(candidates, dtype=complex)
        dim = candidates.shape[1] if dim is None else dim
    if dim is None:
        dim = part.shape[1]
    if part.size and part.shape[1] != dim:
        raise ValueError("partial vectors do not lie in the ambient space")
    if part.shape[0] > dim:
        raise ValueError(
            f"{part.shape[0]} vectors cannot be orthonormal in dimension {dim}")
    if part.size:
        overlap = part @ part.conj().T
        if np.abs(overlap - np.eye(part.shape[0])).max() > 1e-9:
            raise ValueError("partial vectors must be orthonormal")
    if candidates is None:
        candidates = np.eye(dim, dtype=complex)
    rows = [row for row in part]
    for cand in candidates:
        if len(rows) == dim:
            break
        v = cand.astype(complex)
        for _ in range(2):  # re-orthogonalize for stability
            for w in rows:
                v = v - np.vdot(w, v) * w
        norm = np.linalg.norm(v)
        if norm > tol:
            rows.append(v / norm)
    if len(rows) < dim:
        raise ValueError("candidate vectors do not span the ambient space")
    return np.array(rows)


def alphabet_of(cb: Codebook) -> np.ndarray:
    """Distinct symbol amplitudes of a codebook, sorted by (real, imag).

    Matching is exact, which is the relevant case for codebooks assembled
    from a shared set of symbol amplitudes.
    """
    return np.unique(cb.amplitude_matrix.ravel())


def single_symbol_codebook(alphabet) -> Codebook:
    """Equiprobable codebook of the length-one symbol states."""
    return Codebook([[a] for a in np.asarray(alphabet, dtype=complex)])


def _symbol_coordinates(alphabet: np.ndarray) -> np.ndarray:
    """Coordinates (Q x Q) of the alphabet states in their own span basis."""
    basis, x1 = span_embedding(single_symbol_codebook(alphabet))
    if basis.rank < len(alphabet):
        raise RankDeficiencyError("alphabet states are linearly dependent")
    return x1


def _tensor_coordinates(cb: Codebook, alphabet: np.ndarray,
                        x1: np.ndarray) -> np.ndarray:
    """Coordinates (Q^n x K) of codewords in the product of symbol span bases."""
    index = {a: i for i, a in enumerate(alphabet)}
    cols = []
    for word in cb.codewords:
        v = np.array([1.0 + 0.0j])
        for a in word.amplitudes:
            try:
                v = np.kron(v, x1[:, index[complex(a)]])
            except KeyError:
                raise ValueError(f"amplitude {a!r} is not in the alphabet") from None
        cols.append(v)
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class FactoredMeasurement:
    """Joint codeword measurement split into a unitary plus symbol measurements.

    ``unitary`` is the Q^n x Q^n matrix of the codeword unitary expressed in
    ``product_basis`` (the tensor products of the symbol-measurement vectors);
    ``codeword_basis`` holds the joint measurement vectors, the first K of
    which discriminate the codebook. Applying the unitary and then measuring
    every symbol reproduces the joint measurement statistics exactly.
    """

    unitary: np.ndarray
    symbol_measurement: ProjectiveMeasurement
    codeword_basis: np.ndarray
    product_basis: np.ndarray
    alphabet: np.ndarray
    word_length: int


def factor_measurement(cb: Codebook, symbol_measurement: ProjectiveMeasurement,
                       joint_basis: str = "srm",
                       dimension_cap: int = 4096) -> FactoredMeasurement:
    """Factor a joint codeword measurement through per-symbol measurements.

    Builds the joint basis from the codebook's square-root-measurement vectors
    (or, with ``joint_basis="mpe"``, the minimum-error vectors) completed with
    product-basis vectors in index order, then solves for the unitary relating
    the two bases. Works for any Q-ary alphabet with Q^n <= dimension_cap and
    linearly independent codewords.
    """
    alphabet = alphabet_of(cb)
    q, n = len(alphabet), cb.length
    dim = q ** n
    if dim > dimension_cap:
        raise ValueError(f"product space dimension {dim} exceeds cap {dimension_cap}")
    if symbol_measurement.num_outcomes != q or symbol_measurement.dimension != q:
        raise ValueError(
            f"symbol measurement must have {q} outcomes in dimension {q}")
    if joint_basis not in ("srm", "mpe"):
        raise ValueError(f"unknown joint basis {joint_basis!r}")
    x1 = _symbol_coordinates(alphabet)
    coords = _tensor_coordinates(cb, alphabet, x1)
    weighted = coords * np.sqrt(cb.priors)[None, :]
    u_svd, s, vh = np.linalg.svd(weighted, full_matrices=False)
    if s.min() <= 1e-10 * s.max():
        raise RankDeficiencyError("codewords are linearly dependent")
    if joint_basis == "srm":
        joint_rows = (u_svd @ vh).T
    else:
        span = _span_to_product_map(cb, coords)
        joint_rows = mpe_fixed_point(cb).measurement.vectors @ span.T
    product_rows = reduce(np.kron, [symbol_measurement.vectors] * n)
    codeword_basis = complete_basis(joint_rows, candidates=product_rows)
    u = codeword_basis @ product_rows.conj().T
    return FactoredMeasurement(
        unitary=u.conj(),
        symbol_measurement=symbol_measurement,
        codeword_basis=codeword_basis,
        product_basis=product_rows,
        alphabet=alphabet,
        word_length=n,
    )


def _span_to_product_map(cb: Codebook, coords: np.ndarray) -> np.ndarray:
    """Columns are the codebook's span-basis vectors in product coordinates."""
    basis, _ = span_embedding(cb)
    return coords @ basis.coefficients.T


def direct_outcome_distribution(fm: FactoredMeasurement, cb: Codebook) -> np.ndarray:
    """P(j|k) from measuring codewords directly in the joint basis."""
    x1 = _symbol_coordinates(fm.alphabet)
    coords = _tensor_coordinates(cb, fm.alphabet, x1)
    return (np.abs(fm.codeword_basis.conj() @ coords) ** 2).T


def factored_outcome_distribution(fm: FactoredMeasurement, cb: Codebook) -> np.ndarray:
    """P(j|k) from applying the unitary, then measuring each symbol.

    Outcome j enumerates the per-symbol outcomes in row-major order, matching
    direct_outcome_distribution.
    """
    x1 = _symbol_coordinates(fm.alphabet)
    coords = _tensor_coordinates(cb, fm.alphabet, x1)
    in_product_basis = fm.product_basis.conj() @ coords
    rotated = fm.unitary @ in_product_basis
    return (np.abs(rotated) ** 2).T


def factorization_residuals(fm: FactoredMeasurement, cb: Codebook):
    """Worst-case total-variation gap and unitarity defect of a factorization.

    Returns (max_tv, unitarity_residual): the largest total-variation distance
    between the factored and direct outcome distributions over the codewords,
    and max |U U^H - I|.
    """
    direct = direct_outcome_distribution(fm, cb)
    factored = factored_outcome_distribution(fm, cb)
    max_tv = float(0.5 * np.abs(direct - factored).sum(axis=1).max())
    u = fm.unitary
    unit = float(np.abs(u @ u.conj().T - np.eye(u.shape[0])).max())
    return max_tv, unit
