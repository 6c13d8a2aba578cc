"""Capacity and information quantities for coherent-state signaling.

Closed forms for the binary-modulation capacities, the Hadamard-code
joint-detection rate and its envelope, generic mutual information, and a
Blahut-Arimoto solver for induced discrete channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError

# Exact SI values.
PLANCK_J_S = 6.62607015e-34
LIGHT_SPEED_M_S = 299792458.0

ROW_SUM_TOL = 1e-12


def binary_entropy(x):
    """Binary entropy H(x) in bits, with 0 log 0 = 0. Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    out = np.zeros_like(arr)
    inside = (arr > 0.0) & (arr < 1.0)
    xi = arr[inside]
    out[inside] = -xi * np.log2(xi) - (1.0 - xi) * np.log2(1.0 - xi)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def holevo_ultimate(nbar):
    """Ultimate capacity g(nbar) = (1+n)log2(1+n) - n log2 n bits/symbol."""
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("mean photon number must be nonnegative")
    safe = np.where(arr > 0.0, arr, 1.0)  # log2(1) = 0 covers the n = 0 limit
    out = (1.0 + arr) * np.log2(1.0 + arr) - safe * np.log2(safe)
    return float(out) if np.isscalar(nbar) or arr.ndim == 0 else out


def bpsk_min_error(nbar):
    """Helstrom error q = (1 - sqrt(1 - e^{-4 nbar}))/2 for equiprobable BPSK."""
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("mean photon number must be nonnegative")
    q = 0.5 * (1.0 - np.sqrt(1.0 - np.exp(-4.0 * arr)))
    return float(q) if np.isscalar(nbar) or arr.ndim == 0 else q


def bpsk_c1(nbar):
    """Best single-symbol BPSK capacity 1 - H(q), q the Helstrom error."""
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("mean photon number must be positive")
    out = 1.0 - binary_entropy(bpsk_min_error(arr))
    return float(out) if np.isscalar(nbar) or arr.ndim == 0 else out


def bpsk_holevo(nbar):
    """Holevo capacity H((1 + e^{-2 nbar})/2) of the equiprobable BPSK ensemble."""
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("mean photon number must be nonnegative")
    out = binary_entropy((1.0 + np.exp(-2.0 * arr)) / 2.0)
    return float(out) if np.isscalar(nbar) or arr.ndim == 0 else out


@dataclass(frozen=True)
class HadamardDesign:
    """Parameters of the (2^l - 1, 2^l, 2^(l-1)) binary Hadamard code."""

    l: int

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 1:
            raise ValueError("l must be a positive integer")
        object.__setattr__(self, "l", int(self.l))

    @property
    def n(self) -> int:
        """Codeword length 2^l - 1."""
        return 2 ** self.l - 1

    @property
    def K(self) -> int:
        """Number of codewords 2^l."""
        return 2 ** self.l

    @property
    def d(self) -> int:
        """Minimum Hamming distance 2^(l-1)."""
        return 2 ** (self.l - 1)


def hadamard_capacity(design, nbar, per_bpsk_symbol: bool = False):
    """Erasure-coded rate (log2 K / K)(1 - e^{-2 d nbar}) of the Hadamard code.

    The conventional normalization divides the per-codeword information
    log2(K) by K, counting the receiver's ancilla slot as a symbol;
    ``per_bpsk_symbol`` divides by the bare codeword length 2^l - 1 instead.
    """
    d = design if isinstance(design, HadamardDesign) else HadamardDesign(design)
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("mean photon number must be nonnegative")
    per_word = d.l * (1.0 - np.exp(-2.0 * d.d * arr))
    out = per_word / (d.n if per_bpsk_symbol else d.K)
    return float(out) if np.isscalar(nbar) or arr.ndim == 0 else out


def hadamard_envelope(nbar, l_max: int = 20):
    """Best photon information efficiency over Hadamard code orders 1..l_max.

    Returns (best_l, pie) where pie = max_l hadamard_capacity(l, nbar)/nbar.
    Ties resolve toward the smaller order. Accepts scalar or array nbar.
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    arr = np.atleast_1d(np.asarray(nbar, dtype=float))
    if np.any(arr <= 0.0):
        raise ValueError("mean photon number must be positive")
    pies = np.stack([hadamard_capacity(l, arr) / arr for l in range(1, l_max + 1)])
    idx = np.argmax(pies, axis=0)  # first max, so ties go to smaller l
    best = pies[idx, np.arange(arr.size)]
    if np.isscalar(nbar) or np.asarray(nbar).ndim == 0:
        return int(idx[0]) + 1, float(best[0])
    return idx + 1, best


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Row-stochastic conditional-probability matrix P(y|x)."""

    transition: np.ndarray

    def __init__(self, transition):
        t = np.asarray(transition, dtype=float)
        if t.ndim != 2:
            raise ValueError("transition matrix must be 2-D")
        if np.any(t < -ROW_SUM_TOL) or np.any(t > 1.0 + ROW_SUM_TOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        rows = t.sum(axis=1)
        if np.abs(rows - 1.0).max() > ROW_SUM_TOL:
            raise ValueError("transition matrix rows must sum to 1")
        t = np.clip(t, 0.0, 1.0)
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @property
    def num_inputs(self) -> int:
        return self.transition.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class CapacityPoint:
    """One point of a capacity curve, carrying its photon efficiency."""

    nbar: float
    bits_per_symbol: float
    pie: float
    label: str = ""

    def __post_init__(self):
        if self.nbar <= 0 or self.bits_per_symbol < 0:
            raise ValueError("need nbar > 0 and bits_per_symbol >= 0")
        if abs(self.pie * self.nbar - self.bits_per_symbol) > 1e-12 * max(
                1.0, self.bits_per_symbol):
            raise ValueError("pie * nbar must equal bits_per_symbol")

    @classmethod
    def from_bits(cls, nbar: float, bits_per_symbol: float, label: str = "") -> "CapacityPoint":
        return cls(nbar, bits_per_symbol, bits_per_symbol / nbar, label)


def _mutual_information_stack(transition: np.ndarray, priors: np.ndarray) -> np.ndarray:
    """I(X;Y) in bits for stacked channels (..., X, Y) and priors (..., X)."""
    joint = priors[..., :, None] * transition
    marginal = joint.sum(axis=-2, keepdims=True)
    denom = priors[..., :, None] * marginal
    with np.errstate(divide="ignore", invalid="ignore"):
        term = joint * np.log2(joint / denom)
    term = np.where(joint > 0.0, term, 0.0)
    return term.sum(axis=(-1, -2))


def mutual_information(channel, priors) -> float:
    """Mutual information I(X;Y), in bits, of a channel under input priors."""
    t = channel.transition if isinstance(channel, DiscreteChannel) else \
        DiscreteChannel(channel).transition
    p = np.asarray(priors, dtype=float)
    if p.shape != (t.shape[0],):
        raise ValueError(
            f"priors shape {p.shape} does not match {t.shape[0]} channel inputs")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("priors must be a probability distribution")
    return float(_mutual_information_stack(t, p))


def blahut_arimoto(channel, tol: float = 1e-9, max_iter: int = 100000):
    """Capacity of a discrete memoryless channel with a duality-gap certificate.

    Alternates the standard prior update with the per-iteration bounds
    I_low <= C <= I_up; stops once I_up - I_low < tol, so the returned
    capacity is within tol of the true maximum.

    Returns (capacity, priors). Raises ConvergenceError (carrying the best
    iterate) if the gap has not closed after max_iter rounds.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = channel.transition if isinstance(channel, DiscreteChannel) else \
        DiscreteChannel(channel).transition
    m = t.shape[0]
    priors = np.full(m, 1.0 / m)
    with np.errstate(divide="ignore"):
        log_t = np.where(t > 0.0, np.log2(np.where(t > 0.0, t, 1.0)), 0.0)
    best = (0.0, priors)
    for _ in range(max_iter):
        marginal = priors @ t
        with np.errstate(divide="ignore"):
            log_marg = np.where(marginal > 0.0, np.log2(np.where(marginal > 0.0, marginal, 1.0)), 0.0)
        # D(P(.|x) || q) for each input x
        divergence = ((t * (log_t - log_marg[None, :])).sum(axis=1))
        lower = float(priors @ divergence)
        upper = float(divergence.max())
        if lower > best[0]:
            best = (lower, priors.copy())
        if upper - lower < tol:
            return lower, priors
        priors = priors * np.exp2(divergence - upper)
        priors = priors / priors.sum()
    raise ConvergenceError(
        f"Blahut-Arimoto gap above {tol} after {max_iter} iterations", result=best)


def design_point(pie_target: float, power_watts: float, wavelength_m: float):
    """Photon flux and bit rate of a link at a given photon efficiency.

    Returns (photon_rate_hz, bit_rate_bps) for the received optical power and
    wavelength; photon_rate = P / (h c / lambda).
    """
    if pie_target < 0:
        raise ValueError("photon information efficiency must be nonnegative")
    if power_watts <= 0 or wavelength_m <= 0:
        raise ValueError("power and wavelength must be positive")
    photon_energy = PLANCK_J_S * LIGHT_SPEED_M_S / wavelength_m
    photon_rate = power_watts / photon_energy
    return photon_rate, pie_target * photon_rate
