"""Structured optical receivers for coherent-state codebooks.

Beamsplitter networks acting on mode amplitudes, single-photon-detector
statistics, displacement and adaptive-feedback binary receivers, the
two-symbol joint-detection receiver, the butterfly network that converts a
binary Hadamard codebook into pulse-position modulation, and seeded Monte
Carlo error-rate harnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import capacity
from .capacity import DiscreteChannel, bpsk_c1, bpsk_min_error
from .exceptions import RankDeficiencyError
from .measurement import (
    _mpe_iterate,
    accessible_information,
    helstrom_binary,
    mpe_fixed_point,
    square_root_measurement,
)
from .statespace import Codebook, span_embedding

_WILSON_Z = 1.959963984540054  # two-sided 95%


def spd_click_probability(amplitude):
    """Click probability 1 - e^{-|amp|^2} of an ideal single-photon detector."""
    amp = np.asarray(amplitude, dtype=complex)
    out = 1.0 - np.exp(-np.abs(amp) ** 2)
    return float(out) if np.isscalar(amplitude) or amp.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class BeamsplitterNetwork:
    """Ordered 50-50 two-mode couplings acting on a register of mode amplitudes.

    Each stage (a, b) maps the pair to ((a+b)/sqrt2, (a-b)/sqrt2), so any
    network realizes a unitary on the mode amplitudes and conserves total
    photon number.
    """

    num_modes: int
    stages: tuple[tuple[int, int], ...]

    def __init__(self, num_modes, stages):
        if num_modes < 1:
            raise ValueError("need at least one mode")
        pairs = []
        for a, b in stages:
            a, b = int(a), int(b)
            if not (0 <= a < num_modes and 0 <= b < num_modes) or a == b:
                raise ValueError(f"invalid coupling ({a}, {b}) on {num_modes} modes")
            pairs.append((a, b))
        object.__setattr__(self, "num_modes", int(num_modes))
        object.__setattr__(self, "stages", tuple(pairs))

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def apply(self, amplitudes) -> np.ndarray:
        """Propagate mode amplitudes through the network."""
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (self.num_modes,):
            raise ValueError(
                f"expected {self.num_modes} amplitudes, got shape {amps.shape}")
        out = amps.copy()
        inv_root2 = 1.0 / np.sqrt(2.0)
        for a, b in self.stages:
            sa, sb = (out[a] + out[b]) * inv_root2, (out[a] - out[b]) * inv_root2
            out[a], out[b] = sa, sb
        return out

    def matrix(self) -> np.ndarray:
        """Unitary mode-transform matrix of the whole network."""
        cols = [self.apply(col) for col in np.eye(self.num_modes, dtype=complex)]
        return np.column_stack(cols)


def green_machine(l: int) -> BeamsplitterNetwork:
    """Butterfly of (2^l * l)/2 couplings realizing the Walsh-Hadamard transform.

    The network matrix equals the Sylvester-Hadamard matrix divided by
    sqrt(2^l) in the natural mode ordering, so it is its own inverse.
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    n = 2 ** l
    stages = []
    for s in range(l):
        step = 1 << s
        for i in range(n):
            if not (i >> s) & 1:
                stages.append((i, i + step))
    return BeamsplitterNetwork(n, stages)


def _sylvester_rows(l: int) -> np.ndarray:
    """Sylvester-Hadamard +-1 matrix of order 2^l."""
    h2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    return reduce(np.kron, [h2] * l)


def hadamard_codebook(l: int, alpha) -> Codebook:
    """Binary-phase Hadamard codebook: 2^l equidistant words of length 2^l - 1.

    Rows of the Sylvester-Hadamard matrix with the constant first column
    removed, scaled by alpha; every pair of codewords differs in exactly
    2^(l-1) positions. Priors are uniform.
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    a = complex(alpha)
    rows = _sylvester_rows(l)[:, 1:] * a
    return Codebook(list(rows))


def random_bpsk_codebook(length: int, size: int, alpha=1.0, seed=None) -> Codebook:
    """Equiprobable codebook of distinct random +-alpha patterns."""
    if size > 2 ** length:
        raise ValueError(f"cannot draw {size} distinct patterns of length {length}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    picks = rng.choice(2 ** length, size=size, replace=False)
    a = complex(alpha)
    words = [[a if (p >> i) & 1 == 0 else -a for i in range(length)] for p in picks]
    return Codebook(words)


@dataclass(frozen=True, eq=False)
class ReceiverOutcome:
    """Discrete channel a receiver induces from codeword index to outcome."""

    channel: DiscreteChannel
    priors: np.ndarray
    outcome_labels: tuple[str, ...]

    def __init__(self, channel, priors, outcome_labels=None):
        ch = channel if isinstance(channel, DiscreteChannel) else DiscreteChannel(channel)
        pri = np.asarray(priors, dtype=float)
        if pri.shape != (ch.num_inputs,):
            raise ValueError("priors length must match channel inputs")
        if outcome_labels is None:
            outcome_labels = tuple(str(j) for j in range(ch.num_outputs))
        elif len(outcome_labels) != ch.num_outputs:
            raise ValueError("one label per outcome required")
        pri = pri.copy()
        pri.setflags(write=False)
        object.__setattr__(self, "channel", ch)
        object.__setattr__(self, "priors", pri)
        object.__setattr__(self, "outcome_labels", tuple(outcome_labels))

    def mutual_information(self) -> float:
        return capacity.mutual_information(self.channel, self.priors)


def hadamard_jdr_channel(l: int, nbar: float) -> ReceiverOutcome:
    """Erasure channel of the butterfly joint-detection receiver.

    Each codeword, prepended with a locally known ancilla pulse |alpha>,
    rides the butterfly network onto a single output port carrying all
    2^l * nbar photons; an ideal detector array then either identifies that
    port or registers no click at all (the erasure outcome, probability
    e^{-2^l nbar}). Outcomes are labeled by the lowest-index clicking port,
    which coincides with the only excited port here.
    """
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    alpha = np.sqrt(nbar)
    net = green_machine(l)
    cb = hadamard_codebook(l, alpha)
    k = cb.size
    rows = np.zeros((k, k + 1))
    for i, word in enumerate(cb.codewords):
        out = net.apply(np.concatenate([[alpha], word.amplitudes]))
        no_click = np.exp(-np.abs(out) ** 2)
        leading = np.concatenate([[1.0], np.cumprod(no_click)])
        rows[i, :k] = leading[:-1] - leading[1:]
        rows[i, k] = leading[-1]
    labels = tuple(f"port{j}" for j in range(k)) + ("erasure",)
    return ReceiverOutcome(rows, cb.priors, labels)


def kennedy_channel(nbar: float) -> ReceiverOutcome:
    """Displacement receiver channel: shift by -alpha, then photon detection.

    Input |alpha> is displaced to vacuum and never clicks; |-alpha> is
    displaced to -2 alpha and clicks with 1 - e^{-4 nbar}.
    """
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    alpha = np.sqrt(nbar)
    displaced = np.array([alpha - alpha, -alpha - alpha], dtype=complex)
    click = spd_click_probability(displaced)
    rows = np.column_stack([1.0 - click, click])
    return ReceiverOutcome(rows, [0.5, 0.5], ("no-click", "click"))


def dolinar_error_exact(nbar: float, p0: float = 0.5) -> float:
    """Error of the ideal adaptive-feedback binary receiver: the Helstrom bound."""
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    return helstrom_binary(float(np.exp(-2.0 * nbar)), p0)


def dolinar_sliced(nbar: float, slices: int, p0: float = 0.5,
                   displacement=None) -> float:
    """Exact error probability of the time-sliced adaptive-feedback receiver.

    The pulse is split into equal slices; during each one the receiver holds
    a displacement and watches an ideal photon detector, flipping its running
    guess on every click. The default displacement follows the ideal
    continuous feedback trajectory evaluated at slice midpoints, so the error
    converges to the Helstrom bound as slices grow. ``displacement`` may
    override the schedule as a callable (slice_index, guess_sign) -> amplitude
    (e.g. a constant -sqrt(nbar) reproduces the displacement receiver at one
    slice).

    The click-count parity determines both the feedback branch and the final
    decision, so the receiver is a two-state Markov chain per hypothesis and
    the error probability is computed exactly, with no sampling.
    """
    if slices < 1:
        raise ValueError("need at least one slice")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("prior must lie in [0, 1]")
    p1 = 1.0 - p0
    if nbar == 0 and displacement is None:
        return min(p0, p1)
    signal = np.sqrt(nbar)
    dt = 1.0 / slices
    guess0 = 1.0 if p0 >= p1 else -1.0

    error = 0.0
    for sign, prior in ((+1.0, p0), (-1.0, p1)):
        if prior == 0.0:
            continue
        even, odd = 1.0, 0.0  # probability of even / odd click parity
        for k in range(slices):
            if displacement is None:
                t_mid = (k + 0.5) * dt
                radius = np.sqrt(max(
                    1.0 - 4.0 * p0 * p1 * np.exp(-4.0 * nbar * t_mid), 0.0))
                shift_even = -guess0 * signal / radius
                shift_odd = guess0 * signal / radius
            else:
                shift_even = displacement(k, guess0)
                shift_odd = displacement(k, -guess0)
            c_even = 1.0 - np.exp(-abs(sign * signal + shift_even) ** 2 * dt)
            c_odd = 1.0 - np.exp(-abs(sign * signal + shift_odd) ** 2 * dt)
            even, odd = even * (1.0 - c_even) + odd * c_odd, \
                even * c_even + odd * (1.0 - c_odd)
        wrong = even if guess0 != sign else odd
        error += prior * wrong
    return float(error)


def two_symbol_codebook(alpha, p: float) -> Codebook:
    """Three of the four two-symbol binary-phase words with priors (1-2p, p, p)."""
    if not 0.0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 0.5]")
    a = complex(alpha)
    return Codebook([[a, a], [a, -a], [-a, a]], [1.0 - 2.0 * p, p, p])


def _binary_projective_response(beta: complex, psi: complex):
    """Outcome probabilities of the binary span measurement for {|beta>, |-beta>}.

    Projects the coherent state |psi> onto the two minimum-error measurement
    vectors of the design pair; whatever weight lies outside the design span
    is split evenly between the outcomes, keeping the response a
    distribution. Returns (P_plus, P_minus).
    """
    if beta == 0:
        return 0.5, 0.5
    pair = Codebook([[beta], [-beta]])
    try:
        detector, _ = square_root_measurement(pair)
    except RankDeficiencyError:
        return 0.5, 0.5
    basis, _ = span_embedding(pair)
    overlaps = np.array([
        np.exp(-0.5 * abs(s) ** 2 - 0.5 * abs(psi) ** 2 + np.conj(s) * psi)
        for s in (beta, -beta)])
    coords = basis.coefficients.conj() @ overlaps
    probs = np.abs(detector.vectors.conj() @ coords) ** 2
    leftover = max(1.0 - float((np.abs(coords) ** 2).sum()), 0.0)
    return float(probs[0] + 0.5 * leftover), float(probs[1] + 0.5 * leftover)


def jdr2_channel(nbar: float, p: float) -> ReceiverOutcome:
    """Two-symbol joint-detection receiver for the three-word ensemble.

    The two symbol modes interfere on one 50-50 beamsplitter, which maps
    |aa> -> (sqrt2 a, 0), |a,-a> -> (0, sqrt2 a) and |-a,a> -> (0, -sqrt2 a).
    The constructive port feeds a single-photon detector; the other port
    feeds a binary projective receiver designed for {+-sqrt2 a}, whose
    response to every port state (the vacuum included, for |aa>) is computed
    by projection onto its measurement vectors. Outcomes are the four
    (click?, sign) pairs.
    """
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    alpha = np.sqrt(nbar)
    cb = two_symbol_codebook(alpha, p)
    splitter = BeamsplitterNetwork(2, [(0, 1)])
    design_beta = complex(np.sqrt(2.0) * alpha)
    rows = np.zeros((3, 4))
    for i, word in enumerate(cb.codewords):
        spd_amp, dr_amp = splitter.apply(word.amplitudes)
        click = spd_click_probability(spd_amp)
        plus, minus = _binary_projective_response(design_beta, complex(dr_amp))
        rows[i] = [(1.0 - click) * plus, (1.0 - click) * minus,
                   click * plus, click * minus]
    labels = ("no-click:+", "no-click:-", "click:+", "click:-")
    return ReceiverOutcome(rows, cb.priors, labels)


def jdr2_gain(nbar: float, p: float) -> float:
    """Per-symbol information of the two-symbol receiver over the best
    single-symbol capacity."""
    info = jdr2_channel(nbar, p).mutual_information()
    return info / 2.0 / bpsk_c1(nbar)


def _jdr2_rows_closed_form(nbars: np.ndarray) -> np.ndarray:
    """Stacked two-symbol receiver channels, one 3 x 4 block per photon number."""
    nb = np.asarray(nbars, dtype=float)
    click = 1.0 - np.exp(-2.0 * nb)
    q2 = 0.5 * (1.0 - np.sqrt(1.0 - np.exp(-8.0 * nb)))
    rows = np.zeros(nb.shape + (3, 4))
    rows[..., 0, 0] = (1.0 - click) * 0.5
    rows[..., 0, 1] = (1.0 - click) * 0.5
    rows[..., 0, 2] = click * 0.5
    rows[..., 0, 3] = click * 0.5
    rows[..., 1, 0] = 1.0 - q2
    rows[..., 1, 1] = q2
    rows[..., 2, 0] = q2
    rows[..., 2, 1] = 1.0 - q2
    return rows


def _s2_priors(ps: np.ndarray) -> np.ndarray:
    ps = np.asarray(ps, dtype=float)
    return np.stack([1.0 - 2.0 * ps, ps, ps], axis=-1)


def jdr2_information_grid(nbars, ps) -> np.ndarray:
    """Per-codeword information, in bits, of the two-symbol receiver on an
    (nbar, p) grid; entry [i, j] uses priors (1 - 2 ps[j], ps[j], ps[j])."""
    nbars = np.asarray(nbars, dtype=float)
    ps = np.asarray(ps, dtype=float)
    rows = _jdr2_rows_closed_form(nbars)[:, None, :, :]
    priors = _s2_priors(ps)[None, :, :]
    return capacity._mutual_information_stack(rows, priors)


def jdr2_gain_grid(nbars, ps) -> np.ndarray:
    """Two-symbol receiver information ratio on an (nbar, p) grid.

    Vectorized over both axes; entry [i, j] equals jdr2_gain(nbars[i], ps[j]).
    """
    nbars = np.asarray(nbars, dtype=float)
    info = jdr2_information_grid(nbars, ps)
    return info / 2.0 / bpsk_c1(nbars)[:, None]


def jdr2_mpe_gain(nbar: float, p: float, tol: float = 1e-8,
                  max_iter: int = 2000) -> float:
    """Information ratio of the minimum-error measurement on the three-word
    ensemble, per symbol, relative to the best single-symbol capacity."""
    cb = two_symbol_codebook(np.sqrt(nbar), p)
    result = mpe_fixed_point(cb, tol=tol, max_iter=max_iter)
    return accessible_information(cb, result.measurement) / 2.0 / bpsk_c1(nbar)


def jdr2_mpe_gain_grid(nbars, ps, tol: float = 1e-8, max_iter: int = 2000):
    """Minimum-error-measurement information ratio on an (nbar, p) grid.

    Solves the fixed point for every p simultaneously per photon number.
    Returns (ratios, certificates) of shape (len(nbars), len(ps)); the
    certificates are the final Yuen-Kennedy-Lax residuals.
    """
    nbars = np.asarray(nbars, dtype=float)
    ps = np.asarray(ps, dtype=float)
    priors = _s2_priors(ps)
    ratios = np.zeros((nbars.size, ps.size))
    certificates = np.zeros_like(ratios)
    for i, nb in enumerate(nbars):
        _, coords = span_embedding(two_symbol_codebook(np.sqrt(nb), 0.25))
        stacked = np.broadcast_to(coords, (ps.size,) + coords.shape)
        w, _, resid, _, _ = _mpe_iterate(
            stacked, priors, tol, max_iter, check_every=5)
        probs = np.abs(np.einsum("...ij,...ik->...kj", w.conj(), stacked)) ** 2
        info = capacity._mutual_information_stack(probs, priors)
        ratios[i] = info / 2.0 / bpsk_c1(nb)
        certificates[i] = resid
    return ratios, certificates


def ber_uncoded_bpsk(nbar):
    """Bit error rate of symbol-by-symbol optimal binary detection."""
    return bpsk_min_error(nbar)


def ber_hadamard_jdr(l: int, nbar, decoding: str = "erase-to-random"):
    """Analytic bit error rate of the butterfly receiver on the Hadamard code.

    The receiver identifies the codeword unless the erasure outcome occurs
    (probability e^{-2^l nbar}); an erasure is decoded as a uniformly random
    codeword guess (the guess may hit the truth), and codeword labels are
    balanced l-bit strings, so each bit is wrong with probability
    e^{-2^l nbar} / 2.
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    if decoding != "erase-to-random":
        raise ValueError(f"unknown decoding rule {decoding!r}")
    arr = np.asarray(nbar, dtype=float)
    if np.any(arr < 0):
        raise ValueError("mean photon number must be nonnegative")
    out = 0.5 * np.exp(-(2.0 ** l) * arr)
    return float(out) if np.isscalar(nbar) or arr.ndim == 0 else out


def _popcount_table(l: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(2 ** l)])


def _mean_and_normal_ci(per_frame_fraction_sum: float, per_frame_sq_sum: float,
                        frames: int):
    mean = per_frame_fraction_sum / frames
    var = max(per_frame_sq_sum / frames - mean * mean, 0.0)
    half = _WILSON_Z * np.sqrt(var / frames)
    return mean, (max(mean - half, 0.0), min(mean + half, 1.0))


def ber_hadamard_jdr_mc(l: int, nbar: float, frames: int, seed: int):
    """Monte Carlo bit error rate of the butterfly receiver, seeded.

    Simulates the erasure channel and the erase-to-random decoding rule over
    codeword frames. Returns (ber, (ci_low, ci_high)) with a normal-theory
    95% interval on the per-frame bit-error fraction.
    """
    if frames < 1:
        raise ValueError("need at least one frame")
    rng = np.random.default_rng(seed)
    erasure = float(np.exp(-(2.0 ** l) * nbar))
    k = 2 ** l
    table = _popcount_table(l)
    erased = rng.random(frames) < erasure
    n_erased = int(erased.sum())
    truth = rng.integers(0, k, size=n_erased)
    guess = rng.integers(0, k, size=n_erased)
    wrong_bits = table[truth ^ guess]
    frac_sum = float(wrong_bits.sum()) / l
    sq_sum = float(((wrong_bits / l) ** 2).sum())
    return _mean_and_normal_ci(frac_sum, sq_sum, frames)


def ber_hadamard_dr_ml(l: int, nbar: float, frames: int, seed: int,
                       chunk: int = 8192):
    """Monte Carlo bit error rate of symbol-by-symbol binary detection of the
    Hadamard code with maximum-likelihood outer decoding.

    Each symbol passes through the binary symmetric channel of the optimal
    single-symbol receiver; the decoder picks the codeword with the highest
    agreement count. Returns (ber, (ci_low, ci_high)).
    """
    if frames < 1:
        raise ValueError("need at least one frame")
    rng = np.random.default_rng(seed)
    q = bpsk_min_error(nbar)
    signs = _sylvester_rows(l)[:, 1:]          # K x n in +-1 form
    k, n = signs.shape
    table = _popcount_table(l)
    frac_sum = 0.0
    sq_sum = 0.0
    done = 0
    while done < frames:
        m = min(chunk, frames - done)
        truth = rng.integers(0, k, size=m)
        flips = rng.random((m, n)) < q
        received = signs[truth] * np.where(flips, -1.0, 1.0)
        scores = received @ signs.T
        decoded = np.argmax(scores, axis=1)
        wrong_bits = table[truth ^ decoded]
        frac_sum += float(wrong_bits.sum()) / l
        sq_sum += float(((wrong_bits / l) ** 2).sum())
        done += m
    return _mean_and_normal_ci(frac_sum, sq_sum, frames)


def monte_carlo_harness(receiver, decoder, frames: int, seed: int, priors=None):
    """Seeded frame-error simulation of a receiver channel with a decoder.

    ``receiver`` is a ReceiverOutcome (or DiscreteChannel with explicit
    ``priors``); ``decoder`` maps an array of outcome indices to input-index
    guesses (an array-like lookup table also works). Returns
    (error_rate, (ci_low, ci_high)) with a Wilson 95% interval; identical
    seeds reproduce identical results.
    """
    if frames < 1:
        raise ValueError("need at least one frame")
    if isinstance(receiver, ReceiverOutcome):
        channel, pri = receiver.channel, receiver.priors
    else:
        channel = receiver if isinstance(receiver, DiscreteChannel) else DiscreteChannel(receiver)
        if priors is None:
            raise ValueError("priors are required when passing a bare channel")
        pri = np.asarray(priors, dtype=float)
    rng = np.random.default_rng(seed)
    k = channel.num_inputs
    inputs = rng.choice(k, size=frames, p=pri)
    draws = rng.random(frames)
    cum = np.cumsum(channel.transition, axis=1)
    outcomes = np.empty(frames, dtype=int)
    for i in range(k):
        sel = inputs == i
        if np.any(sel):
            outcomes[sel] = np.searchsorted(cum[i], draws[sel], side="right")
    outcomes = np.minimum(outcomes, channel.num_outputs - 1)
    if callable(decoder):
        decoded = np.asarray(decoder(outcomes))
    else:
        decoded = np.asarray(decoder)[outcomes]
    errors = int(np.count_nonzero(decoded != inputs))
    rate = errors / frames
    z2 = _WILSON_Z * _WILSON_Z
    denom = 1.0 + z2 / frames
    center = (rate + z2 / (2.0 * frames)) / denom
    half = _WILSON_Z * np.sqrt(
        rate * (1.0 - rate) / frames + z2 / (4.0 * frames * frames)) / denom
    return rate, (max(center - half, 0.0), min(center + half, 1.0))
