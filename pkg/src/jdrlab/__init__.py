"""Coherent-state channel capacities and structured joint-detection receivers.

The library is organized by layer: ``statespace`` holds the coherent-state
geometry (overlaps, Gram matrices, span bases, ensemble entropy),
``measurement`` the optimal and structured quantum measurements,
``capacity`` the information quantities and channel-capacity solvers,
``optics`` the receiver models built from beamsplitters and photon detectors,
and ``sweeps``/``cli`` the parameter sweeps behind the command-line reports.
"""

from .capacity import (
    CapacityPoint,
    DiscreteChannel,
    HadamardDesign,
    binary_entropy,
    blahut_arimoto,
    bpsk_c1,
    bpsk_holevo,
    bpsk_min_error,
    design_point,
    hadamard_capacity,
    hadamard_envelope,
    holevo_ultimate,
    mutual_information,
)
from .exceptions import ConfigError, ConvergenceError, RankDeficiencyError
from .measurement import (
    FactoredMeasurement,
    MpeResult,
    OutcomeMatrix,
    ProjectiveMeasurement,
    accessible_information,
    alphabet_of,
    complete_basis,
    direct_outcome_distribution,
    factor_measurement,
    factored_outcome_distribution,
    factorization_residuals,
    helstrom_binary,
    mpe_fixed_point,
    outcome_probabilities,
    single_symbol_codebook,
    square_root_measurement,
)
from .optics import (
    BeamsplitterNetwork,
    ReceiverOutcome,
    ber_hadamard_dr_ml,
    ber_hadamard_jdr,
    ber_hadamard_jdr_mc,
    ber_uncoded_bpsk,
    dolinar_error_exact,
    dolinar_sliced,
    green_machine,
    hadamard_codebook,
    hadamard_jdr_channel,
    jdr2_channel,
    jdr2_gain,
    jdr2_gain_grid,
    jdr2_information_grid,
    jdr2_mpe_gain,
    jdr2_mpe_gain_grid,
    kennedy_channel,
    monte_carlo_harness,
    random_bpsk_codebook,
    spd_click_probability,
    two_symbol_codebook,
)
from .statespace import (
    Codebook,
    Codeword,
    CoherentAmplitude,
    GramMatrix,
    SpanBasis,
    bpsk_codebook,
    codeword_inner,
    ensemble_entropy,
    gram,
    inner_product,
    orthonormalize,
    span_embedding,
)
from .sweeps import SweepConfig, Table

__version__ = "0.1.0"
