"""Parameter sweeps behind the command-line reports.

Each builder returns a Table: a stable column list plus rows of plain Python
scalars, ready for CSV/JSON serialization or plotting. Identical
configurations (including seeds) always produce identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import capacity, measurement, optics, statespace
from .exceptions import ConfigError

# p-grid used whenever the two-symbol ensemble is optimized over its prior.
JDR2_PRIOR_POINTS = 501


@dataclass(frozen=True)
class SweepConfig:
    """Grid and output settings shared by the sweep commands."""

    nbar_min: float = 1e-4
    nbar_max: float = 10.0
    points_per_decade: int = 60
    l_max: int = 20
    seed: int = 20260808
    output_format: str = "csv"
    l: int = 8
    frames: int = 100000

    def __post_init__(self):
        if self.nbar_min <= 0:
            raise ConfigError("nbar-min must be positive")
        if self.nbar_min >= self.nbar_max:
            raise ConfigError("nbar-min must be below nbar-max")
        if self.points_per_decade < 1:
            raise ConfigError("points-per-decade must be at least 1")
        if self.l_max < 1 or self.l < 1:
            raise ConfigError("code order parameters must be at least 1")
        if self.frames < 1:
            raise ConfigError("frames must be at least 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")


@dataclass(frozen=True)
class Table:
    """Column-labeled rows plus the invocation that produced them."""

    command: str
    parameters: dict
    columns: tuple[str, ...]
    rows: list = field(default_factory=list)


def nbar_grid(cfg: SweepConfig) -> np.ndarray:
    """Logarithmic photon-number grid implied by a sweep configuration."""
    decades = math.log10(cfg.nbar_max / cfg.nbar_min)
    points = max(int(round(cfg.points_per_decade * decades)) + 1, 2)
    return np.logspace(math.log10(cfg.nbar_min), math.log10(cfg.nbar_max), points)


def pie_table(cfg: SweepConfig) -> Table:
    """Photon-information-efficiency curves of the main receivers.

    Columns, per grid photon number: the ultimate limit g(nbar)/nbar, the
    binary-modulation Holevo limit, the best single-symbol receiver, the
    Hadamard-code butterfly receiver envelope (with its best code order), and
    the two-symbol joint receiver optimized over its prior.
    """
    grid = nbar_grid(cfg)
    pie_ultimate = capacity.holevo_ultimate(grid) / grid
    pie_holevo = capacity.bpsk_holevo(grid) / grid
    pie_c1 = capacity.bpsk_c1(grid) / grid
    best_l, pie_envelope = capacity.hadamard_envelope(grid, cfg.l_max)
    ps = np.linspace(0.0, 0.5, JDR2_PRIOR_POINTS)
    info2 = optics.jdr2_information_grid(grid, ps)
    pie_jdr2 = info2.max(axis=1) / (2.0 * grid)
    columns = ("nbar", "pie_ultimate", "pie_bpsk_holevo", "pie_c1_dolinar",
               "pie_hadamard_envelope", "hadamard_best_l", "pie_jdr2")
    rows = [
        (float(grid[i]), float(pie_ultimate[i]), float(pie_holevo[i]),
         float(pie_c1[i]), float(pie_envelope[i]), int(best_l[i]),
         float(pie_jdr2[i]))
        for i in range(grid.size)
    ]
    params = {"nbar_min": cfg.nbar_min, "nbar_max": cfg.nbar_max,
              "points_per_decade": cfg.points_per_decade, "l_max": cfg.l_max,
              "jdr2_prior_points": JDR2_PRIOR_POINTS}
    return Table("pie-curves", params, columns, rows)


def ber_table(cfg: SweepConfig, l: int | None = None,
              include_dr_ml: bool = False) -> Table:
    """Bit error rates of the Hadamard-code butterfly receiver vs. uncoded
    detection, with a seeded Monte Carlo cross-check of the analytic rate."""
    l = cfg.l if l is None else l
    grid = nbar_grid(cfg)
    columns = ["nbar", "ber_uncoded_dr", "ber_hadamard_jdr_analytic",
               "ber_hadamard_jdr_montecarlo", "mc_ci_low", "mc_ci_high"]
    if include_dr_ml:
        columns.append("ber_hadamard_dr_ml_montecarlo")
    rows = []
    for i, nb in enumerate(grid):
        uncoded = float(optics.ber_uncoded_bpsk(nb))
        analytic = float(optics.ber_hadamard_jdr(l, nb))
        mc, (lo, hi) = optics.ber_hadamard_jdr_mc(
            l, nb, cfg.frames, np.random.SeedSequence([cfg.seed, i]))
        row = [float(nb), uncoded, analytic, float(mc), float(lo), float(hi)]
        if include_dr_ml:
            ml, _ = optics.ber_hadamard_dr_ml(
                l, nb, cfg.frames, np.random.SeedSequence([cfg.seed, i, 1]))
            row.append(float(ml))
        rows.append(tuple(row))
    params = {"nbar_min": cfg.nbar_min, "nbar_max": cfg.nbar_max,
              "points_per_decade": cfg.points_per_decade, "l": l,
              "frames": cfg.frames, "seed": cfg.seed,
              "include_dr_ml": include_dr_ml}
    return Table("ber-curves", params, tuple(columns), rows)


def jdr2_gain_table(cfg: SweepConfig, prior_points: int = JDR2_PRIOR_POINTS) -> Table:
    """Superadditivity report for the two-symbol ensemble.

    Scans the (nbar, p) grid for the structured beamsplitter receiver and for
    the minimum-error measurement, and reports each argmax of the per-symbol
    information over the best single-symbol capacity. The minimum-error row
    re-solves the fixed point at its argmax and carries the resulting
    optimality certificate.
    """
    grid = nbar_grid(cfg)
    ps = np.linspace(0.0, 0.5, prior_points)

    structured = optics.jdr2_gain_grid(grid, ps)
    i, j = np.unravel_index(np.argmax(structured), structured.shape)
    rows = [("structured-jdr", float(structured[i, j]), float(grid[i]),
             float(ps[j]), None)]

    mpe_ratio, _ = optics.jdr2_mpe_gain_grid(grid, ps)
    i, j = np.unravel_index(np.argmax(mpe_ratio), mpe_ratio.shape)
    best = measurement.mpe_fixed_point(
        optics.two_symbol_codebook(np.sqrt(grid[i]), ps[j]))
    rows.append(("mpe-measurement", float(mpe_ratio[i, j]), float(grid[i]),
                 float(ps[j]), float(best.certificate)))

    columns = ("receiver", "max_ratio", "nbar_star", "p_star", "ykl_certificate")
    params = {"nbar_min": cfg.nbar_min, "nbar_max": cfg.nbar_max,
              "points_per_decade": cfg.points_per_decade,
              "prior_points": prior_points}
    return Table("jdr2-gain", params, columns, rows)


def theorem_table(length: int, size: int, nbar: float = 1.0, seed: int = 20260808,
                  trials: int = 1) -> Table:
    """Factored-vs-direct agreement of the joint measurement on random codebooks.

    Each trial draws a random binary-phase codebook, factors its square-root
    measurement into a codeword unitary plus per-symbol measurements, and
    reports the worst total-variation gap between the factored and direct
    outcome distributions along with the unitarity defect.
    """
    if 2 ** length > 4096:
        raise ConfigError("codeword length is beyond the 4096-dimension cap")
    if size > 2 ** length:
        raise ConfigError("codebook size exceeds the number of distinct words")
    if nbar <= 0:
        raise ConfigError("nbar must be positive")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    alpha = math.sqrt(nbar)
    rows = []
    for t in range(trials):
        cb = optics.random_bpsk_codebook(
            length, size, alpha, np.random.default_rng(np.random.SeedSequence([seed, t])))
        symbol, _ = measurement.square_root_measurement(
            measurement.single_symbol_codebook(measurement.alphabet_of(cb)))
        factored = measurement.factor_measurement(cb, symbol)
        tv, unit = measurement.factorization_residuals(factored, cb)
        rows.append((t, length, size, seed, float(tv), float(unit)))
    columns = ("trial", "n", "k", "seed", "max_tv_distance", "unitarity_residual")
    params = {"n": length, "k": size, "nbar": nbar, "seed": seed, "trials": trials}
    return Table("theorem-one", params, columns, rows)


def design_table(pie: float, power_watts: float, wavelength_m: float) -> Table:
    """Photon flux and bit rate of a link design point."""
    if pie < 0 or power_watts <= 0 or wavelength_m <= 0:
        raise ConfigError("need pie >= 0, power > 0 and wavelength > 0")
    photon_rate, bit_rate = capacity.design_point(pie, power_watts, wavelength_m)
    columns = ("pie_bits_per_photon", "power_watts", "wavelength_m",
               "photon_rate_hz", "bit_rate_bps")
    rows = [(float(pie), float(power_watts), float(wavelength_m),
             float(photon_rate), float(bit_rate))]
    params = {"pie": pie, "power_watts": power_watts, "wavelength_m": wavelength_m}
    return Table("design-point", params, columns, rows)


def _check_overlap():
    nbar = 0.37
    got = statespace.inner_product(math.sqrt(nbar), -math.sqrt(nbar))
    err = abs(got - math.exp(-2.0 * nbar))
    return err < 1e-12, f"antipodal overlap error {err:.2e}"


def _check_srm_helstrom():
    worst = 0.0
    for gamma in (0.1, 0.5, 0.9):
        nbar = -math.log(gamma) / 2.0
        cb = statespace.bpsk_codebook(math.sqrt(nbar))
        _, outcomes = measurement.square_root_measurement(cb)
        err = 1.0 - outcomes.success_probability(cb.priors)
        worst = max(worst, abs(err - measurement.helstrom_binary(gamma, 0.5)))
    return worst < 1e-10, f"worst gap to binary bound {worst:.2e}"


def _check_green_machine():
    for l in range(1, 5):
        net = optics.green_machine(l)
        if net.stage_count != l * 2 ** (l - 1):
            return False, f"stage count wrong at l={l}"
        m = net.matrix()
        defect = np.abs(m @ m - np.eye(2 ** l)).max()
        if defect > 1e-10:
            return False, f"involution defect {defect:.2e} at l={l}"
    return True, "orders 1-4 self-inverse with correct coupling counts"


def _check_hadamard_information():
    worst = 0.0
    for l in range(1, 7):
        ro = optics.hadamard_jdr_channel(l, 1e-2)
        per_word = ro.mutual_information()
        worst = max(worst, abs(per_word / 2 ** l - capacity.hadamard_capacity(l, 1e-2)))
    return worst < 1e-10, f"worst rate mismatch {worst:.2e}"


def _check_blahut_arimoto():
    q = 0.11
    bsc = [[1 - q, q], [q, 1 - q]]
    cap, _ = capacity.blahut_arimoto(bsc, tol=1e-9)
    err = abs(cap - (1.0 - capacity.binary_entropy(q)))
    return err < 1e-6, f"binary symmetric channel gap {err:.2e}"


def _check_pie_cap():
    target = 2.0 / math.log(2.0)
    got = capacity.bpsk_c1(1e-4) / 1e-4
    rel = abs(got - target) / target
    return rel < 0.01, f"single-symbol efficiency cap off by {rel:.2%}"


def _check_design_point():
    _, bit_rate = capacity.design_point(10.0, 3.4e-12, 1.55e-6)
    rel = abs(bit_rate - 0.266e9) / 0.266e9
    return rel < 0.02, f"bit rate off the 0.266 Gbps mark by {rel:.2%}"


def _check_sliced_feedback():
    err = optics.dolinar_sliced(0.2, 1000)
    gap = abs(err - optics.dolinar_error_exact(0.2))
    return gap < 1e-3, f"1000-slice gap to the exact bound {gap:.2e}"


def _check_factorization():
    tab = theorem_table(2, 3, nbar=1.0, seed=7, trials=1)
    tv, unit = tab.rows[0][4], tab.rows[0][5]
    return tv < 1e-10 and unit < 1e-10, f"tv {tv:.2e}, unitarity {unit:.2e}"


def _check_mpe_certificate():
    cb = statespace.bpsk_codebook(math.sqrt(0.2))
    res = measurement.mpe_fixed_point(cb)
    err = 1.0 - res.success_probability
    gap = abs(err - measurement.helstrom_binary(math.exp(-0.4), 0.5))
    return res.certificate >= -1e-8 and gap < 1e-8, \
        f"certificate {res.certificate:.2e}, binary-bound gap {gap:.2e}"


_SELF_CHECKS = (
    ("coherent-overlap", _check_overlap),
    ("srm-binary-optimal", _check_srm_helstrom),
    ("green-machine", _check_green_machine),
    ("hadamard-information", _check_hadamard_information),
    ("blahut-arimoto", _check_blahut_arimoto),
    ("single-symbol-pie-cap", _check_pie_cap),
    ("design-point", _check_design_point),
    ("sliced-feedback", _check_sliced_feedback),
    ("factorization", _check_factorization),
    ("mpe-certificate", _check_mpe_certificate),
)


def self_check() -> tuple[Table, bool]:
    """Run the oracle suite; returns its report table and overall pass flag."""
    rows = []
    all_ok = True
    for name, check in _SELF_CHECKS:
        ok, detail = check()
        all_ok = all_ok and ok
        rows.append((name, "pass" if ok else "FAIL", detail))
    table = Table("self-check", {}, ("check", "status", "detail"), rows)
    return table, all_ok
