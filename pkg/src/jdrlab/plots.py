"""Figure rendering for the sweep tables.

Figures are built directly on matplotlib Figure objects (no pyplot state), so
rendering works headless and never touches the global backend.
"""

from __future__ import annotations

from matplotlib.figure import Figure

from .sweeps import Table

_SAVE_OPTS = {"dpi": 150, "bbox_inches": "tight", "metadata": {"Software": "jdrlab"}}


def _column(table: Table, name: str) -> list:
    idx = table.columns.index(name)
    return [row[idx] for row in table.rows]


def pie_curves_figure(table: Table) -> Figure:
    """Photon information efficiency versus mean photon number per mode."""
    fig = Figure(figsize=(7.0, 5.0))
    ax = fig.add_subplot(1, 1, 1)
    nbar = _column(table, "nbar")
    curves = [
        ("pie_ultimate", "ultimate limit", {"color": "C0", "lw": 2.0}),
        ("pie_bpsk_holevo", "binary Holevo limit", {"color": "C3", "lw": 2.0}),
        ("pie_hadamard_envelope", "Hadamard butterfly envelope",
         {"color": "C2", "ls": ":", "lw": 2.2}),
        ("pie_jdr2", "two-symbol joint receiver", {"color": "C4", "ls": "-.", "lw": 1.8}),
        ("pie_c1_dolinar", "best single-symbol receiver",
         {"color": "C1", "ls": "--", "lw": 2.0}),
    ]
    for name, label, style in curves:
        ax.plot(nbar, _column(table, name), label=label, **style)
    ax.set_xscale("log")
    ax.set_xlabel(r"mean photon number per mode $\bar{n}$")
    ax.set_ylabel("photon information efficiency (bits/photon)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def ber_curves_figure(table: Table) -> Figure:
    """Bit error rate versus mean photon number per mode."""
    fig = Figure(figsize=(7.0, 5.0))
    ax = fig.add_subplot(1, 1, 1)
    nbar = _column(table, "nbar")
    ax.plot(nbar, _column(table, "ber_uncoded_dr"), "C1--", lw=2.0,
            label="uncoded, symbol-by-symbol")
    ax.plot(nbar, _column(table, "ber_hadamard_jdr_analytic"), "C2-", lw=2.0,
            label="Hadamard code, butterfly receiver")
    ax.plot(nbar, _column(table, "ber_hadamard_jdr_montecarlo"), "C2o", ms=3.5,
            alpha=0.6, label="butterfly receiver (Monte Carlo)")
    if "ber_hadamard_dr_ml_montecarlo" in table.columns:
        ax.plot(nbar, _column(table, "ber_hadamard_dr_ml_montecarlo"), "C0-.",
                lw=1.8, label="Hadamard code, symbol-by-symbol + ML")
    ax.set_xscale("log")
    ax.set_yscale("log")
    floor = 1.0 / max(int(table.parameters.get("frames", 10 ** 5)), 10)
    ax.set_ylim(bottom=max(floor * 1e-2, 1e-12))
    ax.set_xlabel(r"mean photon number per mode $\bar{n}$")
    ax.set_ylabel("bit error rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


FIGURES = {
    "pie-curves": pie_curves_figure,
    "ber-curves": ber_curves_figure,
}


def render(table: Table, path) -> bool:
    """Render the figure for a table, if it has one, to an image file."""
    builder = FIGURES.get(table.command)
    if builder is None:
        return False
    fig = builder(table)
    fig.savefig(path, **_SAVE_OPTS)
    return True
