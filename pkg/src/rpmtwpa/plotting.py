"""SVG figures for spectra, capacitance sweeps and loss sweeps.

Figures are rendered with the Agg/SVG backends only; the SVG writer is
configured so identical inputs give identical files (fixed hash salt, no
timestamp).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 7.0

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "image.cmap": "viridis",
    "svg.hashsalt": "rpmtwpa",
    "svg.fonttype": "path",
}

GAIN_COLOR = "#d4a017"
SQUEEZE_COLOR = "black"


def _new(nrows=1, ncols=2, height=None):
    with matplotlib.rc_context(params):
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(fig_width, height or fig_width * golden_mean / ncols * nrows + 0.6),
            constrained_layout=True,
        )
    return fig, axes


def save(fig, path, description=""):
    """Write ``fig`` as SVG; ``description`` (the config echo) goes into the metadata."""
    with matplotlib.rc_context(params):
        fig.savefig(path, format="svg", metadata={"Date": None, "Description": description})
    plt.close(fig)


def _mark_flags(ax, freqs_ghz, flags):
    bad = flags != "ok"
    for f in freqs_ghz[bad]:
        ax.axvline(f, color="0.8", lw=0.6, zorder=0)


def plot_spectrum(result, path, description=""):
    """Gain (with and without output loss) and |squeezing| against signal frequency."""
    f = result.frequencies / 1e9
    fig, (ax_g, ax_s) = _new()
    ax_g.plot(f, result.gain_db, color=GAIN_COLOR, label="lossless")
    if result.eta < 1:
        ax_g.plot(f, result.lossy_gain_db, color=GAIN_COLOR, ls="--", label=f"eta = {result.eta:g}")
        ax_g.legend(frameon=False)
    ax_s.plot(f, result.abs_squeeze_db, color=SQUEEZE_COLOR)
    for ax in (ax_g, ax_s):
        _mark_flags(ax, f, result.flags)
        ax.set_xlabel("Signal frequency (GHz)")
    ax_g.set_ylabel("Gain (dB)")
    ax_s.set_ylabel("|Squeezing| (dB)")
    save(fig, path, description)


def plot_heatmap(sweep, path, description="", value_label=None, value_scale=1.0):
    """Metric over (C_c, C_r); invalid or flagged cells are left blank."""
    fig, ax = _new(1, 1, height=fig_width * golden_mean * 0.8)
    data = np.ma.masked_invalid(sweep.field * value_scale)
    cc = sweep.cc_values * 1e15
    cr = sweep.cr_values * 1e12
    if cc.size > 1 and cr.size > 1:
        mesh = ax.pcolormesh(cc, cr, data, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=value_label or sweep.metric_name)
        ax.set_xlabel("C_c (fF)")
        ax.set_ylabel("C_r (pF)")
    elif cc.size > 1:
        ax.plot(cc, data[0], marker="o")
        ax.set_xlabel("C_c (fF)")
        ax.set_ylabel(value_label or sweep.metric_name)
    else:
        ax.plot(cr, data[:, 0], marker="o")
        ax.set_xlabel("C_r (pF)")
        ax.set_ylabel(value_label or sweep.metric_name)
    save(fig, path, description)


def plot_spectral_map(spectra, axis_values, axis_label, path, description=""):
    """Gain and |squeezing| as functions of signal frequency and one swept capacitance."""
    f = spectra[0].frequencies / 1e9
    gain = np.ma.masked_invalid(np.array([s.lossy_gain_db for s in spectra]))
    squeeze = np.ma.masked_invalid(np.array([s.abs_squeeze_db for s in spectra]))
    fig, (ax_g, ax_s) = _new()
    for ax, data, label in ((ax_g, gain, "Gain (dB)"), (ax_s, squeeze, "|Squeezing| (dB)")):
        if len(spectra) > 1:
            mesh = ax.pcolormesh(f, axis_values, data, shading="nearest")
            fig.colorbar(mesh, ax=ax, label=label)
            ax.set_ylabel(axis_label)
        else:
            ax.plot(f, data[0])
            ax.set_ylabel(label)
        ax.set_xlabel("Signal frequency (GHz)")
    save(fig, path, description)


def plot_loss_sweep(sweep, path, description=""):
    """One gain and one |squeezing| trace per output transmission."""
    fig, (ax_g, ax_s) = _new()
    colors = plt.get_cmap("viridis")(np.linspace(0, 0.9, len(sweep.spectra)))
    for color, eta, result in zip(colors, sweep.etas, sweep.spectra):
        f = result.frequencies / 1e9
        ax_g.plot(f, result.lossy_gain_db, color=color, label=f"{eta:g}")
        ax_s.plot(f, result.abs_squeeze_db, color=color)
    ax_g.legend(title="eta", frameon=False, ncol=2)
    ax_g.set_ylabel("Gain (dB)")
    ax_s.set_ylabel("|Squeezing| (dB)")
    for ax in (ax_g, ax_s):
        ax.set_xlabel("Signal frequency (GHz)")
    save(fig, path, description)


def plot_front(cc, cr, values1, values2, names, path, description=""):
    fig, ax = _new(1, 1, height=fig_width * golden_mean * 0.8)
    order = np.argsort(values1, kind="stable")
    ax.plot(np.asarray(values1)[order], np.asarray(values2)[order], marker="o", color=SQUEEZE_COLOR)
    ax.set_xlabel(names[0])
    ax.set_ylabel(names[1])
    save(fig, path, description)
