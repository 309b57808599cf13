"""Figures for density scans, written next to the CSV/JSON output.

matplotlib is imported lazily with the Agg backend, so the numerical
library works without it.
"""

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _figsize(scale=1.0):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    width = 6.0 * scale
    return width, width * golden


def plot_density(series, path, peak=None, asymptote=None, title=None):
    """|Psi(x, t)|^2 against t/t_f, with an optional peak marker and
    horizontal asymptote. Returns the written path."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    ax.plot(series.t_over_tf, series.density, lw=1.2, color="k")
    if peak is not None:
        ax.axvline(peak.t_p_over_tf, ls=":", color="tab:red", lw=1)
        ax.plot([peak.t_p_over_tf], [peak.peak_density], "o", color="tab:red", ms=4,
                label=f"$t_p/t_f$ = {peak.t_p_over_tf:.3f}")
    if asymptote is not None:
        ax.axhline(asymptote, ls="--", color="tab:blue", lw=1, label=r"$|T(k_0)|^2$")
    ax.set_xlabel(r"$t/t_f$")
    unit = "" if series.mode == "cutoff" else r" (nm$^{-1}$)"
    ax.set_ylabel(r"$|\Psi(x,t)|^2$" + unit)
    ax.set_xlim(series.t_over_tf[0], series.t_over_tf[-1])
    ax.set_ylim(bottom=0)
    if title:
        ax.set_title(title)
    if peak is not None or asymptote is not None:
        ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_panels(panels, path):
    """Stack several density scans vertically, one panel each.

    ``panels`` is a sequence of ``(label, series, peak)``.
    """
    plt = _pyplot()
    w, h = _figsize()
    fig, axes = plt.subplots(len(panels), 1, figsize=(w, 0.6 * h * len(panels)), sharex=True)
    axes = np.atleast_1d(axes)
    for ax, (label, series, peak) in zip(axes, panels):
        ax.plot(series.t_over_tf, series.density, color="k", lw=1.1)
        if peak is not None:
            ax.axvline(peak.t_p_over_tf, ls=":", color="tab:red", lw=1)
        ax.text(0.97, 0.85, label, transform=ax.transAxes, ha="right")
        ax.set_ylim(bottom=0)
        ax.set_ylabel(r"$|\Psi(d,t)|^2$")
    axes[-1].set_xlabel(r"$t/t_f$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
