"""Static log-log SVG plots of a spectrum."""

from __future__ import annotations

import io

import numpy as np

from .storage import atomic_write_text


def plot_spectrum_svg(result, path, title: str | None = None) -> None:
    """|f_c1| and |f_c2| against omega; solid where positive, dashed where negative."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    w = result.omegas
    fig, ax = plt.subplots(figsize=(7.0, 4.8))
    for values, label, color in ((result.f_c1, "C1 (propagating)", "tab:blue"),
                                 (result.f_c2, "C2 (evanescent)", "tab:red")):
        mag = np.abs(values)
        if not np.any(mag > 0):
            ax.plot([], [], color=color, label=f"{label}: identically 0")
            continue
        pos = np.where(values > 0, mag, np.nan)
        neg = np.where(values < 0, mag, np.nan)
        ax.plot(w, pos, color=color, ls="-", label=f"{label} > 0")
        ax.plot(w, neg, color=color, ls="--", label=f"{label} < 0")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\omega$ (s$^{-1}$)")
    ax.set_ylabel(r"$|F_\omega|$ (s$^{-3}$)")
    geom = result.geometry
    ax.set_title(title or f"{result.model.get('kind', '')}: a = {geom.separation_a:g} cm, "
                          f"T = {geom.temperature_T:g} K")
    ax.grid(True, which="major", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg")
    plt.close(fig)
    atomic_write_text(path, buf.getvalue())
