"""Matplotlib rendering of the report figures (written next to the CSV data)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gatesim import QUBIT_ORDER
from .optics import INITIAL_STATES

PANEL_TAGS = ("(a)", "(b)", "(c)", "(d)")


def render_fig1(spectra: dict, conditional_rows, path: str):
    """Four stacked absorption/gain panels with the conditional lines marked."""
    fig, axes = plt.subplots(4, 1, figsize=(6.0, 9.0), sharex=True)
    marks = {r.frequency_rel: r for r in conditional_rows}
    for ax, tag, label in zip(axes, PANEL_TAGS, INITIAL_STATES):
        spec = spectra[label]
        ax.plot(spec.energies, spec.signal, lw=1.2, color="tab:blue")
        ax.axhline(0.0, color="0.6", lw=0.6)
        for freq, row in marks.items():
            ax.axvline(freq, color="0.8", lw=0.6, ls="--", zorder=0)
        ax.set_ylabel("absorption (arb. u.)")
        ax.text(0.02, 0.85, f"{tag} initial {label}", transform=ax.transAxes)
    for freq, row in marks.items():
        axes[0].text(freq, axes[0].get_ylim()[1] * 0.98,
                     f"q{row.qubit}={row.active_value}",
                     ha="center", va="top", fontsize=8, color="0.3")
    axes[-1].set_xlabel("photon energy $-\\,E_{X_0}$ (meV)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fig2(trajectory, pulses, initial_states, path: str):
    """Populations of the qubit configurations under the pulse sequence."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    styles = {"01": "-", "00": "--", "10": "-.", "11": ":"}
    colors = {"00": "tab:gray", "10": "tab:green",
              "01": "tab:blue", "11": "tab:red"}
    t = trajectory.times
    for init in initial_states:
        col = QUBIT_ORDER.index(init)
        amps = trajectory.amplitudes[:, :, col] \
            if trajectory.amplitudes.ndim == 3 else trajectory.amplitudes
        for j, q in enumerate(QUBIT_ORDER):
            pop = np.abs(amps[:, j]) ** 2
            if pop.max() < 1e-3:
                continue
            ax.plot(t, pop, ls=styles[init], color=colors[q], lw=1.2,
                    label=f"$|c_{{{q}}}|^2$ from $|{init}\\rangle$")
    top = ax.twinx()
    for p in pulses:
        tt = np.linspace(*p.window(), 200)
        top.fill_between(tt, 0.0, p.envelope_value(tt), alpha=0.15,
                         color="0.4", lw=0)
        top.annotate(f"{p.frequency:.2f} meV",
                     (p.center_time, 1.02), ha="center", fontsize=8)
    top.set_ylim(0, 1.3)
    top.set_yticks([])
    ax.set_xlabel("time (ps)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(fontsize=7, loc="center right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(rows, path: str):
    """Leakage and off-resonant disturbance against pulse duration."""
    taus = [r["tau_ps"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(taus, [r["max_leakage"] for r in rows], "o-", label="max leakage")
    ax.loglog(taus, [max(r["offres_final_change"], 1e-14) for r in rows],
              "s--", label="off-resonant change")
    ax.set_xlabel(r"pulse duration $\tau$ (ps)")
    ax.set_ylabel("probability")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


__all__ = ["render_fig1", "render_fig2", "render_sweep"]
