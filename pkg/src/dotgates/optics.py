"""Dipole matrix elements and state-conditioned absorption spectra.

The interband polarization operator is P = sum M_{mu nu} d_nu c_mu with
M_{mu nu} = mu_cv * <phi_e_mu | phi_h_nu>; the bulk dipole scale mu_cv is
set to 1, so field amplitudes elsewhere are quoted in Rabi units M*E.

Lines are exact many-body energy differences; Lorentzian broadening is
applied for plotting only.  The photon energy axis is offset so the
groundstate exciton X0 sits at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .confinement import SingleParticleBasis, hermite_scaled
from .errors import ParameterDomainError, ResolutionError
from .manybody import ManyBodySpectrum, pair_list

INITIAL_STATES = ("vac", "X0", "X1", "X0+X1")


def envelope_overlap_1d(m: int, n: int, l_a: float, l_b: float,
                        n_nodes: int = 32) -> float:
    """<phi_m^(a) | phi_n^(b)> for oscillator lengths l_a, l_b (Gauss-Hermite).

    Vanishes by parity for m, n of different parity; exact otherwise for
    the polynomial orders used here.
    """
    if (m - n) % 2:
        return 0.0
    c = np.sqrt(0.5 / l_a**2 + 0.5 / l_b**2)
    t, w = np.polynomial.hermite.hermgauss(n_nodes)
    x = t / c
    ha = hermite_scaled(m, x / l_a)
    hb = hermite_scaled(n, x / l_b)
    return float(np.sum(w * ha[m] * hb[n]) / (c * np.sqrt(l_a * l_b)))


def single_particle_dipoles(basis: SingleParticleBasis) -> np.ndarray:
    """M[mu, nu] = envelope overlap of electron mu and hole nu (mu_cv = 1)."""
    l_e = basis.electrons[0].oscillator_length
    l_h = basis.holes[0].oscillator_length
    n_max = max(max(s.n_x, s.n_y) for s in basis.electrons + basis.holes)
    ov = np.zeros((n_max + 1, n_max + 1))
    for m in range(n_max + 1):
        for n in range(n_max + 1):
            ov[m, n] = envelope_overlap_1d(m, n, l_e, l_h)
    m_mat = np.empty((basis.n_electrons, basis.n_holes))
    for i, se in enumerate(basis.electrons):
        for j, sh in enumerate(basis.holes):
            # z factor is 1: same ground subband envelope for both species
            m_mat[i, j] = ov[se.n_x, sh.n_x] * ov[se.n_y, sh.n_y]
    return m_mat


@dataclass
class DipoleTable:
    """Single-particle and many-body matrix elements of P^dagger."""

    elements: np.ndarray  # (n_e, n_h) single-particle M
    vac_to_exciton: np.ndarray  # <x|P^dag|vac>, (n_x,)
    exciton_to_biexciton: np.ndarray  # <lam|P^dag|x>, (n_bx, n_x)


def dipole_table(basis: SingleParticleBasis, excitons, biexcitons) -> DipoleTable:
    """Apply P^dagger algebraically to vac and to every exciton.

    <x|P^dag|vac> = sum M_{mu nu} Psi^x_{mu nu};
    <lam|P^dag|x> expands over ordered pairs with the antisymmetrization
    signs of the determinant basis.
    """
    m_mat = single_particle_dipoles(basis)
    vac_to_x = np.array([np.tensordot(m_mat, x.amplitudes, axes=2) for x in excitons])

    pairs_e = pair_list(basis.n_electrons)
    pairs_h = pair_list(basis.n_holes)
    n_x = len(excitons)
    n_bx = len(biexcitons)
    # G^x[(ij),(kl)] = M_ik X_jl - M_il X_jk - M_jk X_il + M_jl X_ik
    gx = np.empty((n_x, len(pairs_e), len(pairs_h)))
    for s, x in enumerate(excitons):
        amp = x.amplitudes
        for a, (i, j) in enumerate(pairs_e):
            for b, (k, l) in enumerate(pairs_h):
                gx[s, a, b] = (m_mat[i, k] * amp[j, l] - m_mat[i, l] * amp[j, k]
                               - m_mat[j, k] * amp[i, l] + m_mat[j, l] * amp[i, k])
    bx_mat = np.array([bx.amplitudes.ravel() for bx in biexcitons])  # (n_bx, pp)
    x_to_bx = bx_mat @ gx.reshape(n_x, -1).T  # (n_bx, n_x)
    return DipoleTable(elements=m_mat, vac_to_exciton=vac_to_x,
                       exciton_to_biexciton=x_to_bx)


@dataclass
class SpectralLine:
    energy: float  # meV, relative to E_X0
    weight: float  # signed; >0 absorption, <0 gain
    initial: str
    final: str


@dataclass
class Spectrum:
    initial_state: str
    energies: np.ndarray  # grid, meV relative to E_X0
    signal: np.ndarray
    lines: list[SpectralLine] = field(default_factory=list)
    broadening: float = 0.5  # Lorentzian HWHM, meV


def _lorentzian(e_grid, center, hwhm):
    return (hwhm / np.pi) / ((e_grid - center) ** 2 + hwhm**2)


def absorption_spectrum(initial_state: str, spectrum: ManyBodySpectrum,
                        dipoles: DipoleTable, broadening: float = 0.5,
                        window: tuple[float, float] = (-20.0, 40.0),
                        n_points: int = 2001) -> Spectrum:
    """Absorption (positive) and gain (negative) lines from one initial state.

    Upward lines carry |<f|P^dag|i>|^2 at E_f - E_i, downward lines carry
    -|<i|P^dag|f>|^2 at E_i - E_f (stimulated emission into the state
    below).  Energies are relative to the groundstate exciton.
    """
    if initial_state not in INITIAL_STATES:
        raise ParameterDomainError(
            f"initial state must be one of {INITIAL_STATES}, got {initial_state!r}"
        )
    if broadening <= 0:
        raise ParameterDomainError("broadening must be positive")
    qm = spectrum.qubit_map
    e_x0 = qm.energies["10"]
    x_energies = spectrum.exciton_energies()
    bx_energies = spectrum.biexciton_energies()

    lines: list[SpectralLine] = []

    def add(energy_abs, weight, init, fin):
        e_rel = energy_abs - e_x0
        if window[0] <= e_rel <= window[1] and abs(weight) > 1e-14:
            lines.append(SpectralLine(float(e_rel), float(weight), init, fin))

    if initial_state == "vac":
        for k, e in enumerate(x_energies):
            add(e, dipoles.vac_to_exciton[k] ** 2, "vac", f"x{k}")
    else:
        if initial_state in ("X0", "X1"):
            qbit = "10" if initial_state == "X0" else "01"
            i_x = qm.exciton_indices[qbit]
            e_i = x_energies[i_x]
            # upward to biexcitons
            for k, e in enumerate(bx_energies):
                add(e - e_i, dipoles.exciton_to_biexciton[k, i_x] ** 2,
                    initial_state, f"xx{k}")
            # downward to vacuum (gain)
            add(e_i, -dipoles.vac_to_exciton[i_x] ** 2, initial_state, "vac")
        else:  # biexciton X0+X1: only gain lines down to single excitons
            i_bx = qm.biexciton_index
            e_i = bx_energies[i_bx]
            for k, e in enumerate(x_energies):
                add(e_i - e, -dipoles.exciton_to_biexciton[i_bx, k] ** 2,
                    initial_state, f"x{k}")

    grid = np.linspace(window[0], window[1], n_points)
    signal = np.zeros_like(grid)
    for line in lines:
        signal += line.weight * _lorentzian(grid, line.energy, broadening)
    return Spectrum(initial_state=initial_state, energies=grid, signal=signal,
                    lines=lines, broadening=broadening)


@dataclass
class ConditionalRow:
    frequency: float  # meV, absolute photon energy
    frequency_rel: float  # meV, relative to omega_X0
    qubit: int  # which qubit conditions the line (1 or 2)
    active_value: int  # the qubit value for which the line exists
    transition: str  # e.g. "|01> <-> |11>"
    strength: float  # oscillator strength of the active transition
    inactive_strength: float  # residual weight at this frequency otherwise
    contrast: float


def conditional_transition_table(spectrum: ManyBodySpectrum, dipoles: DipoleTable,
                                 min_splitting: float = 1.0) -> list[ConditionalRow]:
    """The four conditionally present lines and their on/off contrast.

    The inactive strength collects line weight within +-min_splitting/2 of
    the row frequency in the spectra of the complementary qubit setting;
    frequencies closer than ``min_splitting`` raise ResolutionError.
    """
    qm = spectrum.qubit_map
    delta = qm.delta
    w_x0 = qm.energies["10"]
    w_x1 = qm.energies["01"]
    freqs = {
        "w_X0": w_x0,
        "w_X0-D": w_x0 - delta,
        "w_X1": w_x1,
        "w_X1-D": w_x1 - delta,
    }
    vals = sorted(freqs.values())
    gaps = np.diff(vals)
    if np.any(gaps < min_splitting):
        raise ResolutionError(
            f"conditional lines separated by {gaps.min():.4f} meV "
            f"< resolvable splitting {min_splitting} meV (delta = {delta:.4f})"
        )

    i_x0 = qm.exciton_indices["10"]
    i_x1 = qm.exciton_indices["01"]
    i_bx = qm.biexciton_index
    s_vac_x0 = dipoles.vac_to_exciton[i_x0] ** 2
    s_vac_x1 = dipoles.vac_to_exciton[i_x1] ** 2
    s_x1_bx = dipoles.exciton_to_biexciton[i_bx, i_x1] ** 2
    s_x0_bx = dipoles.exciton_to_biexciton[i_bx, i_x0] ** 2

    # all transition lines reachable from any computational state, with the
    # qubit configurations in which each line appears
    x_energies = spectrum.exciton_energies()
    bx_energies = spectrum.biexciton_energies()
    line_pool = []  # (photon_energy, strength, set of configurations)
    for k, e in enumerate(x_energies):
        line_pool.append((e, dipoles.vac_to_exciton[k] ** 2, {"00"}))
        line_pool.append((bx_energies[i_bx] - e,
                          dipoles.exciton_to_biexciton[i_bx, k] ** 2, {"11"}))
    for k, e in enumerate(bx_energies):
        line_pool.append((e - x_energies[i_x0],
                          dipoles.exciton_to_biexciton[k, i_x0] ** 2, {"10"}))
        line_pool.append((e - x_energies[i_x1],
                          dipoles.exciton_to_biexciton[k, i_x1] ** 2, {"01"}))

    rows_spec = [
        ("w_X0", 2, 0, "|00> <-> |10>", s_vac_x0, {"00", "10"}),
        ("w_X0-D", 2, 1, "|01> <-> |11>", s_x1_bx, {"01", "11"}),
        ("w_X1", 1, 0, "|00> <-> |01>", s_vac_x1, {"00", "01"}),
        ("w_X1-D", 1, 1, "|10> <-> |11>", s_x0_bx, {"10", "11"}),
    ]
    rows = []
    for name, qubit, active, label, strength, active_cfgs in rows_spec:
        freq = freqs[name]
        inactive = 0.0
        for energy, weight, cfgs in line_pool:
            if cfgs & active_cfgs:
                continue
            if abs(energy - freq) <= 0.5 * min_splitting:
                inactive += weight
        contrast = strength / inactive if inactive > 0 else np.inf
        rows.append(ConditionalRow(
            frequency=float(freq), frequency_rel=float(freq - w_x0),
            qubit=qubit, active_value=active, transition=label,
            strength=float(strength), inactive_strength=float(inactive),
            contrast=float(contrast),
        ))
    return rows


def oscillator_sum_rule(basis: SingleParticleBasis, dipoles: DipoleTable):
    """(sum_x |<x|P^dag|vac>|^2, sum_{mu nu} |M_{mu nu}|^2) - equal by completeness."""
    return float(np.sum(dipoles.vac_to_exciton**2)), float(np.sum(dipoles.elements**2))


def write_gnuplot_script(path: str, csv_names: dict, delta: float, w_x1_rel: float):
    """Emit a gnuplot script reproducing the four-panel conditional layout."""
    lines = [
        "# four-panel absorption/gain layout; run: gnuplot fig1.gp",
        "set terminal pngcairo size 800,1000",
        "set output 'fig1.png'",
        "set multiplot layout 4,1",
        "set xlabel 'photon energy - E_X0 (meV)'",
        "set ylabel 'absorption (arb.u.)'",
        f"# delta = {delta:.4f} meV; X1 line at {w_x1_rel:.4f} meV",
        "set xzeroaxis",
    ]
    for label in INITIAL_STATES:
        lines.append(
            f"plot '{csv_names[label]}' using 1:2 with lines title 'initial {label}'"
        )
    lines.append("unset multiplot")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


__all__ = [
    "INITIAL_STATES",
    "envelope_overlap_1d",
    "single_particle_dipoles",
    "DipoleTable",
    "dipole_table",
    "SpectralLine",
    "Spectrum",
    "absorption_spectrum",
    "ConditionalRow",
    "conditional_transition_table",
    "oscillator_sum_rule",
    "write_gnuplot_script",
]
