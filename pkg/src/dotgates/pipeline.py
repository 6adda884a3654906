"""End-to-end stages: solve -> spectra -> gate/sweep, with file artifacts.

Each stage writes its products into the configured output directory and
consumes only earlier artifacts; invoking a stage before its inputs exist
raises StageOrderError.  All emitted JSON/CSV is byte-deterministic for a
fixed config (sorted keys, repr-round-trip floats, no timestamps).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from . import coulomb, gatesim, manybody, optics
from .config import RunConfig
from .confinement import build_sp_basis
from .errors import CommensurabilityError, StageOrderError

log = logging.getLogger(__name__)

MANYBODY_ARTIFACT = "manybody.npz"
BASIS_ARTIFACT = "basis.json"
SPECTRUM_ARTIFACT = "spectrum.json"


def _fmt(x) -> str:
    return repr(float(x))


def write_csv(path: str, header, rows: np.ndarray):
    lines = [",".join(header)]
    for row in np.atleast_2d(rows):
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class SolveArtifacts:
    """In-memory bundle mirrored by manybody.npz on disk."""

    basis: object
    spectrum: manybody.ManyBodySpectrum
    dipoles: optics.DipoleTable
    tensors: dict


class LoadedSpectrum:
    """Spectrum view reconstructed from the on-disk artifact.

    Exposes the subset of the ManyBodySpectrum interface the spectra and
    gate stages need (energies, delta, qubit map).
    """

    def __init__(self, exciton_energies, biexciton_energies, qubit_map):
        self._xe = np.asarray(exciton_energies)
        self._bxe = np.asarray(biexciton_energies)
        self.qubit_map = qubit_map

    def exciton_energies(self):
        return self._xe

    def biexciton_energies(self):
        return self._bxe

    @property
    def delta(self):
        e = self.qubit_map.energies
        return e["10"] + e["01"] - e["11"]


def _tensor_cache_path(cfg: RunConfig, kind: str, thash: str) -> str:
    return os.path.join(cfg.cache_directory, f"coulomb_{kind}_{thash[:16]}.npz")


def run_solve(cfg: RunConfig) -> SolveArtifacts:
    """confinement -> coulomb -> manybody; writes basis/spectrum artifacts."""
    os.makedirs(cfg.output_directory, exist_ok=True)
    os.makedirs(cfg.cache_directory, exist_ok=True)
    basis = build_sp_basis(cfg.material, cfg.geometry,
                           cfg.n_electron_states, cfg.n_hole_states)
    write_json(os.path.join(cfg.output_directory, BASIS_ARTIFACT),
               basis.to_json_dict())

    tensors = {}
    for kind in coulomb.KINDS:
        thash = coulomb.tensor_hash(kind, basis, cfg.material, cfg.radial_nodes,
                                    cfg.angular_nodes, cfg.form_factor_nodes,
                                    cfg.coulomb_scale)
        tensors[kind] = coulomb.build_coulomb_tensor(
            kind, basis, cfg.material,
            cache_path=_tensor_cache_path(cfg, kind, thash),
            n_radial=cfg.radial_nodes, n_angular=cfg.angular_nodes,
            ff_nodes=cfg.form_factor_nodes, scale=cfg.coulomb_scale)

    excitons, biexcitons = manybody.solve_spectrum(
        basis, tensors["ee"], tensors["hh"], tensors["eh"])
    dipoles = optics.dipole_table(basis, excitons, biexcitons)
    spectrum = manybody.identify_states(excitons, biexcitons, dipoles, basis)

    qm = spectrum.qubit_map
    np.savez(
        os.path.join(cfg.output_directory, MANYBODY_ARTIFACT),
        exciton_energies=spectrum.exciton_energies(),
        biexciton_energies=spectrum.biexciton_energies(),
        vac_to_exciton=dipoles.vac_to_exciton,
        exciton_to_biexciton=dipoles.exciton_to_biexciton,
        sp_dipoles=dipoles.elements,
        index_x0=qm.exciton_indices["10"],
        index_x1=qm.exciton_indices["01"],
        index_bx=qm.biexciton_index,
        delta=qm.delta,
        basis_fingerprint=np.frombuffer(
            basis.fingerprint().encode(), dtype=np.uint8),
    )
    payload = spectrum.to_json_dict()
    payload["basis_fingerprint"] = basis.fingerprint()
    write_json(os.path.join(cfg.output_directory, SPECTRUM_ARTIFACT), payload)
    log.info("solve: delta = %.4f meV", spectrum.delta)
    return SolveArtifacts(basis=basis, spectrum=spectrum, dipoles=dipoles,
                          tensors=tensors)


def load_solve_artifacts(cfg: RunConfig):
    """(LoadedSpectrum, DipoleTable) from manybody.npz; StageOrderError if absent."""
    path = os.path.join(cfg.output_directory, MANYBODY_ARTIFACT)
    if not os.path.exists(path):
        raise StageOrderError(
            f"missing artifact {path}: run the solve stage first")
    with np.load(path) as data:
        xe = data["exciton_energies"]
        bxe = data["biexciton_energies"]
        qm = manybody.QubitMap(
            energies={"00": 0.0,
                      "10": float(xe[int(data["index_x0"])]),
                      "01": float(xe[int(data["index_x1"])]),
                      "11": float(bxe[int(data["index_bx"])])},
            exciton_indices={"10": int(data["index_x0"]),
                             "01": int(data["index_x1"])},
            biexciton_index=int(data["index_bx"]),
            delta=float(data["delta"]),
        )
        dipoles = optics.DipoleTable(
            elements=data["sp_dipoles"],
            vac_to_exciton=data["vac_to_exciton"],
            exciton_to_biexciton=data["exciton_to_biexciton"],
        )
        return LoadedSpectrum(xe, bxe, qm), dipoles


SPECTRA_FILES = {
    "vac": "spectrum_vac.csv",
    "X0": "spectrum_X0.csv",
    "X1": "spectrum_X1.csv",
    "X0+X1": "spectrum_X0X1.csv",
}


def run_spectra(cfg: RunConfig, render: bool = True) -> dict:
    """Four conditioned absorption spectra, line lists, conditional table."""
    spectrum, dipoles = load_solve_artifacts(cfg)
    out = cfg.output_directory
    spectra = {}
    line_list = {}
    for label in optics.INITIAL_STATES:
        spec = optics.absorption_spectrum(
            label, spectrum, dipoles, broadening=cfg.broadening_hwhm_meV,
            window=cfg.window_meV, n_points=cfg.spectrum_points)
        spectra[label] = spec
        write_csv(os.path.join(out, SPECTRA_FILES[label]),
                  ["energy_meV", "signal"],
                  np.column_stack([spec.energies, spec.signal]))
        line_list[label] = [
            {"energy_meV": l.energy, "weight": l.weight,
             "initial": l.initial, "final": l.final}
            for l in spec.lines
        ]
    write_json(os.path.join(out, "lines.json"), line_list)

    rows = optics.conditional_transition_table(
        spectrum, dipoles, min_splitting=cfg.min_splitting_meV)
    write_json(os.path.join(out, "conditional_table.json"), {
        "delta_meV": spectrum.delta,
        "rows": [
            {"frequency_meV": r.frequency,
             "frequency_rel_meV": r.frequency_rel,
             "conditioning_qubit": r.qubit,
             "active_iff_value": r.active_value,
             "transition": r.transition,
             "strength": r.strength,
             "inactive_strength": r.inactive_strength,
             "contrast": None if np.isinf(r.contrast) else r.contrast}
            for r in rows
        ],
    })
    qm = spectrum.qubit_map
    optics.write_gnuplot_script(
        os.path.join(out, "fig1.gp"), SPECTRA_FILES, spectrum.delta,
        qm.energies["01"] - qm.energies["10"])
    if render:
        from . import plotting
        plotting.render_fig1(spectra, rows, os.path.join(out, "fig1.png"))
    return {"spectra": spectra, "conditional_rows": rows}


def _make_system(spectrum, dipoles) -> gatesim.DriveSystem:
    return gatesim.DriveSystem.from_spectrum(spectrum, dipoles)


def run_gate(cfg: RunConfig, render: bool = True) -> dict:
    """Run the configured pulse scenarios; failures are recorded per scenario."""
    spectrum, dipoles = load_solve_artifacts(cfg)
    system = _make_system(spectrum, dipoles)
    out = cfg.output_directory
    results = {}
    any_commensurability_failure = False

    for scenario in cfg.scenarios:
        tau = scenario.tau_ps if scenario.tau_ps is not None else cfg.tau_ps
        name = scenario.name
        try:
            if scenario.type == "not_composition":
                pulses, report, traj = gatesim.compose_not(
                    system, qubit=scenario.qubit, tau=tau,
                    phase_tol=cfg.phase_tolerance_rad, horizon=cfg.horizon_ps,
                    tol=cfg.local_error_tol)
                cols = [gatesim.QUBIT_ORDER.index(s)
                        for s in scenario.initial_states]
                _write_block_trajectory(out, name, traj,
                                        scenario.initial_states, cols)
                write_json(os.path.join(out, f"gate_report_{name}.json"),
                           report.to_json_dict())
                if not report.commensurability_ok:
                    any_commensurability_failure = True
                results[name] = {"report": report, "trajectory": traj}
                if render:
                    from . import plotting
                    plotting.render_fig2(
                        traj, pulses, scenario.initial_states,
                        os.path.join(out, f"fig2_{name}.png"))
            elif scenario.type == "cnot":
                pulses, report = gatesim.synthesize_cnot(
                    system, scenario.control_qubit, scenario.control_value,
                    tau=tau, phase_tol=cfg.phase_tolerance_rad,
                    horizon=cfg.horizon_ps, tol=cfg.local_error_tol,
                    amplitude=scenario.amplitude_rabi_meV)
                write_json(os.path.join(out, f"gate_report_{name}.json"),
                           report.to_json_dict())
                results[name] = {"report": report}
            else:  # plain pulse scenario, e.g. the zero-amplitude identity check
                results[name] = _run_pulse_scenario(
                    cfg, system, scenario, tau, out)
        except CommensurabilityError as exc:
            any_commensurability_failure = True
            log.warning("scenario %s: commensurability failure: %s", name, exc)
            write_json(os.path.join(out, f"gate_report_{name}.json"), {
                "name": name,
                "commensurability_ok": False,
                "error": str(exc),
                "best_time_ps": exc.best_time,
                "best_phases_rad": exc.best_phases,
                "gate_budget": gatesim.gate_budget(),
            })
            results[name] = {"error": exc}

    write_json(os.path.join(out, "gate_budget.json"), gatesim.gate_budget())
    results["commensurability_failed"] = any_commensurability_failure
    return results


def _run_pulse_scenario(cfg, system, scenario, tau, out):
    idle, (lower, upper) = gatesim.CNOT_ROWS[
        (scenario.control_qubit, scenario.control_value)]
    freq, m_ref = system.transition(lower, upper)
    amp = scenario.amplitude_rabi_meV
    if amp is None:
        amp = gatesim.initial_amplitude("gaussian", tau)
    half = gatesim.GAUSSIAN_WINDOW_SIGMAS * tau
    pulse = gatesim.Pulse("gaussian", amp, half, tau, freq,
                          reference_dipole=max(m_ref, 1e-12))
    t_lo, t_hi = pulse.window()
    block = np.column_stack(
        [system.basis_state(q) for q in scenario.initial_states])
    times = np.linspace(t_lo, t_hi, 201)
    traj = gatesim.propagate(system, block, [pulse], t_lo, t_hi,
                             output_times=times, tol=cfg.local_error_tol)
    _write_block_trajectory(out, scenario.name, traj, scenario.initial_states,
                            list(range(len(scenario.initial_states))))
    return {"trajectory": traj, "pulse": pulse}


def _write_block_trajectory(out, name, traj, initial_states, columns):
    from .gatesim import Trajectory

    for col_idx, init in zip(columns, initial_states):
        if traj.amplitudes.ndim == 3:
            sub = Trajectory(traj.times, traj.amplitudes[:, :, col_idx],
                             traj.norms[:, col_idx],
                             traj.final_state[:, col_idx])
        else:
            sub = traj
        header, rows = sub.to_rows(with_amplitudes=True)
        write_csv(os.path.join(out, f"trajectory_{name}_from_{init}.csv"),
                  header, rows)


def run_sweep(cfg: RunConfig, render: bool = True) -> list[dict]:
    """Pulse-duration sweep of leakage and off-resonant disturbance.

    Uses the conditional-flip pulse area calibrated at the configured tau,
    rescaled as 1/tau so every entry realizes the same rotation angle.
    """
    spectrum, dipoles = load_solve_artifacts(cfg)
    system = _make_system(spectrum, dipoles)
    freq, m_ref = system.transition("01", "11")

    base_tau = cfg.tau_ps
    half = gatesim.GAUSSIAN_WINDOW_SIGMAS * base_tau
    pulse = gatesim.Pulse("gaussian", gatesim.initial_amplitude("gaussian", base_tau),
                          half, base_tau, freq, reference_dipole=m_ref)
    pulse, cal = gatesim.calibrate_pulse_amplitude(system, pulse, "01", "11")

    rows = []
    for tau in cfg.sweep_taus_ps:
        amp = pulse.amplitude * (base_tau / tau)
        p = gatesim.Pulse("gaussian", amp, gatesim.GAUSSIAN_WINDOW_SIGMAS * tau,
                          tau, pulse.frequency, reference_dipole=m_ref)
        t_lo, t_hi = p.window()
        block = np.column_stack([system.basis_state("01"),
                                 system.basis_state("00")])
        times = np.linspace(t_lo, t_hi, 101)
        traj = gatesim.propagate(system, block, [p], t_lo, t_hi,
                                 output_times=times, tol=cfg.local_error_tol)
        p00 = np.abs(traj.amplitudes[:, 0, 1]) ** 2
        rows.append({
            "tau_ps": tau,
            "max_leakage": float(np.max(traj.leakage)),
            "transfer_01_to_11": float(np.abs(traj.amplitudes[-1, 3, 0]) ** 2),
            "offres_final_change": float(abs(p00[-1] - 1.0)),
            "offres_transient_dip": float(np.max(1.0 - p00)),
        })

    header = ["tau_ps", "max_leakage", "transfer_01_to_11",
              "offres_final_change", "offres_transient_dip"]
    table = np.array([[r[h] for h in header] for r in rows])
    write_csv(os.path.join(cfg.output_directory, "sweep.csv"), header, table)
    if render:
        from . import plotting
        plotting.render_sweep(rows, os.path.join(cfg.output_directory,
                                                 "fig_sweep.png"))
    return rows


__all__ = [
    "SolveArtifacts",
    "LoadedSpectrum",
    "run_solve",
    "load_solve_artifacts",
    "run_spectra",
    "run_gate",
    "run_sweep",
    "write_csv",
    "write_json",
    "SPECTRA_FILES",
]
