"""Run configuration: a single YAML document with explicit units in key names.

The schema is strict: unknown keys are rejected so typos fail loudly, and
every physical quantity carries its unit suffix (meV, nm, ps).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .confinement import DotGeometry, MaterialParams
from .errors import ConfigError

SCHEMA_VERSION = 1

SCENARIO_TYPES = ("not_composition", "cnot", "pulse")


def _require_mapping(node, where):
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a mapping")
    return node


def _take(node: dict, where: str, key: str, kind, default=None, required=False):
    if key not in node:
        if required:
            raise ConfigError(f"missing required key {where}.{key}")
        return default
    value = node.pop(key)
    if kind is float and isinstance(value, int):
        value = float(value)
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key} must be {getattr(kind, '__name__', kind)}, "
            f"got {type(value).__name__}")
    return value


def _reject_unknown(node: dict, where: str):
    if node:
        raise ConfigError(f"unknown keys in {where}: {sorted(node)}")


@dataclass
class GateScenario:
    name: str
    type: str
    qubit: int = 1
    control_qubit: int = 2
    control_value: int = 1
    tau_ps: float | None = None
    amplitude_rabi_meV: float | None = None
    initial_states: list = field(default_factory=lambda: ["01", "00"])


@dataclass
class RunConfig:
    material: MaterialParams
    geometry: DotGeometry
    n_electron_states: int
    n_hole_states: int
    coulomb_scale: float
    radial_nodes: int
    angular_nodes: int
    form_factor_nodes: int
    broadening_hwhm_meV: float
    window_meV: tuple[float, float]
    spectrum_points: int
    min_splitting_meV: float
    tau_ps: float
    phase_tolerance_rad: float
    horizon_ps: float
    local_error_tol: float
    scenarios: list[GateScenario]
    sweep_taus_ps: list[float]
    output_directory: str
    cache_directory: str
    seed: int


DEFAULT_SCENARIOS = [GateScenario(name="fig2_not", type="not_composition", qubit=1)]


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}")
    return parse_config(raw)


def parse_config(raw) -> RunConfig:
    root = dict(_require_mapping(raw, "config"))
    schema = _take(root, "config", "schema", int, required=True)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema}")
    seed = _take(root, "config", "seed", int, default=12345)

    mat_node = dict(_require_mapping(_take(root, "config", "material", dict,
                                           default={}), "material"))
    material = MaterialParams(
        electron_mass=_take(mat_node, "material", "electron_mass", float, 0.067),
        hole_mass=_take(mat_node, "material", "hole_mass", float, 0.38),
        dielectric_constant=_take(mat_node, "material", "dielectric_constant",
                                  float, 12.9),
        band_gap_offset=_take(mat_node, "material", "band_gap_offset_meV",
                              float, 0.0),
    )
    _reject_unknown(mat_node, "material")

    geo_node = dict(_require_mapping(_take(root, "config", "geometry", dict,
                                           default={}), "geometry"))
    geometry = DotGeometry(
        hbar_omega_e=_take(geo_node, "geometry", "hbar_omega_e_meV", float, 20.0),
        hbar_omega_h=_take(geo_node, "geometry", "hbar_omega_h_meV", float, 3.5),
        well_width_z=_take(geo_node, "geometry", "well_width_z_nm", float, 5.0),
    )
    _reject_unknown(geo_node, "geometry")

    basis_node = dict(_require_mapping(_take(root, "config", "basis", dict,
                                             default={}), "basis"))
    n_e = _take(basis_node, "basis", "n_electron_states", int, 10)
    n_h = _take(basis_node, "basis", "n_hole_states", int, 10)
    _reject_unknown(basis_node, "basis")

    model_node = dict(_require_mapping(_take(root, "config", "model", dict,
                                             default={}), "model"))
    coulomb_scale = _take(model_node, "model", "coulomb_scale", float, 1.0)
    _reject_unknown(model_node, "model")
    if coulomb_scale < 0:
        raise ConfigError("model.coulomb_scale must be >= 0")

    quad_node = dict(_require_mapping(_take(root, "config", "quadrature", dict,
                                            default={}), "quadrature"))
    radial = _take(quad_node, "quadrature", "radial_nodes", int, 256)
    angular = _take(quad_node, "quadrature", "angular_nodes", int, 64)
    ff_nodes = _take(quad_node, "quadrature", "form_factor_nodes", int, 48)
    _reject_unknown(quad_node, "quadrature")

    opt_node = dict(_require_mapping(_take(root, "config", "optics", dict,
                                           default={}), "optics"))
    broadening = _take(opt_node, "optics", "broadening_hwhm_meV", float, 0.5)
    window = _take(opt_node, "optics", "window_meV", list, [-20.0, 40.0])
    points = _take(opt_node, "optics", "points", int, 2001)
    min_split = _take(opt_node, "optics", "min_splitting_meV", float, 1.0)
    _reject_unknown(opt_node, "optics")
    if (not isinstance(window, list) or len(window) != 2
            or not all(isinstance(x, (int, float)) for x in window)):
        raise ConfigError("optics.window_meV must be [low, high] in meV")
    window = (float(window[0]), float(window[1]))
    if window[0] >= window[1]:
        raise ConfigError("optics.window_meV must be increasing")

    gates_node = dict(_require_mapping(_take(root, "config", "gates", dict,
                                             default={}), "gates"))
    tau = _take(gates_node, "gates", "tau_ps", float, 0.5)
    phase_tol = _take(gates_node, "gates", "phase_tolerance_rad", float, 0.02)
    horizon = _take(gates_node, "gates", "horizon_ps", float, 100.0)
    local_tol = _take(gates_node, "gates", "local_error_tol", float, 1e-8)
    raw_scenarios = _take(gates_node, "gates", "scenarios", list, None)
    _reject_unknown(gates_node, "gates")
    scenarios = (DEFAULT_SCENARIOS if raw_scenarios is None
                 else [_parse_scenario(s, i) for i, s in enumerate(raw_scenarios)])

    sweep_node = dict(_require_mapping(_take(root, "config", "sweep", dict,
                                             default={}), "sweep"))
    taus = _take(sweep_node, "sweep", "tau_list_ps", list, [0.5, 0.25, 0.02])
    _reject_unknown(sweep_node, "sweep")
    if not all(isinstance(x, (int, float)) and x > 0 for x in taus):
        raise ConfigError("sweep.tau_list_ps must be positive numbers")

    out_node = dict(_require_mapping(_take(root, "config", "output", dict,
                                           default={}), "output"))
    out_dir = _take(out_node, "output", "directory", str, "out")
    cache_dir = _take(out_node, "output", "cache_directory", str, "cache")
    _reject_unknown(out_node, "output")

    _reject_unknown(root, "config")
    return RunConfig(
        material=material, geometry=geometry,
        n_electron_states=n_e, n_hole_states=n_h,
        coulomb_scale=coulomb_scale,
        radial_nodes=radial, angular_nodes=angular, form_factor_nodes=ff_nodes,
        broadening_hwhm_meV=broadening, window_meV=window,
        spectrum_points=points, min_splitting_meV=min_split,
        tau_ps=tau, phase_tolerance_rad=phase_tol, horizon_ps=horizon,
        local_error_tol=local_tol, scenarios=scenarios,
        sweep_taus_ps=[float(x) for x in taus],
        output_directory=out_dir, cache_directory=cache_dir, seed=seed,
    )


def _parse_scenario(node, index) -> GateScenario:
    node = dict(_require_mapping(node, f"gates.scenarios[{index}]"))
    where = f"gates.scenarios[{index}]"
    name = _take(node, where, "name", str, f"scenario_{index}")
    stype = _take(node, where, "type", str, required=True)
    if stype not in SCENARIO_TYPES:
        raise ConfigError(f"{where}.type must be one of {SCENARIO_TYPES}")
    scenario = GateScenario(
        name=name, type=stype,
        qubit=_take(node, where, "qubit", int, 1),
        control_qubit=_take(node, where, "control_qubit", int, 2),
        control_value=_take(node, where, "control_value", int, 1),
        tau_ps=_take(node, where, "tau_ps", float, None),
        amplitude_rabi_meV=_take(node, where, "amplitude_rabi_meV", float, None),
        initial_states=_take(node, where, "initial_states", list, ["01", "00"]),
    )
    _reject_unknown(node, where)
    if scenario.qubit not in (1, 2):
        raise ConfigError(f"{where}.qubit must be 1 or 2")
    if scenario.control_qubit not in (1, 2) or scenario.control_value not in (0, 1):
        raise ConfigError(f"{where}: control qubit must be 1/2, value 0/1")
    for s in scenario.initial_states:
        if s not in ("00", "10", "01", "11"):
            raise ConfigError(f"{where}.initial_states entries must be qubit labels")
    return scenario


def default_config_yaml() -> str:
    """The default configuration as a commented YAML document."""
    return """\
schema: 1
seed: 12345

material:
  electron_mass: 0.067          # m*/m0
  hole_mass: 0.38
  dielectric_constant: 12.9
  band_gap_offset_meV: 0.0      # display offset for absolute transition energies

geometry:
  hbar_omega_e_meV: 20.0        # in-plane electron confinement quantum
  hbar_omega_h_meV: 3.5
  well_width_z_nm: 5.0

basis:
  n_electron_states: 10
  n_hole_states: 10

model:
  coulomb_scale: 1.0            # 0 switches the interaction off (testing)

quadrature:
  radial_nodes: 256
  angular_nodes: 64
  form_factor_nodes: 48

optics:
  broadening_hwhm_meV: 0.5
  window_meV: [-20.0, 40.0]     # relative to the X0 line
  points: 2001
  min_splitting_meV: 1.0

gates:
  tau_ps: 0.5
  phase_tolerance_rad: 0.02
  horizon_ps: 100.0
  local_error_tol: 1.0e-8
  scenarios:
    - name: fig2_not
      type: not_composition
      qubit: 1

sweep:
  tau_list_ps: [0.5, 0.25, 0.02]

output:
  directory: out
  cache_directory: cache
"""


__all__ = ["RunConfig", "GateScenario", "load_config", "parse_config",
           "default_config_yaml", "SCHEMA_VERSION"]
