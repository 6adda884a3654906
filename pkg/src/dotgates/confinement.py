"""Single-particle states of the dot confinement.

The confinement is separable: a 2-D harmonic oscillator in the (x, y)
plane and an infinite square well along z.  The analytic Hermite-Gaussian
solver is the production path; a finite-difference grid solver acts as an
independent oracle for tests.

Conventions
-----------
* energies in meV, lengths in nm
* 2-D oscillator energy: hbar*omega * (n_x + n_y + 1)
* z well: only the ground subband is kept, E_z = pi^2 hbar^2 / (2 m L^2)
* in-plane state ordering: ascending energy, within a degenerate shell
  (n_x + n_y fixed) states run (N,0), (N-1,1), ..., (0,N)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .constants import HBAR2_OVER_M0
from .errors import OracleUnconvergedError, ParameterDomainError


@dataclass(frozen=True)
class MaterialParams:
    """Effective-mass material constants (masses in units of m0)."""

    electron_mass: float = 0.067
    hole_mass: float = 0.38
    dielectric_constant: float = 12.9
    band_gap_offset: float = 0.0  # meV, added to transition energies for display only

    def __post_init__(self):
        if self.electron_mass <= 0 or self.hole_mass <= 0:
            raise ParameterDomainError("effective masses must be positive")
        if self.dielectric_constant < 1.0:
            raise ParameterDomainError("dielectric constant must be >= 1")

    def mass(self, species: str) -> float:
        if species == "electron":
            return self.electron_mass
        if species == "hole":
            return self.hole_mass
        raise ParameterDomainError(f"unknown species {species!r}")


@dataclass(frozen=True)
class DotGeometry:
    """In-plane confinement quanta (meV) and z well width (nm)."""

    hbar_omega_e: float = 20.0
    hbar_omega_h: float = 3.5
    well_width_z: float = 5.0

    def __post_init__(self):
        if min(self.hbar_omega_e, self.hbar_omega_h, self.well_width_z) <= 0:
            raise ParameterDomainError("all geometry parameters must be positive")

    def hbar_omega(self, species: str) -> float:
        return self.hbar_omega_e if species == "electron" else self.hbar_omega_h


def oscillator_length(mass: float, hbar_omega: float) -> float:
    """sqrt(hbar / (m omega)) in nm, from hbar^2/m0 expressed in meV nm^2."""
    if mass <= 0 or hbar_omega <= 0:
        raise ParameterDomainError("mass and hbar_omega must be positive")
    return math.sqrt(HBAR2_OVER_M0 / (mass * hbar_omega))


@dataclass(frozen=True)
class InplaneState:
    n_x: int
    n_y: int
    energy: float  # meV
    oscillator_length: float  # nm


@dataclass(frozen=True)
class BoxState:
    subband: int
    energy: float  # meV
    width: float  # nm

    def density(self, z):
        """|chi(z)|^2 of the ground subband on [0, width]."""
        z = np.asarray(z, dtype=float)
        inside = (z >= 0.0) & (z <= self.width)
        rho = (2.0 / self.width) * np.sin(np.pi * self.subband * z / self.width) ** 2
        return np.where(inside, rho, 0.0)


@dataclass(frozen=True)
class SingleParticleState:
    species: str  # "electron" | "hole"
    n_x: int
    n_y: int
    subband_z: int
    energy: float  # meV (in-plane + z subband)
    oscillator_length: float  # nm

    @property
    def shell(self) -> int:
        return self.n_x + self.n_y

    @property
    def parity(self) -> tuple[int, int]:
        return (self.n_x % 2, self.n_y % 2)


@dataclass(frozen=True)
class SingleParticleBasis:
    electrons: tuple[SingleParticleState, ...]
    holes: tuple[SingleParticleState, ...]
    material: MaterialParams
    geometry: DotGeometry
    z_box_e: BoxState = field(repr=False, default=None)
    z_box_h: BoxState = field(repr=False, default=None)

    def states(self, species: str):
        return self.electrons if species == "electron" else self.holes

    @property
    def n_electrons(self) -> int:
        return len(self.electrons)

    @property
    def n_holes(self) -> int:
        return len(self.holes)

    def to_json_dict(self) -> dict:
        def enc(states):
            return [
                {
                    "n_x": s.n_x,
                    "n_y": s.n_y,
                    "subband_z": s.subband_z,
                    "energy_meV": s.energy,
                    "oscillator_length_nm": s.oscillator_length,
                }
                for s in states
            ]

        return {
            "electrons": enc(self.electrons),
            "holes": enc(self.holes),
            "material": {
                "electron_mass": self.material.electron_mass,
                "hole_mass": self.material.hole_mass,
                "dielectric_constant": self.material.dielectric_constant,
                "band_gap_offset_meV": self.material.band_gap_offset,
            },
            "geometry": {
                "hbar_omega_e_meV": self.geometry.hbar_omega_e,
                "hbar_omega_h_meV": self.geometry.hbar_omega_h,
                "well_width_z_nm": self.geometry.well_width_z,
            },
        }

    def fingerprint(self) -> str:
        """Stable hash of quantum numbers, lengths and material constants."""
        import hashlib

        payload = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


def solve_inplane_ho(mass: float, hbar_omega: float, n_levels: int) -> list[InplaneState]:
    """Lowest ``n_levels`` states of the 2-D harmonic oscillator.

    Degenerate shells are enumerated completely in the fixed tie-break
    order before truncation, so a shell is only split when n_levels
    forces it.
    """
    if n_levels < 1:
        raise ParameterDomainError("n_levels must be >= 1")
    length = oscillator_length(mass, hbar_omega)
    states = []
    shell = 0
    while len(states) < n_levels:
        energy = hbar_omega * (shell + 1)
        for n_x in range(shell, -1, -1):
            states.append(InplaneState(n_x, shell - n_x, energy, length))
        shell += 1
    return states[:n_levels]


def solve_box_z(mass: float, well_width: float, subband: int = 1) -> BoxState:
    """Ground subband of the infinite square well along z."""
    if well_width <= 0:
        raise ParameterDomainError("well width must be positive")
    if mass <= 0:
        raise ParameterDomainError("mass must be positive")
    energy = (np.pi * subband) ** 2 * HBAR2_OVER_M0 / (2.0 * mass * well_width**2)
    return BoxState(subband=subband, energy=energy, width=well_width)


def build_sp_basis(
    material: MaterialParams,
    geometry: DotGeometry,
    n_e: int = 10,
    n_h: int = 10,
) -> SingleParticleBasis:
    """Compose in-plane x z-subband product states, sorted by total energy."""
    if n_e < 1 or n_h < 1:
        raise ParameterDomainError("basis sizes must be >= 1")

    def make(species, n_states):
        mass = material.mass(species)
        hw = geometry.hbar_omega(species)
        box = solve_box_z(mass, geometry.well_width_z)
        inplane = solve_inplane_ho(mass, hw, n_states)
        states = tuple(
            SingleParticleState(
                species=species,
                n_x=s.n_x,
                n_y=s.n_y,
                subband_z=box.subband,
                energy=s.energy + box.energy,
                oscillator_length=s.oscillator_length,
            )
            for s in inplane
        )
        return states, box

    electrons, box_e = make("electron", n_e)
    holes, box_h = make("hole", n_h)
    return SingleParticleBasis(
        electrons=electrons,
        holes=holes,
        material=material,
        geometry=geometry,
        z_box_e=box_e,
        z_box_h=box_h,
    )


# ---------------------------------------------------------------------------
# Hermite-Gaussian envelope evaluation
# ---------------------------------------------------------------------------

def hermite_scaled(n_max: int, u: np.ndarray) -> np.ndarray:
    """Normalized Hermite polynomials h_n(u) = H_n(u)/sqrt(2^n n! sqrt(pi)).

    Returns array of shape (n_max+1, len(u)); phi_n(x) = h_n(x/l) e^{-u^2/2}/sqrt(l).
    The recurrence keeps everything O(1), so no overflow for the small n used here.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = np.pi ** (-0.25)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for n in range(2, n_max + 1):
        out[n] = np.sqrt(2.0 / n) * u * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def ho_wavefunction(n: int, x: np.ndarray, length: float) -> np.ndarray:
    """1-D oscillator eigenfunction phi_n(x) for oscillator length ``length``."""
    u = np.asarray(x, dtype=float) / length
    h = hermite_scaled(n, u)
    return h[n] * np.exp(-0.5 * u**2) / np.sqrt(length)


def overlap_matrix(basis: SingleParticleBasis, species: str, n_nodes: int = 40) -> np.ndarray:
    """Gram matrix of the in-plane envelopes by Gauss-Hermite quadrature.

    The quadrature is exact for the polynomial x Gaussian integrands here,
    so the result should be the identity to rounding.
    """
    states = basis.states(species)
    n_max = max(max(s.n_x, s.n_y) for s in states)
    t, w = np.polynomial.hermite.hermgauss(n_nodes)
    h = hermite_scaled(n_max, t)  # (n_max+1, nodes)
    # 1-D overlap with the e^{-u^2} weight absorbed into the GH weights
    ov1 = np.einsum("k,ik,jk->ij", w, h, h)
    n = len(states)
    gram = np.empty((n, n))
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            gram[i, j] = ov1[si.n_x, sj.n_x] * ov1[si.n_y, sj.n_y]
    return gram


# ---------------------------------------------------------------------------
# Finite-difference grid oracle
# ---------------------------------------------------------------------------

def _fd_kinetic_rows(n: int, step: float, coeff: float, box: bool):
    """Pentadiagonal 4th-order -coeff * d^2/dx^2 on n interior nodes.

    For the infinite well the eigenfunctions extend antisymmetrically
    past the walls, so the ghost values fold back with a sign flip;
    for the oscillator the domain edge is deep in the tail and ghosts
    are simply dropped.
    """
    pref = coeff / (12.0 * step**2)
    main = np.full(n, 30.0 * pref)
    off1 = np.full(n - 1, -16.0 * pref)
    off2 = np.full(n - 2, 1.0 * pref)
    if box:
        main[0] -= pref  # ghost f(-h) = -f(h)
        main[-1] -= pref
    return main, off1, off2


def _solve_fd_1d(grid: np.ndarray, potential: np.ndarray, coeff: float, box: bool):
    """Dense eigensolve of the pentadiagonal FD Hamiltonian; returns (E, vecs)."""
    n = len(grid)
    step = grid[1] - grid[0]
    main, off1, off2 = _fd_kinetic_rows(n, step, coeff, box)
    ham = np.diag(main + potential) + np.diag(off1, 1) + np.diag(off1, -1)
    ham += np.diag(off2, 2) + np.diag(off2, -2)
    vals, vecs = np.linalg.eigh(ham)
    return vals, vecs


def _ho_fd_levels(mass: float, hbar_omega: float, n_grid: int, half_width_lengths: float):
    length = oscillator_length(mass, hbar_omega)
    half = half_width_lengths * length
    grid = np.linspace(-half, half, n_grid)
    coeff = HBAR2_OVER_M0 / (2.0 * mass)
    pot = 0.5 * hbar_omega * (grid / length) ** 2
    return _solve_fd_1d(grid, pot, coeff, box=False), grid


def _box_fd_levels(mass: float, well_width: float, n_grid: int):
    step = well_width / (n_grid + 1)
    grid = step * np.arange(1, n_grid + 1)
    coeff = HBAR2_OVER_M0 / (2.0 * mass)
    pot = np.zeros(n_grid)
    return _solve_fd_1d(grid, pot, coeff, box=True), grid


@dataclass(frozen=True)
class GridOracleResult:
    inplane_energies: np.ndarray  # lowest n_levels 2-D energies, meV
    z_energy: float  # ground subband, meV
    ground_length: float  # nm, from the FD ground-state variance
    grid_points: int


def solve_grid_oracle(
    material: MaterialParams,
    geometry: DotGeometry,
    n_levels: int,
    species: str = "electron",
    n_grid: int = 256,
    half_width_lengths: float = 6.0,
    convergence_tol: float = 1e-5,
) -> GridOracleResult:
    """Finite-difference cross-check of the analytic solver.

    The in-plane problem is separable, so the 2-D tensor-grid FD spectrum
    is composed exactly from two identical 1-D solves at ``n_grid`` nodes
    (equivalently a ``n_grid``^2 grid).  A refinement step at half
    resolution guards convergence; an eigenvalue shift above
    ``convergence_tol`` (relative) raises OracleUnconvergedError.
    """
    if half_width_lengths < 6.0:
        raise ParameterDomainError("grid must cover at least 6 oscillator lengths")
    mass = material.mass(species)
    hw = geometry.hbar_omega(species)

    def inplane_levels(n):
        (vals, vecs), grid = _ho_fd_levels(mass, hw, n, half_width_lengths)
        # compose separable 2-D energies and keep the lowest n_levels
        k = min(len(vals), n_levels + 2)
        sums = np.sort((vals[:k, None] + vals[None, :k]).ravel())[:n_levels]
        return sums, vals, vecs, grid

    energies, vals1d, vecs, grid = inplane_levels(n_grid)
    energies_coarse, _, _, _ = inplane_levels(n_grid // 2)
    shift = np.max(np.abs(energies - energies_coarse) / np.abs(energies))
    if shift > convergence_tol:
        raise OracleUnconvergedError(
            f"in-plane FD oracle not converged: relative shift {shift:.2e} "
            f"between {n_grid//2} and {n_grid} nodes"
        )

    (zvals, _), _ = _box_fd_levels(mass, geometry.well_width_z, n_grid)
    (zvals_c, _), _ = _box_fd_levels(mass, geometry.well_width_z, n_grid // 2)
    zshift = abs(zvals[0] - zvals_c[0]) / abs(zvals[0])
    if zshift > convergence_tol:
        raise OracleUnconvergedError(
            f"z FD oracle not converged: relative shift {zshift:.2e}"
        )

    ground = vecs[:, 0]
    step = grid[1] - grid[0]
    norm = np.sum(ground**2) * step
    var = np.sum(grid**2 * ground**2) * step / norm
    return GridOracleResult(
        inplane_energies=energies,
        z_energy=float(zvals[0]),
        ground_length=float(np.sqrt(2.0 * var)),
        grid_points=n_grid,
    )


__all__ = [
    "MaterialParams",
    "DotGeometry",
    "InplaneState",
    "BoxState",
    "SingleParticleState",
    "SingleParticleBasis",
    "oscillator_length",
    "solve_inplane_ho",
    "solve_box_z",
    "build_sp_basis",
    "hermite_scaled",
    "ho_wavefunction",
    "overlap_matrix",
    "solve_grid_oracle",
    "GridOracleResult",
]
