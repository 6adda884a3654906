"""Exciton and biexciton exact diagonalization in the spin-polarized subspace.

The exciton problem lives on the electron x hole product space; the
biexciton problem on antisymmetrized index pairs (mu < mu', nu < nu') for
each species with a 1/sqrt(2) normalization per species.  Both Hamiltonians
are real symmetric and small enough for dense eigensolvers.

Sign convention: ee/hh kernel integrals enter with +, eh with -.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .confinement import SingleParticleBasis
from .coulomb import CoulombTensor
from .errors import ConsistencyError, IdentificationError

BRIGHT_FRACTION = 0.01  # oscillator strength >= 1% of X0 counts as bright
DOMINANT_WEIGHT = 0.5  # configuration weight that defines "dominant"


def _check_tensor(tensor: CoulombTensor, basis: SingleParticleBasis, kind: str):
    if tensor.kind != kind:
        raise ConsistencyError(f"expected {kind!r} tensor, got {tensor.kind!r}")
    fp = tensor.provenance.get("basis_fingerprint")
    if fp is not None and fp != basis.fingerprint():
        raise ConsistencyError(
            f"{kind} tensor was generated from a different basis/material"
        )


def pair_list(n: int) -> list[tuple[int, int]]:
    """Strictly ordered index pairs (i < j), the antisymmetric pair basis."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def build_exciton_hamiltonian(basis: SingleParticleBasis,
                              eh_tensor: CoulombTensor) -> np.ndarray:
    """H[(mu nu), (mubar nubar)] = (eps_e + eps_h) delta - V_eh."""
    _check_tensor(eh_tensor, basis, "eh")
    eps_e = np.array([s.energy for s in basis.electrons])
    eps_h = np.array([s.energy for s in basis.holes])
    n_e, n_h = len(eps_e), len(eps_h)
    ham = np.diag((eps_e[:, None] + eps_h[None, :]).ravel()).astype(float)
    # V[mu, nu, mubar, nubar] -> rows (mu nu), cols (mubar nubar)
    v = eh_tensor.values.transpose(0, 1, 2, 3).reshape(n_e * n_h, n_e * n_h)
    ham -= v
    return 0.5 * (ham + ham.T)


def one_body_pair_operator(n: int) -> np.ndarray:
    """Matrix elements <p'| c^dag_m c_n |p> on the ordered-pair determinant basis.

    Returns T with shape (n_pairs, n_pairs, n, n); fermionic signs follow the
    convention |i<j> = c^dag_i c^dag_j |0>.
    """
    pairs = pair_list(n)
    index = {p: a for a, p in enumerate(pairs)}
    npairs = len(pairs)
    t_op = np.zeros((npairs, npairs, n, n))
    for p, (i, j) in enumerate(pairs):
        for ann, survivor, s1 in ((i, j, 1.0), (j, i, -1.0)):
            for m in range(n):
                if m == survivor:
                    continue
                lo, hi = (m, survivor) if m < survivor else (survivor, m)
                s2 = 1.0 if m < survivor else -1.0
                t_op[index[(lo, hi)], p, m, ann] += s1 * s2
    return t_op


def build_biexciton_hamiltonian(basis: SingleParticleBasis,
                                ee_tensor: CoulombTensor,
                                hh_tensor: CoulombTensor,
                                eh_tensor: CoulombTensor) -> np.ndarray:
    """All six interaction terms projected on electron-pair x hole-pair space.

    Basis ordering: row index = p_e * n_hole_pairs + p_h with the pair lists
    from :func:`pair_list`.
    """
    for tensor, kind in ((ee_tensor, "ee"), (hh_tensor, "hh"), (eh_tensor, "eh")):
        _check_tensor(tensor, basis, kind)

    eps_e = np.array([s.energy for s in basis.electrons])
    eps_h = np.array([s.energy for s in basis.holes])
    n_e, n_h = len(eps_e), len(eps_h)
    pairs_e = pair_list(n_e)
    pairs_h = pair_list(n_h)
    np_e, np_h = len(pairs_e), len(pairs_h)

    # same-species blocks: direct - exchange on ordered pairs
    vee = ee_tensor.values
    h_ee = np.empty((np_e, np_e))
    for a, (i, j) in enumerate(pairs_e):
        for b, (k, l) in enumerate(pairs_e):
            h_ee[a, b] = vee[i, j, k, l] - vee[i, j, l, k]
    vhh = hh_tensor.values
    h_hh = np.empty((np_h, np_h))
    for a, (i, j) in enumerate(pairs_h):
        for b, (k, l) in enumerate(pairs_h):
            h_hh[a, b] = vhh[i, j, k, l] - vhh[i, j, l, k]

    diag_e = np.array([eps_e[i] + eps_e[j] for (i, j) in pairs_e])
    diag_h = np.array([eps_h[i] + eps_h[j] for (i, j) in pairs_h])

    ham = np.kron(h_ee + np.diag(diag_e), np.eye(np_h))
    ham += np.kron(np.eye(np_e), h_hh + np.diag(diag_h))

    # eh part: - sum V(m,n;mb,nb) <c^dag_m c_mb> x <d^dag_n d_nb>
    t_e = one_body_pair_operator(n_e).reshape(np_e * np_e, n_e * n_e)
    t_h = one_body_pair_operator(n_h).reshape(np_h * np_h, n_h * n_h)
    v2 = eh_tensor.values.transpose(0, 2, 1, 3).reshape(n_e * n_e, n_h * n_h)
    heh = (t_e @ v2 @ t_h.T).reshape(np_e, np_e, np_h, np_h)
    ham -= heh.transpose(0, 2, 1, 3).reshape(np_e * np_h, np_e * np_h)
    return 0.5 * (ham + ham.T)


# ---------------------------------------------------------------------------
# Eigenstates
# ---------------------------------------------------------------------------

@dataclass
class ExcitonState:
    energy: float  # meV
    amplitudes: np.ndarray  # (n_e, n_h)
    label: str | None = None

    def configuration_weight(self, electron_shell: int, hole_shell: int,
                             basis: SingleParticleBasis) -> float:
        w = 0.0
        for i, se in enumerate(basis.electrons):
            if se.shell != electron_shell:
                continue
            for j, sh in enumerate(basis.holes):
                if sh.shell == hole_shell:
                    w += self.amplitudes[i, j] ** 2
        return w


@dataclass
class BiexcitonState:
    energy: float  # meV
    amplitudes: np.ndarray  # (n_electron_pairs, n_hole_pairs)
    label: str | None = None


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    k = np.argmax(np.abs(vec))
    return vec if vec[k] >= 0 else -vec


def diagonalize_exciton(ham: np.ndarray, basis: SingleParticleBasis) -> list[ExcitonState]:
    vals, vecs = np.linalg.eigh(ham)
    n_e, n_h = basis.n_electrons, basis.n_holes
    return [
        ExcitonState(energy=float(vals[k]),
                     amplitudes=_fix_sign(vecs[:, k]).reshape(n_e, n_h))
        for k in range(len(vals))
    ]


def diagonalize_biexciton(ham: np.ndarray, basis: SingleParticleBasis) -> list[BiexcitonState]:
    vals, vecs = np.linalg.eigh(ham)
    np_e = len(pair_list(basis.n_electrons))
    np_h = len(pair_list(basis.n_holes))
    return [
        BiexcitonState(energy=float(vals[k]),
                       amplitudes=_fix_sign(vecs[:, k]).reshape(np_e, np_h))
        for k in range(len(vals))
    ]


def expand_biexciton(state: BiexcitonState, basis: SingleParticleBasis) -> np.ndarray:
    """Unrestricted four-index amplitudes Psi[mu, mu', nu, nu'].

    Antisymmetric under mu <-> mu' and nu <-> nu'; the ordered-pair
    coefficients carry weight 1/2 on each of their four images so the
    expansion stays normalized.
    """
    pairs_e = pair_list(basis.n_electrons)
    pairs_h = pair_list(basis.n_holes)
    psi = np.zeros((basis.n_electrons,) * 2 + (basis.n_holes,) * 2)
    for a, (i, j) in enumerate(pairs_e):
        for b, (k, l) in enumerate(pairs_h):
            c = 0.5 * state.amplitudes[a, b]
            psi[i, j, k, l] += c
            psi[j, i, k, l] -= c
            psi[i, j, l, k] -= c
            psi[j, i, l, k] += c
    return psi


def apply_biexciton_operator(psi: np.ndarray, basis: SingleParticleBasis,
                             ee_tensor: CoulombTensor, hh_tensor: CoulombTensor,
                             eh_tensor: CoulombTensor) -> np.ndarray:
    """Apply the unprojected four-particle operator to unrestricted amplitudes.

    Test oracle for the pair-basis projection: eigenvectors expanded with
    :func:`expand_biexciton` must satisfy  H psi = E psi  under this action.
    """
    eps_e = np.array([s.energy for s in basis.electrons])
    eps_h = np.array([s.energy for s in basis.holes])
    vee, vhh, veh = ee_tensor.values, hh_tensor.values, eh_tensor.values

    out = (eps_e[:, None, None, None] + eps_e[None, :, None, None]
           + eps_h[None, None, :, None] + eps_h[None, None, None, :]) * psi
    # ee: <mu mu'|V|mb mb'> Psi[mb mb' nu nu']   (particle1: mu->mb, particle2: mu'->mb')
    out += np.einsum("aibj,ijkl->abkl", vee.transpose(0, 2, 1, 3), psi, optimize=True)
    out += np.einsum("cidj,abij->abcd", vhh.transpose(0, 2, 1, 3), psi, optimize=True)
    # four eh attractions, each contracting one electron and one hole index
    veh_t = veh.transpose(0, 2, 1, 3)  # [mu, mb, nu, nb]
    out -= np.einsum("aick,ibkd->abcd", veh_t, psi, optimize=True)  # (mu, nu)
    out -= np.einsum("aidl,ibcl->abcd", veh_t, psi, optimize=True)  # (mu, nu')
    out -= np.einsum("bjck,ajkd->abcd", veh_t, psi, optimize=True)  # (mu', nu)
    out -= np.einsum("bjdl,ajcl->abcd", veh_t, psi, optimize=True)  # (mu', nu')
    return out


# ---------------------------------------------------------------------------
# State identification and the qubit map
# ---------------------------------------------------------------------------

@dataclass
class QubitMap:
    """Table-I assignment: vac->|00>, X0->|10>, X1->|01>, X0+X1->|11>."""

    energies: dict  # {"00": 0.0, "10": E_X0, "01": E_X1, "11": E_XX} in meV
    exciton_indices: dict  # {"10": i_X0, "01": i_X1}
    biexciton_index: int
    delta: float  # meV

    def energy(self, qubits: str) -> float:
        return self.energies[qubits]


@dataclass
class ManyBodySpectrum:
    excitons: list[ExcitonState]
    biexcitons: list[BiexcitonState]
    basis: SingleParticleBasis
    qubit_map: QubitMap | None = None
    labels: dict = field(default_factory=dict)

    @property
    def delta(self) -> float:
        """E_X0 + E_X1 - E_{X0+X1}, recomputed from the labeled states."""
        if self.qubit_map is None:
            raise IdentificationError("states not identified yet")
        e = self.qubit_map.energies
        return e["10"] + e["01"] - e["11"]

    def exciton_energies(self) -> np.ndarray:
        return np.array([x.energy for x in self.excitons])

    def biexciton_energies(self) -> np.ndarray:
        return np.array([x.energy for x in self.biexcitons])

    def to_json_dict(self, top_k: int = 5) -> dict:
        pairs_e = pair_list(self.basis.n_electrons)
        pairs_h = pair_list(self.basis.n_holes)

        def top_exciton(state):
            flat = state.amplitudes.ravel()
            order = np.argsort(flat**2)[::-1][:top_k]
            n_h = self.basis.n_holes
            return [
                {"electron": int(k // n_h), "hole": int(k % n_h),
                 "weight": float(flat[k] ** 2)}
                for k in order
            ]

        def top_biexciton(state):
            flat = state.amplitudes.ravel()
            order = np.argsort(flat**2)[::-1][:top_k]
            n_ph = len(pairs_h)
            return [
                {"electron_pair": list(pairs_e[int(k // n_ph)]),
                 "hole_pair": list(pairs_h[int(k % n_ph)]),
                 "weight": float(flat[k] ** 2)}
                for k in order
            ]

        out = {
            "exciton_energies_meV": [x.energy for x in self.excitons],
            "biexciton_energies_meV": [x.energy for x in self.biexcitons],
        }
        if self.qubit_map is not None:
            qm = self.qubit_map
            out["delta_meV"] = self.delta
            out["qubit_map"] = {
                "00": {"state": "vac", "energy_meV": 0.0},
                "10": {"state": "X0", "energy_meV": qm.energies["10"],
                       "top_configurations": top_exciton(self.excitons[qm.exciton_indices["10"]])},
                "01": {"state": "X1", "energy_meV": qm.energies["01"],
                       "top_configurations": top_exciton(self.excitons[qm.exciton_indices["01"]])},
                "11": {"state": "X0+X1", "energy_meV": qm.energies["11"],
                       "top_configurations": top_biexciton(self.biexcitons[qm.biexciton_index])},
            }
        return out


def product_biexciton_coefficients(x0: ExcitonState, x1: ExcitonState,
                                   basis: SingleParticleBasis) -> np.ndarray:
    """Pair-basis coefficients of the antisymmetrized X0 (x) X1 product."""
    pairs_e = pair_list(basis.n_electrons)
    pairs_h = pair_list(basis.n_holes)
    a0, a1 = x0.amplitudes, x1.amplitudes
    coef = np.empty((len(pairs_e), len(pairs_h)))
    for a, (i, j) in enumerate(pairs_e):
        for b, (k, l) in enumerate(pairs_h):
            coef[a, b] = (a0[i, k] * a1[j, l] + a0[j, l] * a1[i, k]
                          - a0[j, k] * a1[i, l] - a0[i, l] * a1[j, k])
    norm = np.linalg.norm(coef)
    if norm == 0.0:
        raise IdentificationError("X0 x X1 product has no antisymmetric part")
    return coef / norm


def identify_states(excitons: list[ExcitonState], biexcitons: list[BiexcitonState],
                    dipoles, basis: SingleParticleBasis,
                    bright_fraction: float = BRIGHT_FRACTION,
                    dominant_weight: float = DOMINANT_WEIGHT) -> ManyBodySpectrum:
    """Label X0, X1 and the bright biexciton X0+X1; fix the Table-I map.

    ``dipoles`` provides ``vac_to_exciton`` (n_x,) and
    ``exciton_to_biexciton`` (n_bx, n_x) matrix elements of P^dagger.
    X0 is the lowest bright exciton, X1 the next bright one with dominant
    p-shell weight; the dark p partner is rejected by oscillator strength.
    X0+X1 maximizes overlap with the antisymmetrized product among
    biexcitons optically connected to both X0 and X1.
    """
    strengths = np.asarray(dipoles.vac_to_exciton) ** 2
    if strengths.max() <= 0.0:
        raise IdentificationError("no exciton couples to the light field")
    order = np.argsort([x.energy for x in excitons])
    bright = [k for k in order if strengths[k] >= bright_fraction * strengths.max()]
    if not bright:
        raise IdentificationError("no bright exciton above threshold")
    i_x0 = bright[0]
    thr = bright_fraction * strengths[i_x0]

    i_x1 = None
    for k in bright[1:]:
        if strengths[k] < thr:
            continue
        if excitons[k].configuration_weight(1, 1, basis) >= dominant_weight:
            i_x1 = k
            break
    if i_x1 is None:
        raise IdentificationError(
            "no bright p-shell exciton found; oscillator strengths: "
            + np.array2string(strengths, precision=3)
        )

    xb = np.asarray(dipoles.exciton_to_biexciton) ** 2  # (n_bx, n_x)
    conn = np.where(
        (xb[:, i_x0] >= bright_fraction * xb[:, i_x0].max())
        & (xb[:, i_x1] >= bright_fraction * xb[:, i_x1].max())
    )[0]
    if conn.size == 0:
        raise IdentificationError("no biexciton optically connected to X0 and X1")
    prod = product_biexciton_coefficients(excitons[i_x0], excitons[i_x1], basis)
    overlaps = np.array([
        np.tensordot(biexcitons[k].amplitudes, prod, axes=2) ** 2 for k in conn
    ])
    i_bx = int(conn[np.argmax(overlaps)])

    excitons[i_x0].label = "X0"
    excitons[i_x1].label = "X1"
    biexcitons[i_bx].label = "X0+X1"
    e_x0 = excitons[i_x0].energy
    e_x1 = excitons[i_x1].energy
    e_bx = biexcitons[i_bx].energy
    qubit_map = QubitMap(
        energies={"00": 0.0, "10": e_x0, "01": e_x1, "11": e_bx},
        exciton_indices={"10": int(i_x0), "01": int(i_x1)},
        biexciton_index=i_bx,
        delta=e_x0 + e_x1 - e_bx,
    )
    return ManyBodySpectrum(
        excitons=excitons,
        biexcitons=biexcitons,
        basis=basis,
        qubit_map=qubit_map,
        labels={"X0": int(i_x0), "X1": int(i_x1), "X0+X1": i_bx},
    )


def solve_spectrum(basis, ee_tensor, hh_tensor, eh_tensor) -> tuple[list, list]:
    """Diagonalize both problems; returns (excitons, biexcitons) sorted by energy."""
    h_x = build_exciton_hamiltonian(basis, eh_tensor)
    excitons = diagonalize_exciton(h_x, basis)
    h_xx = build_biexciton_hamiltonian(basis, ee_tensor, hh_tensor, eh_tensor)
    biexcitons = diagonalize_biexciton(h_xx, basis)
    return excitons, biexcitons


__all__ = [
    "pair_list",
    "build_exciton_hamiltonian",
    "build_biexciton_hamiltonian",
    "one_body_pair_operator",
    "diagonalize_exciton",
    "diagonalize_biexciton",
    "expand_biexciton",
    "apply_biexciton_operator",
    "ExcitonState",
    "BiexcitonState",
    "QubitMap",
    "ManyBodySpectrum",
    "product_biexciton_coefficients",
    "identify_states",
    "solve_spectrum",
]
