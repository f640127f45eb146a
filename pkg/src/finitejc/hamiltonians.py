"""Hamiltonian assembly for the two-mode finite oscillator / two-level
atom system, its truncated-bosonic reference, and the beam-splitter
rotated frame.

Everything lives on the flat index ``atom * D**2 + n_x * D + n_y``
(see :mod:`finitejc.states`).  The interaction is excitation conserving,
so every matrix here is block diagonal over the sectors of
``N = n_x + n_y + (1 if excited)``; full-space matrices are kept sparse
and dense copies are refused above the verification size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.linalg import eigh, expm

from .states import ATOM_INDEX, ModelParams, SectorBasis, sector_basis
from .su2 import _check_rep_label, build_boson_rep

__all__ = [
    "ModeModel",
    "HamiltonianSet",
    "RotatedFrame",
    "finite_mode_model",
    "bosonic_mode_model",
    "build_finite_hamiltonian",
    "build_bosonic_hamiltonian",
    "build_excitation_operator",
    "sector_block",
    "sector_matrix",
    "model_submatrix",
    "dressed_states",
    "beam_splitter_frame",
    "elimination_angle",
]

# Largest full-space dimension (2 * mode_dim**2) we are willing to turn
# into a dense ndarray; everything bigger must go through sector blocks.
_DENSE_LIMIT = 2 * 65 * 65


@dataclass(frozen=True)
class ModeModel:
    """Per-mode data from which every Hamiltonian block is built.

    ``energy_x[n]`` / ``energy_y[n]`` are the free single-mode energies,
    ``coupling_x[n]`` is the matrix element connecting ``|e, n, m>`` to
    ``|g, n+1, m>`` (coupling constant included), likewise ``coupling_y``
    for the second mode.  ``kind`` records whether the arrays came from
    the size-j finite oscillator or from the truncated bosonic ladder.
    """

    kind: str
    mode_dim: int
    energy_x: np.ndarray
    energy_y: np.ndarray
    coupling_x: np.ndarray
    coupling_y: np.ndarray
    omega_a: float

    def __post_init__(self):
        if self.mode_dim < 2:
            raise ValueError("mode_dim must be at least 2")
        for name in ("energy_x", "energy_y"):
            if getattr(self, name).shape != (self.mode_dim,):
                raise ValueError(f"{name} must have length mode_dim")
        for name in ("coupling_x", "coupling_y"):
            if getattr(self, name).shape != (self.mode_dim - 1,):
                raise ValueError(f"{name} must have length mode_dim - 1")

    @property
    def dim(self) -> int:
        return 2 * self.mode_dim * self.mode_dim

    @property
    def max_excitation(self) -> int:
        return 2 * (self.mode_dim - 1) + 1


def finite_mode_model(params: ModelParams) -> ModeModel:
    """Mode data of the finite oscillator pair of size j.

    Free energy per mode is the lowering-then-raising ladder product,
    (omega/2j) * n * (2j - n + 1): linear near the bottom, bending over
    at the top of the finite spectrum.  Coupling elements are
    g * sqrt((n+1) * (1 - n/2j)), the scaled ladder weights.
    """
    j = params.j
    dim = 2 * j + 1
    n = np.arange(dim, dtype=float)
    fall = n * (2 * j - n + 1) / (2 * j)
    weights = np.sqrt((n[:-1] + 1) * (1.0 - n[:-1] / (2 * j)))
    return ModeModel(
        kind="finite",
        mode_dim=dim,
        energy_x=params.omega_x * fall,
        energy_y=params.omega_y * fall,
        coupling_x=params.g_x * weights,
        coupling_y=params.g_y * weights,
        omega_a=params.omega_a,
    )


def bosonic_mode_model(params: ModelParams, cutoff: int) -> ModeModel:
    """Mode data of the truncated two-mode bosonic reference.

    Same coupling constants and frequencies as ``params`` but the
    harmonic ladder: energy omega * n and coupling g * sqrt(n+1).  This
    is the limit the finite arrays approach as j grows.
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be at least 2, got {cutoff}")
    n = np.arange(cutoff, dtype=float)
    weights = np.sqrt(n[:-1] + 1)
    return ModeModel(
        kind="bosonic",
        mode_dim=cutoff,
        energy_x=params.omega_x * n,
        energy_y=params.omega_y * n,
        coupling_x=params.g_x * weights,
        coupling_y=params.g_y * weights,
        omega_a=params.omega_a,
    )


def _excitation_diagonal(mode_dim: int) -> np.ndarray:
    n = np.arange(mode_dim)
    field = (n[:, None] + n[None, :]).ravel().astype(float)
    return np.concatenate([field, field + 1.0])


def _free_diagonal(model: ModeModel) -> np.ndarray:
    field = (model.energy_x[:, None] + model.energy_y[None, :]).ravel()
    half = 0.5 * model.omega_a
    return np.concatenate([field - half, field + half])


def _interaction_coo(model: ModeModel):
    """Row/column/value arrays of the lower triangle of the coupling.

    Entries ``<g, n_x+1, n_y| V |e, n_x, n_y>`` and
    ``<g, n_x, n_y+1| V |e, n_x, n_y>``; the Hermitian partners are
    added by the assembler.
    """
    d = model.mode_dim
    nx = np.repeat(np.arange(d - 1), d)
    ny = np.tile(np.arange(d), d - 1)
    rows_x = (nx + 1) * d + ny
    cols_x = d * d + nx * d + ny
    vals_x = model.coupling_x[nx]

    mx = np.repeat(np.arange(d), d - 1)
    my = np.tile(np.arange(d - 1), d)
    rows_y = mx * d + my + 1
    cols_y = d * d + mx * d + my
    vals_y = model.coupling_y[my]

    rows = np.concatenate([rows_x, rows_y])
    cols = np.concatenate([cols_x, cols_y])
    vals = np.concatenate([vals_x, vals_y])
    return rows, cols, vals


@dataclass(frozen=True)
class HamiltonianSet:
    """Assembled sparse Hamiltonian pieces sharing one flat index.

    ``H_total = H_free + V_int``; ``N_op`` is the conserved excitation
    count whose eigenspaces are the invariant sectors.
    """

    params: ModelParams
    model: ModeModel
    H_total: sparse.csr_array
    H_free: sparse.csr_array
    V_int: sparse.csr_array
    N_op: sparse.csr_array

    @property
    def mode_dim(self) -> int:
        return self.model.mode_dim

    @property
    def dim(self) -> int:
        return self.model.dim

    def dense(self, part: str = "total") -> np.ndarray:
        """Dense copy of one piece, refused beyond the verification size."""
        if self.dim > _DENSE_LIMIT:
            raise ValueError(
                f"refusing to materialize a dense {self.dim}x{self.dim} matrix; "
                "use sector_block / sector_matrix instead"
            )
        matrix = {
            "total": self.H_total,
            "free": self.H_free,
            "interaction": self.V_int,
            "excitation": self.N_op,
        }[part]
        return matrix.toarray()


def _assemble(params: ModelParams, model: ModeModel) -> HamiltonianSet:
    dim = model.dim
    free = sparse.dia_array(
        (_free_diagonal(model)[None, :].astype(complex), [0]), shape=(dim, dim)
    ).tocsr()
    rows, cols, vals = _interaction_coo(model)
    v_int = sparse.coo_array(
        (
            np.concatenate([vals, vals]).astype(complex),
            (np.concatenate([rows, cols]), np.concatenate([cols, rows])),
        ),
        shape=(dim, dim),
    ).tocsr()
    n_op = sparse.dia_array(
        (_excitation_diagonal(model.mode_dim)[None, :].astype(complex), [0]),
        shape=(dim, dim),
    ).tocsr()
    return HamiltonianSet(
        params=params,
        model=model,
        H_total=(free + v_int).tocsr(),
        H_free=free,
        V_int=v_int,
        N_op=n_op,
    )


def build_finite_hamiltonian(params: ModelParams) -> HamiltonianSet:
    """Full coupled Hamiltonian of the size-j finite pair of modes."""
    return _assemble(params, finite_mode_model(params))


def build_bosonic_hamiltonian(params: ModelParams, cutoff: int) -> HamiltonianSet:
    """Truncated two-mode bosonic Hamiltonian with the same couplings."""
    return _assemble(params, bosonic_mode_model(params, cutoff))


def build_excitation_operator(j: int) -> sparse.csr_array:
    """Diagonal conserved excitation count n_x + n_y + (1 if excited)."""
    j = _check_rep_label(j)
    dim = 2 * (2 * j + 1) ** 2
    return sparse.dia_array(
        (_excitation_diagonal(2 * j + 1)[None, :].astype(complex), [0]),
        shape=(dim, dim),
    ).tocsr()


def model_submatrix(model: ModeModel, members) -> np.ndarray:
    """Dense restriction of H_total to an arbitrary list of basis states.

    ``members`` is a sequence of (n_x, n_y, atom) labels.  Entries are
    read straight from the model arrays, so no full-space matrix is
    needed; this is what makes large-j sector propagation cheap.
    """
    members = list(members)
    position = {label: k for k, label in enumerate(members)}
    if len(position) != len(members):
        raise ValueError("duplicate basis labels")
    size = len(members)
    block = np.zeros((size, size), dtype=complex)
    half = 0.5 * model.omega_a
    for k, (n_x, n_y, atom) in enumerate(members):
        if not (0 <= n_x < model.mode_dim and 0 <= n_y < model.mode_dim):
            raise ValueError(f"mode index out of range: {(n_x, n_y, atom)}")
        sign = 1.0 if atom == "e" else -1.0
        block[k, k] = model.energy_x[n_x] + model.energy_y[n_y] + sign * half
        if atom != "e":
            continue
        up_x = position.get((n_x + 1, n_y, "g"))
        if up_x is not None:
            block[up_x, k] = model.coupling_x[n_x]
            block[k, up_x] = model.coupling_x[n_x]
        up_y = position.get((n_x, n_y + 1, "g"))
        if up_y is not None:
            block[up_y, k] = model.coupling_y[n_y]
            block[k, up_y] = model.coupling_y[n_y]
    return block


def sector_matrix(model: ModeModel, sector: SectorBasis) -> np.ndarray:
    """Dense Hamiltonian block of one excitation sector, from the model."""
    return model_submatrix(model, sector.members)


def sector_block(H: HamiltonianSet, sector: SectorBasis) -> np.ndarray:
    """Restriction of the assembled H_total to one sector's indices."""
    idx = sector.block_indices
    if idx.size and idx.max() >= H.dim:
        raise ValueError(
            f"sector indices reach {idx.max()} but the space has dimension {H.dim}"
        )
    return H.H_total[np.ix_(idx, idx)].toarray()


def dressed_states(H: HamiltonianSet, sector: SectorBasis):
    """Eigen-decomposition of one sector, embedded back to full indexing.

    Returns ascending eigenvalues and an array of shape (dim, size)
    whose columns are the orthonormal eigenvectors written on the
    full-space flat index.
    """
    block = sector_block(H, sector)
    values, vectors = eigh(block)
    embedded = np.zeros((H.dim, len(sector)), dtype=complex)
    embedded[sector.block_indices, :] = vectors
    return values, embedded


@dataclass(frozen=True)
class RotatedFrame:
    """Bosonic Hamiltonian conjugated by the two-mode mixing rotation.

    The rotation R = exp(theta * (Ax Ay+ - Ax+ Ay)) turns the mode pair
    by ``theta``.  ``H_rotated`` is the numerically conjugated matrix
    (the source of truth); the scalar fields are the analytic rotated
    coefficients, which must reproduce it on every complete total-photon
    subspace:

        H' = obar_x nx + obar_y ny + (omega_a/2) sz
             + g_bar_cross (Ax+ Ay + Ax Ay+)
             + g_bar_x (Ax+ s- + h.c.) + g_bar_y (Ay+ s- + h.c.)

    ``analytic_mismatch`` is the largest deviation between that form and
    ``H_rotated`` away from the truncation boundary (rows and columns
    with total photon number below the cutoff stay exact because the
    mixing rotation conserves total photon number).
    """

    theta: float
    cutoff: int
    params: ModelParams
    omega_bar_x: float
    omega_bar_y: float
    g_bar_x: float
    g_bar_y: float
    g_bar_cross: float
    H_rotated: np.ndarray
    analytic_mismatch: float
    y_coupling_norm: float


def _bosonic_dense_operators(cutoff: int):
    rep = build_boson_rep(cutoff)
    eye_mode = np.eye(cutoff)
    eye_atom = np.eye(2)
    ax = np.kron(eye_atom, np.kron(rep.a, eye_mode))
    ay = np.kron(eye_atom, np.kron(eye_mode, rep.a))
    sigma_minus = np.zeros((2, 2))
    sigma_minus[ATOM_INDEX["g"], ATOM_INDEX["e"]] = 1.0
    sz = np.diag([-1.0, 1.0])
    eye_field = np.eye(cutoff * cutoff)
    sm = np.kron(sigma_minus, eye_field)
    sz_full = np.kron(sz, eye_field)
    return ax, ay, sm, sz_full


def beam_splitter_frame(
    params: ModelParams, theta: float, cutoff: int = 12
) -> RotatedFrame:
    """Conjugate the truncated bosonic Hamiltonian by the mode mixer.

    The generator sign is fixed so that R+ Ax R = Ax cos(theta) -
    Ay sin(theta) and R+ Ay R = Ay cos(theta) + Ax sin(theta); with
    theta from :func:`elimination_angle` the rotated y-mode decouples
    from the atom and the full coupling strength sqrt(gx**2 + gy**2)
    moves onto the x-mode.
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be at least 2, got {cutoff}")
    if 2 * cutoff * cutoff > _DENSE_LIMIT:
        raise ValueError(f"cutoff {cutoff} too large for dense conjugation")
    hset = build_bosonic_hamiltonian(params, cutoff)
    h_total = hset.dense("total")
    ax, ay, sm, sz_full = _bosonic_dense_operators(cutoff)

    if theta == 0.0:
        rotated = h_total.copy()
    else:
        generator = theta * (ax @ ay.conj().T - ax.conj().T @ ay)
        rot = expm(generator)
        rotated = rot.conj().T @ h_total @ rot

    c, s = math.cos(theta), math.sin(theta)
    omega_bar_x = params.omega_x * c * c + params.omega_y * s * s
    omega_bar_y = params.omega_y * c * c + params.omega_x * s * s
    g_bar_x = params.g_x * c + params.g_y * s
    g_bar_y = params.g_y * c - params.g_x * s
    g_bar_cross = (params.omega_y - params.omega_x) * c * s

    nx_op = ax.conj().T @ ax
    ny_op = ay.conj().T @ ay
    analytic = (
        omega_bar_x * nx_op
        + omega_bar_y * ny_op
        + 0.5 * params.omega_a * sz_full
        + g_bar_cross * (ax.conj().T @ ay + ay.conj().T @ ax)
        + g_bar_x * (ax.conj().T @ sm + sm.conj().T @ ax)
        + g_bar_y * (ay.conj().T @ sm + sm.conj().T @ ay)
    )

    n = np.arange(cutoff)
    total_photons = np.tile((n[:, None] + n[None, :]).ravel(), 2)
    complete = total_photons <= cutoff - 1
    mask = np.outer(complete, complete)
    mismatch = float(np.max(np.abs((rotated - analytic) * mask)))

    y_coupling = ay.conj().T @ sm
    coupling_entries = y_coupling.astype(bool) & mask
    y_norm = float(np.max(np.abs(rotated * coupling_entries)))

    return RotatedFrame(
        theta=theta,
        cutoff=cutoff,
        params=params,
        omega_bar_x=omega_bar_x,
        omega_bar_y=omega_bar_y,
        g_bar_x=g_bar_x,
        g_bar_y=g_bar_y,
        g_bar_cross=g_bar_cross,
        H_rotated=rotated,
        analytic_mismatch=mismatch,
        y_coupling_norm=y_norm,
    )


def elimination_angle(g_x: float, g_y: float) -> float:
    """Mixing angle that removes the atom coupling of the rotated y-mode.

    Solves g_y cos(theta) = g_x sin(theta); the rotated x-coupling then
    carries the whole strength sqrt(g_x**2 + g_y**2).  Either coupling
    may vanish, but not both.
    """
    if g_x == 0.0 and g_y == 0.0:
        raise ValueError("at least one coupling must be nonzero")
    return math.atan2(g_y, g_x)
