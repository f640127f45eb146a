"""States of the coupled system: field modes, finite coherent states,
atom (x) field (x) field product states, and the conserved-excitation
sector decomposition.

One field mode of size ``D = 2j+1`` carries energy-mode vectors indexed
by ``n = 0..2j``.  The coupled space is atom (x) mode-x (x) mode-y with the
canonical flat index

    ``flat = atom * D**2 + n_x * D + n_y``,     atom: g -> 0, e -> 1,

used identically by every module.  The excitation count
``N = n_x + n_y + (1 if excited)`` is conserved by the interaction, so the
basis splits into sectors ``N = 0..4j+1``; those sectors are the invariant
blocks every propagator works in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .su2 import SpinRep, _check_rep_label

ATOM_INDEX = {"g": 0, "e": 1}

__all__ = [
    "ATOM_INDEX",
    "ModelParams",
    "CoupledState",
    "SectorBasis",
    "flat_index",
    "energy_mode_state",
    "coherent_coefficients",
    "coherent_state",
    "alpha_for_mean_n",
    "coherent_mean_n",
    "product_state",
    "basis_state",
    "sector_basis",
    "sector_decomposition",
    "truncated_poisson_coefficients",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the two-mode model.

    ``j`` fixes the per-mode dimension 2j+1; ``omega_x``/``omega_y`` are the
    mode frequencies, ``omega_a`` the atomic transition frequency, and
    ``g_x``/``g_y`` the atom-mode coupling strengths (all in the same
    dimensionless units).
    """

    j: int
    omega_x: float
    omega_y: float
    omega_a: float
    g_x: float
    g_y: float

    def __post_init__(self):
        object.__setattr__(self, "j", _check_rep_label(self.j))
        for name in ("omega_x", "omega_y", "omega_a", "g_x", "g_y"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega_x <= 0 or self.omega_y <= 0:
            raise ValueError(
                f"mode frequencies must be > 0, got omega_x={self.omega_x}, "
                f"omega_y={self.omega_y}"
            )
        if self.omega_a < 0:
            raise ValueError(f"omega_a must be >= 0, got {self.omega_a}")
        if self.g_x < 0 or self.g_y < 0:
            raise ValueError(f"couplings must be >= 0, got g_x={self.g_x}, g_y={self.g_y}")

    @property
    def mode_dim(self) -> int:
        return 2 * self.j + 1


def flat_index(j: int, n_x: int, n_y: int, atom: str) -> int:
    """Flat index of |n_x, n_y, atom> under the canonical layout."""
    dim = 2 * j + 1
    if atom not in ATOM_INDEX:
        raise ValueError(f"atom must be 'g' or 'e', got {atom!r}")
    if not (0 <= n_x <= 2 * j and 0 <= n_y <= 2 * j):
        raise ValueError(f"mode indices must lie in 0..{2*j}, got ({n_x}, {n_y})")
    return ATOM_INDEX[atom] * dim * dim + n_x * dim + n_y


@dataclass(frozen=True)
class CoupledState:
    """Normalized state vector of the coupled atom + two-mode system.

    ``amplitudes`` has length ``2*(2j+1)**2`` under the canonical flat
    index.  Unnormalized intermediates should stay plain arrays; this type
    asserts unit norm on construction.
    """

    j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        j = _check_rep_label(self.j)
        object.__setattr__(self, "j", j)
        amps = np.asarray(self.amplitudes, dtype=complex)
        expected = 2 * (2 * j + 1) ** 2
        if amps.shape != (expected,):
            raise ValueError(
                f"amplitudes must have shape ({expected},) for j={j}, got {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized: ||amplitudes|| = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def mode_dim(self) -> int:
        return 2 * self.j + 1

    def blocks(self) -> np.ndarray:
        """View shaped (2, D, D): [atom, n_x, n_y] with atom 0=g, 1=e."""
        dim = self.mode_dim
        return self.amplitudes.reshape(2, dim, dim)


@dataclass(frozen=True)
class SectorBasis:
    """All basis states with one value of the conserved excitation count.

    ``members`` lists (n_x, n_y, atom) triples ordered by flat index;
    ``block_indices`` are the corresponding positions in the flat layout.
    """

    total_excitation: int
    members: tuple
    block_indices: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.members)


def energy_mode_state(j: int, n: int) -> np.ndarray:
    """Unit vector of the single-mode energy eigenstate |j, n>."""
    j = _check_rep_label(j)
    if not (0 <= n <= 2 * j):
        raise ValueError(f"mode index must lie in 0..{2*j}, got {n}")
    vec = np.zeros(2 * j + 1, dtype=complex)
    vec[n] = 1.0
    return vec


def coherent_coefficients(j: int, alpha: float) -> np.ndarray:
    """Real coefficients p_n(alpha) of the finite coherent state.

    p_n = sqrt(C(2j, n)) * cos(alpha/2)**(2j-n) * sin(alpha/2)**n, the
    square root of a binomial distribution with success probability
    sin(alpha/2)**2.  Evaluated in the log domain so it stays finite for
    j in the hundreds; alpha = 0 and alpha = pi return exact one-hot
    vectors (the states annihilated by the lowering/raising operator).

    The log binomials come from exact integer binomial coefficients and
    the whole log-domain sum is carried in extended precision: at
    j ~ 500 the binomial logs reach ~700, so plain double arithmetic
    would leave only ~1e-12 relative accuracy in p_n, visibly polluting
    weighted sums such as the mean mode number.
    """
    j = _check_rep_label(j)
    if not (0.0 <= alpha <= np.pi):
        raise ValueError(f"alpha must lie in [0, pi], got {alpha}")
    dim = 2 * j + 1
    if alpha == 0.0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    if alpha == np.pi:
        p = np.zeros(dim)
        p[-1] = 1.0
        return p
    n = np.arange(dim)
    log_binom = np.log([np.longdouble(math.comb(2 * j, int(k))) for k in n])
    half = np.longdouble(alpha) / 2
    log_p = (
        0.5 * log_binom
        + (2 * j - n) * np.log(np.cos(half))
        + n * np.log(np.sin(half))
    )
    return np.exp(log_p).astype(float)


def coherent_state(rep: SpinRep, alpha: float, base_n: int = 0) -> np.ndarray:
    """Finite coherent state as a rotation of an energy-mode state.

    Applies the Jy rotation by ``alpha`` to ``|j, base_n>``.  The sign of
    the exponent is fixed so that for ``base_n = 0`` the amplitudes are the
    nonnegative reals of :func:`coherent_coefficients`; the opposite sign
    flips the phase of every odd mode but leaves the distribution
    ``P_n = p_n**2`` untouched.
    """
    if not (0.0 <= alpha <= np.pi):
        raise ValueError(f"alpha must lie in [0, pi], got {alpha}")
    base = energy_mode_state(rep.j, base_n)
    return expm(1j * alpha * rep.Jy) @ base


def alpha_for_mean_n(j: int, nbar: float) -> float:
    """Rotation angle whose coherent state has mean mode number ``nbar``."""
    j = _check_rep_label(j)
    if not (0.0 <= nbar <= 2 * j):
        raise ValueError(f"nbar must lie in [0, {2*j}] for j={j}, got {nbar}")
    return 2.0 * np.arcsin(np.sqrt(nbar / (2.0 * j)))


def coherent_mean_n(j: int, alpha: float) -> float:
    """Mean mode number sum_n n * p_n(alpha)**2 = 2j sin(alpha/2)**2."""
    p = coherent_coefficients(j, alpha)
    n = np.arange(p.size)
    # fsum: the sum reaches 2j, so naive accumulation would round away
    # the last couple of digits the identity is checked against
    return math.fsum(n * p**2)


def product_state(field_x: np.ndarray, field_y: np.ndarray, atom: str) -> CoupledState:
    """Tensor product |field_x> (x) |field_y> (x) |atom> as a CoupledState."""
    fx = np.asarray(field_x, dtype=complex)
    fy = np.asarray(field_y, dtype=complex)
    if fx.ndim != 1 or fx.shape != fy.shape:
        raise ValueError(
            f"field vectors must be 1-d and of equal length, got {fx.shape} and {fy.shape}"
        )
    dim = fx.size
    if dim < 3 or dim % 2 == 0:
        raise ValueError(f"field vectors must have odd length 2j+1 >= 3, got {dim}")
    if atom not in ATOM_INDEX:
        raise ValueError(f"atom must be 'g' or 'e', got {atom!r}")
    j = (dim - 1) // 2
    amps = np.zeros((2, dim, dim), dtype=complex)
    amps[ATOM_INDEX[atom]] = np.outer(fx, fy)
    return CoupledState(j=j, amplitudes=amps.ravel())


def basis_state(j: int, n_x: int, n_y: int, atom: str) -> CoupledState:
    """Flat basis vector |n_x, n_y, atom>."""
    return product_state(energy_mode_state(j, n_x), energy_mode_state(j, n_y), atom)


def _sector_members(mode_dim: int, total: int):
    """(n_x, n_y, atom) triples of one sector, ordered by flat index."""
    n_max = mode_dim - 1
    members = []
    indices = []
    # ground block (atom index 0) comes first in the flat layout
    for n_x in range(max(0, total - n_max), min(n_max, total) + 1):
        n_y = total - n_x
        members.append((n_x, n_y, "g"))
        indices.append(n_x * mode_dim + n_y)
    for n_x in range(max(0, total - 1 - n_max), min(n_max, total - 1) + 1):
        n_y = total - 1 - n_x
        members.append((n_x, n_y, "e"))
        indices.append(mode_dim * mode_dim + n_x * mode_dim + n_y)
    order = np.argsort(indices)
    members = tuple(members[k] for k in order)
    indices = np.asarray(indices, dtype=np.intp)[order]
    return members, indices


def sector_basis(j: int, total_excitation: int, *, mode_dim: int | None = None) -> SectorBasis:
    """Basis of the sector with excitation count ``total_excitation``.

    ``mode_dim`` overrides the per-mode dimension (used for the truncated
    bosonic reference space, where it is the cutoff rather than 2j+1).
    """
    if mode_dim is None:
        j = _check_rep_label(j)
        mode_dim = 2 * j + 1
    max_total = 2 * (mode_dim - 1) + 1
    if not (0 <= total_excitation <= max_total):
        raise ValueError(
            f"total excitation must lie in 0..{max_total}, got {total_excitation}"
        )
    members, indices = _sector_members(mode_dim, total_excitation)
    return SectorBasis(
        total_excitation=int(total_excitation), members=members, block_indices=indices
    )


def sector_decomposition(j: int) -> list[SectorBasis]:
    """All sectors N = 0..4j+1; together they partition the basis."""
    j = _check_rep_label(j)
    return [sector_basis(j, total) for total in range(4 * j + 2)]


def truncated_poisson_coefficients(nbar: float, cutoff: int) -> np.ndarray:
    """Bosonic coherent-state amplitudes exp(-nbar/2) nbar^(n/2)/sqrt(n!).

    Returned truncated at ``cutoff`` entries and *not* renormalized, so the
    caller can check the discarded tail mass ``1 - sum(c**2)``.
    """
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    n = np.arange(cutoff)
    if nbar == 0.0:
        coeffs = np.zeros(cutoff)
        coeffs[0] = 1.0
        return coeffs
    log_c = 0.5 * (-nbar + n * np.log(nbar) - gammaln(n + 1))
    return np.exp(log_c)
