"""Expectation values, marginals, and collapse/revival diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .states import CoupledState, ModelParams

_AXES = ("x", "y")
_CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class ExpectationRecord:
    """The standard observable set evaluated at one time."""

    t: float
    n_x: float
    n_y: float
    sigma_z: float
    norm: float
    N_total: float

    def __post_init__(self):
        if self.n_x < -_CONSISTENCY_TOL or self.n_y < -_CONSISTENCY_TOL:
            raise ValueError(
                f"mean mode numbers must be nonnegative: ({self.n_x!r}, {self.n_y!r})"
            )
        if abs(self.sigma_z) > 1.0 + _CONSISTENCY_TOL:
            raise ValueError(f"sigma_z must lie in [-1, 1], got {self.sigma_z!r}")
        implied = self.n_x + self.n_y + 0.5 * (1.0 + self.sigma_z)
        if abs(self.N_total - implied) > _CONSISTENCY_TOL:
            raise ValueError(
                "N_total must equal n_x + n_y + (1 + sigma_z)/2: "
                f"got {self.N_total!r}, implied {implied!r}"
            )


def mode_distribution(state: CoupledState, axis: str) -> np.ndarray:
    """Marginal probability vector over the energy modes of one axis."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
    probabilities = np.abs(state.blocks()) ** 2
    if axis == "x":
        return probabilities.sum(axis=(0, 2))
    return probabilities.sum(axis=(0, 1))


def mode_number_expectation(state: CoupledState, axis: str) -> float:
    """Mean energy-mode number along one axis."""
    weights = mode_distribution(state, axis)
    return float(np.arange(weights.size, dtype=float) @ weights)


def atomic_inversion(state: CoupledState) -> float:
    """Excited minus ground atomic population."""
    probabilities = np.abs(state.blocks()) ** 2
    return float(probabilities[1].sum() - probabilities[0].sum())


def trajectory_expectations(traj: Trajectory) -> list[ExpectationRecord]:
    """Recompute one :class:`ExpectationRecord` per stored snapshot.

    The trajectory must have been produced with ``store_states=True``;
    the consistency invariant between ``N_total`` and the other columns
    is enforced by the record constructor.
    """
    if traj.states is None:
        raise ValueError(
            "trajectory carries no state snapshots; propagate with store_states=True"
        )
    dim = traj.mode_dim
    mode_numbers = np.arange(dim, dtype=float)
    records = []
    for t, row in zip(traj.times, traj.states):
        probabilities = np.abs(np.reshape(row, (2, dim, dim))) ** 2
        n_x = float(probabilities.sum(axis=(0, 2)) @ mode_numbers)
        n_y = float(probabilities.sum(axis=(0, 1)) @ mode_numbers)
        excited = float(probabilities[1].sum())
        ground = float(probabilities[0].sum())
        sigma_z = excited - ground
        records.append(
            ExpectationRecord(
                t=float(t),
                n_x=n_x,
                n_y=n_y,
                sigma_z=sigma_z,
                norm=math.sqrt(excited + ground),
                N_total=n_x + n_y + 0.5 * (1.0 + sigma_z),
            )
        )
    return records


def bare_rabi_period(params: ModelParams, mean_n: float, detuning_value: float = 0.0) -> float:
    """Period of the sector oscillation at the mean excitation level.

    Generalizes the equal-coupling resonant frequency through the
    quadrature coupling ``g_x^2 + g_y^2``; with ``g_x = g_y = g`` the
    squared frequency is ``detuning^2 + 8 g^2 (n+1)(1 - n/2j)``.
    """
    if not 0.0 <= mean_n <= 2.0 * params.j:
        raise ValueError(f"mean_n must lie in [0, 2j], got {mean_n!r}")
    weight = (mean_n + 1.0) * (1.0 - mean_n / (2.0 * params.j))
    omega_sq = detuning_value**2 + 4.0 * (params.g_x**2 + params.g_y**2) * weight
    if omega_sq <= 0.0:
        raise ValueError("both couplings and the detuning are zero")
    return 2.0 * math.pi / math.sqrt(omega_sq)


def inversion_envelope(times, sigma_z, window: float) -> np.ndarray:
    """Centered moving-window maximum of ``|sigma_z|``.

    ``window`` is the full time width of the sliding window; near the
    ends of the grid the window is truncated rather than padded.
    """
    if window <= 0.0:
        raise ValueError(f"window must be positive, got {window!r}")
    times = np.asarray(times, dtype=float)
    magnitude = np.abs(np.asarray(sigma_z, dtype=float))
    if times.shape != magnitude.shape:
        raise ValueError("times and sigma_z must have matching shapes")
    half = 0.5 * window
    left = np.searchsorted(times, times - half, side="left")
    right = np.searchsorted(times, times + half, side="right")
    return np.array([magnitude[lo:hi].max() for lo, hi in zip(left, right)])


def first_revival_time(times, sigma_z, window: float) -> float:
    """Time of the first post-collapse peak of the inversion envelope.

    Collapse is the first time the envelope falls below 0.25x its
    initial value; the revival is the highest point of the first
    contiguous region after that where the envelope exceeds 0.5x the
    initial value.  Raises ``ValueError`` when either feature is absent
    from the supplied data.
    """
    times = np.asarray(times, dtype=float)
    envelope = inversion_envelope(times, sigma_z, window)
    initial = envelope[0]
    if initial <= 0.0:
        raise ValueError("initial inversion amplitude is zero")
    collapsed = np.nonzero(envelope < 0.25 * initial)[0]
    if collapsed.size == 0:
        raise ValueError("no collapse: envelope never falls below 0.25x initial")
    start = int(collapsed[0])
    above = np.nonzero(envelope[start:] > 0.5 * initial)[0]
    if above.size == 0:
        raise ValueError("no revival detected after the collapse")
    first = start + int(above[0])
    stop = first
    while stop + 1 < envelope.size and envelope[stop + 1] > 0.5 * initial:
        stop += 1
    region = envelope[first : stop + 1]
    return float(times[first + int(np.argmax(region))])
