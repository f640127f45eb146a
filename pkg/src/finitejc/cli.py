"""Command-line front end: simulate, compare, bench, and spectrum."""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, with_overrides
from .dynamics import (
    PROPAGATION_METHODS,
    IntegrationError,
    PropagationSpec,
    ReducedState,
    Trajectory,
    propagate_exact,
    propagate_exact_model,
    propagate_reduced,
    reduced_rhs,
    resonant_closed_form,
)
from .hamiltonians import bosonic_mode_model, finite_mode_model, sector_matrix
from .observables import bare_rabi_period, first_revival_time
from .states import sector_basis, truncated_poisson_coefficients

TRAJECTORY_COLUMNS = ("t", "n_x", "n_y", "sigma_z", "norm", "N_total")

_TIE_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# CSV round-trip


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write the observable columns with shortest-round-trip floats."""
    columns = (traj.times, traj.n_x, traj.n_y, traj.sigma_z, traj.norm, traj.n_total)
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for k in range(traj.times.size):
        lines.append(",".join(repr(float(column[k])) for column in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Parse a trajectory CSV back into named float columns."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"empty trajectory file: {path}")
    header = lines[0].split(",")
    if tuple(header) != TRAJECTORY_COLUMNS:
        raise ValueError(f"unexpected header {header!r} in {path}")
    rows = [line.split(",") for line in lines[1:] if line]
    data = np.array([[float(cell) for cell in row] for row in rows], dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


# ---------------------------------------------------------------------------
# simulate


def _closed_form_trajectory(config: RunConfig) -> Trajectory:
    initial = config.initial
    if (
        initial.kind != "energy_mode"
        or initial.value_x != initial.value_y
        or initial.atom != "e"
    ):
        raise ValueError(
            "method resonant_closed_form requires kind = energy_mode with "
            "n_x == n_y and atom = e"
        )
    n = int(initial.value_x)
    solution = resonant_closed_form(
        config.params, n, (1.0, 0.0, 0.0), config.spec.detuning_mode
    )
    t = config.spec.t_grid
    a, b, c = np.abs(solution(t)) ** 2
    total = a + b + c
    scale = np.where(total > 0.0, 1.0 / total, 0.0)
    n_x = (n * a + (n + 1) * b + n * c) * scale
    n_y = (n * a + n * b + (n + 1) * c) * scale
    sigma_z = (a - b - c) * scale
    return Trajectory(
        times=t,
        n_x=n_x,
        n_y=n_y,
        sigma_z=sigma_z,
        norm=np.sqrt(total),
        n_total=n_x + n_y + a * scale,
        method="resonant_closed_form",
        mode_dim=config.params.mode_dim,
        detuning_mode=config.spec.detuning_mode,
    )


def _write_plot(path, traj: Trajectory) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.0))
    top.plot(traj.times, traj.n_x, label="mean mode number x")
    top.plot(traj.times, traj.n_y, "--", label="mean mode number y")
    top.set_ylabel("mean mode number")
    top.legend(loc="best")
    bottom.plot(traj.times, traj.sigma_z, color="tab:red")
    bottom.set_ylabel("atomic inversion")
    bottom.set_xlabel("time")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def run_simulation(config: RunConfig) -> Trajectory:
    """Propagate one configured run and emit the requested artifacts."""
    method = config.spec.method
    if method == "reduced_ode":
        traj = propagate_reduced(config.initial_state(), config.params, config.spec)
    elif method == "exact_sector":
        traj = propagate_exact(config.initial_state(), config.params, config.spec)
    else:
        traj = _closed_form_trajectory(config)
    if config.csv_path is not None:
        write_trajectory_csv(config.csv_path, traj)
    if config.plot and config.plot_path is not None:
        try:
            _write_plot(config.plot_path, traj)
        except Exception as exc:  # plotting must never change the run outcome
            print(f"warning: plot generation failed: {exc}", file=sys.stderr)
    return traj


# ---------------------------------------------------------------------------
# compare


@dataclass(frozen=True)
class CompareEntry:
    j: int
    windowed_difference: float
    full_difference: float
    revival_time: float | None


@dataclass(frozen=True)
class CompareReport:
    entries: tuple[CompareEntry, ...]
    reference_revival: float | None
    window_end: float
    monotone_difference: bool
    monotone_revival: bool | None

    def __str__(self):
        lines = [
            f"window for sup-norm differences: t in [0, {self.window_end:.6g}]",
            "j        sup|dσz| (window)  sup|dσz| (full)    revival",
        ]
        for e in self.entries:
            revival = f"{e.revival_time:.6g}" if e.revival_time is not None else "-"
            lines.append(
                f"{e.j:<8d} {e.windowed_difference:<18.6e} "
                f"{e.full_difference:<18.6e} {revival}"
            )
        reference = (
            f"{self.reference_revival:.6g}" if self.reference_revival is not None else "-"
        )
        lines.append(f"reference revival: {reference}")
        lines.append(f"monotone difference decrease: {self.monotone_difference}")
        lines.append(f"monotone revival shift: {self.monotone_revival}")
        return "\n".join(lines)


def _limit_rabi_period(params, mean_n: float) -> float:
    omega_sq = 4.0 * (params.g_x**2 + params.g_y**2) * (mean_n + 1.0)
    if omega_sq <= 0.0:
        return math.inf
    return 2.0 * math.pi / math.sqrt(omega_sq)


def _bosonic_reference(config: RunConfig, cutoff: int):
    """Truncated-bosonic trajectory plus the truncation tail mass."""
    from scipy.stats import poisson

    initial = config.initial
    model = bosonic_mode_model(config.params, cutoff=cutoff)
    grid = np.zeros((cutoff, cutoff), dtype=complex)
    if initial.kind == "coherent":
        tail = float(
            poisson.sf(cutoff - 1, initial.value_x)
            + poisson.sf(cutoff - 1, initial.value_y)
        )
        coeff_x = truncated_poisson_coefficients(initial.value_x, cutoff)
        coeff_y = truncated_poisson_coefficients(initial.value_y, cutoff)
        grid[:, :] = np.outer(coeff_x, coeff_y)
    else:
        n_x, n_y = int(initial.value_x), int(initial.value_y)
        if n_x >= cutoff or n_y >= cutoff:
            raise ValueError(
                f"energy_mode labels ({n_x}, {n_y}) do not fit below cutoff {cutoff}"
            )
        tail = 0.0
        grid[n_x, n_y] = 1.0
    if tail >= 1e-8:
        raise ValueError(
            f"bosonic cutoff {cutoff} leaves truncation tail mass {tail:.3e} "
            ">= 1e-8; increase the cutoff"
        )
    amplitudes = np.zeros(model.dim, dtype=complex)
    block = slice(model.mode_dim**2, None) if initial.atom == "e" else slice(0, model.mode_dim**2)
    amplitudes[block] = grid.ravel()
    amplitudes /= np.linalg.norm(amplitudes)
    spec = PropagationSpec(t_grid=config.spec.t_grid)
    return propagate_exact_model(amplitudes, model, spec), tail


def compare_command(config: RunConfig, j_list, cutoff: int) -> CompareReport:
    """Convergence report of the finite model against a bosonic reference."""
    if not j_list:
        raise ValueError("compare needs at least one representation size")
    reference, _ = _bosonic_reference(config, cutoff)
    t = config.spec.t_grid
    mean_n = 0.5 * (config.initial.value_x + config.initial.value_y)

    reference_revival = None
    window_end = float(t[-1])
    period = _limit_rabi_period(config.params, mean_n)
    if math.isfinite(period):
        try:
            reference_revival = first_revival_time(t, reference.sigma_z, 5.0 * period)
            window_end = reference_revival
        except ValueError:
            pass
    cut = int(np.searchsorted(t, window_end, side="right"))

    entries = []
    for j in j_list:
        run = with_overrides(config, j=int(j), method="exact_sector")
        traj = propagate_exact(run.initial_state(), run.params, run.spec)
        difference = np.abs(traj.sigma_z - reference.sigma_z)
        try:
            revival = first_revival_time(
                t, traj.sigma_z, 5.0 * bare_rabi_period(run.params, mean_n)
            )
        except ValueError:
            revival = None
        entries.append(
            CompareEntry(
                j=int(j),
                windowed_difference=float(difference[:cut].max()),
                full_difference=float(difference.max()),
                revival_time=revival,
            )
        )

    def decreasing(a, b):
        return b < a or max(a, b) < _TIE_FLOOR

    monotone_difference = all(
        decreasing(entries[k].windowed_difference, entries[k + 1].windowed_difference)
        for k in range(len(entries) - 1)
    )
    if any(e.revival_time is None for e in entries):
        monotone_revival = None
    else:
        monotone_revival = all(
            entries[k + 1].revival_time < entries[k].revival_time
            for k in range(len(entries) - 1)
        )
    return CompareReport(
        entries=tuple(entries),
        reference_revival=reference_revival,
        window_end=window_end,
        monotone_difference=monotone_difference,
        monotone_revival=monotone_revival,
    )


def write_compare_csv(path, report: CompareReport) -> None:
    lines = ["j,windowed_difference,full_difference,revival_time"]
    for e in report.entries:
        revival = repr(e.revival_time) if e.revival_time is not None else ""
        lines.append(
            f"{e.j},{repr(e.windowed_difference)},{repr(e.full_difference)},{revival}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


# ---------------------------------------------------------------------------
# bench


@dataclass(frozen=True)
class BenchEntry:
    j: int
    n: int
    exact_step_seconds: float
    reduced_step_seconds: float


@dataclass(frozen=True)
class BenchReport:
    entries: tuple[BenchEntry, ...]
    exact_slope: float | None
    reduced_slope: float | None
    op_estimate: float

    def __str__(self):
        lines = ["j        N        exact step (s)     reduced step (s)"]
        for e in self.entries:
            lines.append(
                f"{e.j:<8d} {e.n:<8d} {e.exact_step_seconds:<18.6e} "
                f"{e.reduced_step_seconds:<18.6e}"
            )
        exact = f"{self.exact_slope:.3f}" if self.exact_slope is not None else "-"
        reduced = f"{self.reduced_slope:.3f}" if self.reduced_slope is not None else "-"
        lines.append(f"log-log slope vs N: exact_sector {exact}, reduced_ode {reduced}")
        lines.append(f"op estimate (quadratic step accounting): {self.op_estimate:.3g}")
        return "\n".join(lines)


class _SectorStepper:
    """Applies the fixed-step exact propagator sector by sector."""

    def __init__(self, amplitudes, model, dt, weight_floor=1e-24):
        d = model.mode_dim
        totals = np.add.outer(np.arange(d), np.arange(d)).ravel()
        labels = np.concatenate([totals, totals + 1])
        weights = np.bincount(labels, weights=np.abs(amplitudes) ** 2)
        self.state = np.array(amplitudes, dtype=complex)
        self.blocks = []
        for total in np.nonzero(weights > weight_floor)[0]:
            basis = sector_basis(None, int(total), mode_dim=d)
            matrix = sector_matrix(model, basis)
            values, vectors = np.linalg.eigh(matrix)
            self.blocks.append(
                (np.asarray(basis.block_indices), vectors, np.exp(-1j * values * dt))
            )

    def step(self):
        for indices, vectors, phases in self.blocks:
            sub = self.state[indices]
            self.state[indices] = vectors @ (phases * (vectors.conj().T @ sub))


def _rk4_reduced_step(t, state, dt, params, mode):
    def advanced(base, derivative, factor):
        return ReducedState(
            excited=base.excited + factor * derivative.excited,
            ground=base.ground + factor * derivative.ground,
        )

    k1 = reduced_rhs(t, state, params, mode)
    k2 = reduced_rhs(t + 0.5 * dt, advanced(state, k1, 0.5 * dt), params, mode)
    k3 = reduced_rhs(t + 0.5 * dt, advanced(state, k2, 0.5 * dt), params, mode)
    k4 = reduced_rhs(t + dt, advanced(state, k3, dt), params, mode)
    sixth = dt / 6.0
    return ReducedState(
        excited=state.excited
        + sixth * (k1.excited + 2.0 * k2.excited + 2.0 * k3.excited + k4.excited),
        ground=state.ground
        + sixth * (k1.ground + 2.0 * k2.ground + 2.0 * k3.ground + k4.ground),
    )


def bench_command(j_list, steps: int, dt: float = 0.025, nbar: float = 5.0) -> BenchReport:
    """Per-step wall time of both propagators across representation sizes."""
    from .states import ModelParams, alpha_for_mean_n, coherent_coefficients, product_state

    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    if list(j_list) != sorted(set(int(j) for j in j_list)):
        raise ValueError("j list must be strictly ascending")
    if steps == 0:
        return BenchReport(entries=(), exact_slope=None, reduced_slope=None, op_estimate=0.0)

    entries = []
    for j in j_list:
        j = int(j)
        params = ModelParams(j=j, omega_x=1.0, omega_y=1.0, omega_a=1.0, g_x=1.0, g_y=1.0)
        mean_n = min(nbar, float(2 * j))
        coeff = coherent_coefficients(j, alpha_for_mean_n(j, mean_n))
        state = product_state(coeff, coeff, "e")

        stepper = _SectorStepper(state.amplitudes, finite_mode_model(params), dt)
        stepper.step()  # warm caches before timing
        begin = time.perf_counter()
        for _ in range(steps):
            stepper.step()
        exact_per_step = (time.perf_counter() - begin) / steps

        reduced = ReducedState.from_coupled(state)
        reduced = _rk4_reduced_step(0.0, reduced, dt, params, "exact_energy_difference")
        begin = time.perf_counter()
        current_t = dt
        for _ in range(steps):
            reduced = _rk4_reduced_step(
                current_t, reduced, dt, params, "exact_energy_difference"
            )
            current_t += dt
        reduced_per_step = (time.perf_counter() - begin) / steps

        entries.append(
            BenchEntry(
                j=j,
                n=2 * j,
                exact_step_seconds=exact_per_step,
                reduced_step_seconds=reduced_per_step,
            )
        )

    def slope(times):
        if len(entries) < 2 or any(v <= 0.0 for v in times):
            return None
        sizes = np.log([e.n for e in entries])
        return float(np.polyfit(sizes, np.log(times), 1)[0])

    return BenchReport(
        entries=tuple(entries),
        exact_slope=slope([e.exact_step_seconds for e in entries]),
        reduced_slope=slope([e.reduced_step_seconds for e in entries]),
        op_estimate=float(steps) ** 2,
    )


def write_bench_csv(path, report: BenchReport) -> None:
    lines = ["j,n,exact_step_seconds,reduced_step_seconds"]
    for e in report.entries:
        lines.append(
            f"{e.j},{e.n},{repr(e.exact_step_seconds)},{repr(e.reduced_step_seconds)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


# ---------------------------------------------------------------------------
# spectrum


def spectrum_command(config: RunConfig, sector: int) -> np.ndarray:
    """Eigenvalues of the coupled Hamiltonian restricted to one sector."""
    model = finite_mode_model(config.params)
    basis = sector_basis(config.params.j, sector)
    return np.linalg.eigvalsh(sector_matrix(model, basis))


def write_spectrum_csv(path, sector: int, values: np.ndarray) -> None:
    lines = ["sector,index,eigenvalue"]
    for k, value in enumerate(values):
        lines.append(f"{sector},{k},{repr(float(value))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finitejc",
        description="Finite two-mode Jaynes-Cummings simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="propagate one configured run")
    sim.add_argument("config", help="path to a run configuration file")
    sim.add_argument("--csv", help="override the output CSV path")
    sim.add_argument("--plot-file", help="write a plot to this path")
    sim.add_argument("--method", choices=PROPAGATION_METHODS, help="override the propagation method")

    cmp_parser = sub.add_parser("compare", help="finite vs truncated-bosonic convergence")
    cmp_parser.add_argument("config", help="path to a run configuration file")
    cmp_parser.add_argument("--j", type=int, nargs="+", required=True, help="representation sizes")
    cmp_parser.add_argument("--cutoff", type=int, default=40, help="bosonic truncation dimension")
    cmp_parser.add_argument("--csv", help="write the report table to this path")

    ben = sub.add_parser("bench", help="per-step timing of both propagators")
    ben.add_argument("--j", type=int, nargs="+", required=True, help="representation sizes")
    ben.add_argument("--steps", type=int, required=True, help="timed steps per size")
    ben.add_argument("--dt", type=float, default=0.025, help="fixed step size")
    ben.add_argument("--csv", help="write the timing table to this path")

    spect = sub.add_parser("spectrum", help="dressed eigenvalues of one sector")
    spect.add_argument("config", help="path to a run configuration file")
    spect.add_argument("--sector", type=int, required=True, help="total excitation label")
    spect.add_argument("--csv", help="write the eigenvalues to this path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = load_config(args.config)
            overrides = {}
            if args.csv:
                overrides["csv_path"] = Path(args.csv)
            if args.plot_file:
                overrides["plot"] = True
                overrides["plot_path"] = Path(args.plot_file)
            if args.method:
                overrides["method"] = args.method
            if overrides:
                config = with_overrides(config, **overrides)
            traj = run_simulation(config)
            print(
                f"simulated {traj.times.size} samples to t = {traj.times[-1]:.6g} "
                f"({traj.method}); final inversion {traj.sigma_z[-1]:+.6f}"
            )
            if config.csv_path is not None:
                print(f"wrote {config.csv_path}")
            return 0
        if args.command == "compare":
            config = load_config(args.config)
            report = compare_command(config, args.j, args.cutoff)
            print(report)
            if args.csv:
                write_compare_csv(args.csv, report)
                print(f"wrote {args.csv}")
            return 0 if report.monotone_difference else 2
        if args.command == "bench":
            report = bench_command(args.j, args.steps, dt=args.dt)
            print(report)
            if args.csv:
                write_bench_csv(args.csv, report)
                print(f"wrote {args.csv}")
            return 0
        config = load_config(args.config)
        values = spectrum_command(config, args.sector)
        if args.csv:
            write_spectrum_csv(args.csv, args.sector, values)
            print(f"wrote {args.csv}")
        else:
            for value in values:
                print(repr(float(value)))
        return 0
    except (ConfigError, ValueError, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
