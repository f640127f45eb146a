"""Strict key-value configuration files describing simulation runs."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import PropagationSpec
from .states import (
    CoupledState,
    ModelParams,
    alpha_for_mean_n,
    basis_state,
    coherent_coefficients,
    product_state,
)


class ConfigError(ValueError):
    """Malformed or invalid configuration content."""


INITIAL_KINDS = ("coherent", "energy_mode")

_SECTION_KEYS = {
    "model": ("j", "omega_x", "omega_y", "omega_a", "g_x", "g_y"),
    "initial": ("kind", "atom", "nbar_x", "nbar_y", "n_x", "n_y"),
    "propagation": ("t_max", "samples", "method", "rel_tol", "abs_tol", "detuning_mode"),
    "output": ("csv", "plot", "plot_file"),
    "run": ("seed",),
}


@dataclass(frozen=True)
class InitialStateSpec:
    """Tagged choice of initial preparation for the coupled system.

    ``value_x`` / ``value_y`` hold per-axis mean excitations for the
    ``coherent`` kind and integer mode labels for ``energy_mode``.
    """

    kind: str
    atom: str
    value_x: float
    value_y: float

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(
                f"[initial] kind: must be one of {INITIAL_KINDS}, got {self.kind!r}"
            )
        if self.atom not in ("g", "e"):
            raise ConfigError(f"[initial] atom: must be 'g' or 'e', got {self.atom!r}")
        for name, value in (("x", self.value_x), ("y", self.value_y)):
            if value < 0.0:
                raise ConfigError(
                    f"[initial] {self._field(name)}: must be nonnegative, got {value!r}"
                )
            if self.kind == "energy_mode" and float(value) != int(value):
                raise ConfigError(
                    f"[initial] n_{name}: must be an integer, got {value!r}"
                )

    def _field(self, axis: str) -> str:
        return f"nbar_{axis}" if self.kind == "coherent" else f"n_{axis}"

    def build(self, params: ModelParams) -> CoupledState:
        """Construct the normalized coupled state this spec describes."""
        if self.kind == "coherent":
            coeff_x = coherent_coefficients(params.j, alpha_for_mean_n(params.j, self.value_x))
            coeff_y = coherent_coefficients(params.j, alpha_for_mean_n(params.j, self.value_y))
            return product_state(coeff_x, coeff_y, self.atom)
        return basis_state(params.j, int(self.value_x), int(self.value_y), self.atom)


@dataclass(frozen=True)
class RunConfig:
    """Fully validated description of one simulation run."""

    params: ModelParams
    initial: InitialStateSpec
    spec: PropagationSpec
    csv_path: Path | None = None
    plot: bool = False
    plot_path: Path | None = None
    seed: int = 0

    def __post_init__(self):
        ceiling = 2 * self.params.j
        for axis in ("x", "y"):
            value = getattr(self.initial, f"value_{axis}")
            if value > ceiling:
                raise ConfigError(
                    f"[initial] {self.initial._field(axis)}: {value!r} exceeds the "
                    f"excitation ceiling 2j = {ceiling}"
                )

    def initial_state(self) -> CoupledState:
        return self.initial.build(self.params)


def _converted(section: str, key: str, raw: str, convert):
    try:
        return convert(raw)
    except (ValueError, TypeError):
        raise ConfigError(
            f"[{section}] {key}: cannot interpret {raw!r} as {convert.__name__}"
        ) from None


def _get(parser, section, key, convert, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] {key}: required key is missing")
        return default
    return _converted(section, key, parser.get(section, key), convert)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration file.

    Unknown sections or keys are rejected; syntax errors surface with the
    offending line number; value errors name the section and key.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in parser.options(section):
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}] of {path}")
    for section in ("model", "initial"):
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}] in {path}")

    try:
        params = ModelParams(
            j=_get(parser, "model", "j", int, required=True),
            omega_x=_get(parser, "model", "omega_x", float, required=True),
            omega_y=_get(parser, "model", "omega_y", float, required=True),
            omega_a=_get(parser, "model", "omega_a", float, required=True),
            g_x=_get(parser, "model", "g_x", float, required=True),
            g_y=_get(parser, "model", "g_y", float, required=True),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[model]: {exc}") from exc

    kind = _get(parser, "initial", "kind", str, required=True)
    atom = _get(parser, "initial", "atom", str, required=True)
    if kind == "coherent":
        forbidden, wanted = ("n_x", "n_y"), ("nbar_x", "nbar_y")
    else:
        forbidden, wanted = ("nbar_x", "nbar_y"), ("n_x", "n_y")
    for key in forbidden:
        if parser.has_option("initial", key):
            raise ConfigError(
                f"[initial] {key}: not applicable when kind = {kind!r}"
            )
    value_x = _get(parser, "initial", wanted[0], float, required=True)
    value_y = _get(parser, "initial", wanted[1], float, required=True)
    initial = InitialStateSpec(kind=kind, atom=atom, value_x=value_x, value_y=value_y)

    g_max = max(params.g_x, params.g_y)
    default_t_max = 50.0 / g_max if g_max > 0.0 else 50.0
    t_max = _get(parser, "propagation", "t_max", float, default=default_t_max) \
        if parser.has_section("propagation") else default_t_max
    samples = 2000
    spec_kwargs = {}
    if parser.has_section("propagation"):
        samples = _get(parser, "propagation", "samples", int, default=samples)
        for key in ("method", "detuning_mode"):
            value = _get(parser, "propagation", key, str)
            if value is not None:
                spec_kwargs[key] = value
        for key in ("rel_tol", "abs_tol"):
            value = _get(parser, "propagation", key, float)
            if value is not None:
                spec_kwargs[key] = value
    if t_max <= 0.0:
        raise ConfigError(f"[propagation] t_max: must be positive, got {t_max!r}")
    if samples < 1:
        raise ConfigError(f"[propagation] samples: must be >= 1, got {samples!r}")
    try:
        spec = PropagationSpec(t_grid=np.linspace(0.0, t_max, samples), **spec_kwargs)
    except ValueError as exc:
        raise ConfigError(f"[propagation]: {exc}") from exc

    csv_path = plot_path = None
    plot = False
    if parser.has_section("output"):
        raw_csv = _get(parser, "output", "csv", str)
        raw_plot_file = _get(parser, "output", "plot_file", str)
        plot = _get(parser, "output", "plot", _parse_bool, default=False)
        csv_path = Path(raw_csv) if raw_csv else None
        plot_path = Path(raw_plot_file) if raw_plot_file else None
        if plot and plot_path is None:
            stem = csv_path.with_suffix(".svg") if csv_path else Path("trajectory.svg")
            plot_path = stem

    seed = 0
    if parser.has_section("run"):
        seed = _get(parser, "run", "seed", int, default=0)

    return RunConfig(
        params=params,
        initial=initial,
        spec=spec,
        csv_path=csv_path,
        plot=plot,
        plot_path=plot_path,
        seed=seed,
    )


def with_overrides(config: RunConfig, **changes) -> RunConfig:
    """Return a copy of ``config`` with selected fields replaced.

    ``j`` replaces the representation size inside ``params``; ``method``
    replaces the propagation method inside ``spec``; the remaining keys
    are top-level :class:`RunConfig` fields.
    """
    params = config.params
    spec = config.spec
    if "j" in changes:
        params = dataclasses.replace(params, j=changes.pop("j"))
    if "method" in changes:
        spec = dataclasses.replace(spec, method=changes.pop("method"))
    if "t_grid" in changes:
        spec = dataclasses.replace(spec, t_grid=changes.pop("t_grid"))
    return dataclasses.replace(config, params=params, spec=spec, **changes)
