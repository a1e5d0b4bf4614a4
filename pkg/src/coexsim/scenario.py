"""Scenario model, presets and the scenario file format.

A scenario file is TOML with top-level keys, ``[radar]`` and ``[bs]`` array
tables and one ``[[paths]]`` table per propagation path.  Missing keys take
the defaults of :data:`DEFAULT`; unknown keys are rejected.  Path angles in
the file are look angles in degrees from broadside, the same convention as
``target_angle`` and ``blocked_sector``.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping

import numpy as np

from .beampattern import default_grid
from .channel import PathSpec, multipath_channel
from .errors import InvalidInputError
from .geometry import ArrayConfig, incidence_from_look
from .waveform import DEFAULT_NUM_SAMPLES

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

U64_MAX = 2**64 - 1
NORMALIZATION_MODES = ("fixed_K", "peak")

DEFAULT_DISTANCE = 10_000.0
LOS_ATTENUATION = 1.0
NLOS_ATTENUATION = 0.5
NLOS_EXCESS = 25.0


def _float(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise InvalidInputError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ScenarioPath:
    """A propagation path described with look angles (degrees from broadside)."""

    attenuation: float
    base_distance: float
    radar_angle: float
    bs_angle: float

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, _float(getattr(self, f.name), f"path {f.name}"))
        if self.attenuation <= 0 or self.base_distance <= 0:
            raise InvalidInputError("path attenuation and base_distance must be positive")
        for name in ("radar_angle", "bs_angle"):
            if not -90.0 < getattr(self, name) < 90.0:
                raise InvalidInputError(f"path {name} must lie in (-90, 90) degrees")

    def to_path_spec(self) -> PathSpec:
        return PathSpec(self.attenuation, self.base_distance,
                        float(incidence_from_look(self.radar_angle)),
                        float(incidence_from_look(self.bs_angle)))


@dataclass(frozen=True)
class Scenario:
    """Complete experiment description; immutable and hashable."""

    radar: ArrayConfig
    bs: ArrayConfig
    paths: tuple[ScenarioPath, ...]
    target_angle: float = 0.0
    blocked_sector: tuple[float, float] = (-10.0, -3.0)
    pfa: float = 1e-3
    snr_db: float = 10.0
    sweep_grid: tuple[float, float, float] = (-90.0, 90.0, 0.1)
    seed: int = 0
    normalization_mode: str = "fixed_K"

    def __post_init__(self) -> None:
        if not isinstance(self.radar, ArrayConfig) or not isinstance(self.bs, ArrayConfig):
            raise InvalidInputError("radar and bs must be ArrayConfig values")
        if self.radar.carrier_wavelength != self.bs.carrier_wavelength:
            raise InvalidInputError("radar and bs must share one carrier wavelength")
        paths = tuple(self.paths)
        if not paths or not all(isinstance(p, ScenarioPath) for p in paths):
            raise InvalidInputError("a scenario needs at least one path")
        object.__setattr__(self, "paths", paths)
        t = _float(self.target_angle, "target_angle")
        if not -90.0 <= t <= 90.0:
            raise InvalidInputError("target_angle must lie in [-90, 90]")
        object.__setattr__(self, "target_angle", t)
        if len(self.blocked_sector) != 2:
            raise InvalidInputError("blocked_sector must be [lo, hi]")
        lo, hi = (_float(v, "blocked_sector") for v in self.blocked_sector)
        if lo > hi or lo < -90.0 or hi > 90.0:
            raise InvalidInputError("blocked_sector must satisfy -90 <= lo <= hi <= 90")
        object.__setattr__(self, "blocked_sector", (lo, hi))
        pfa = _float(self.pfa, "pfa")
        if not 0.0 < pfa < 1.0:
            raise InvalidInputError("pfa must lie in (0, 1)")
        object.__setattr__(self, "pfa", pfa)
        object.__setattr__(self, "snr_db", _float(self.snr_db, "snr_db"))
        if len(self.sweep_grid) != 3:
            raise InvalidInputError("sweep_grid must be [lo, hi, step]")
        glo, ghi, gstep = (_float(v, "sweep_grid") for v in self.sweep_grid)
        if gstep <= 0 or glo > ghi or glo < -90.0 or ghi > 90.0:
            raise InvalidInputError("sweep_grid must satisfy -90 <= lo <= hi <= 90 and step > 0")
        object.__setattr__(self, "sweep_grid", (glo, ghi, gstep))
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed <= U64_MAX:
            raise InvalidInputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.normalization_mode not in NORMALIZATION_MODES:
            raise InvalidInputError(f"normalization_mode must be one of {NORMALIZATION_MODES}")

    @property
    def num_samples(self) -> int:
        """Waveform length L: the default block length, grown to M when needed."""
        return max(DEFAULT_NUM_SAMPLES, self.radar.num_elements)

    def path_specs(self) -> list[PathSpec]:
        return [p.to_path_spec() for p in self.paths]

    def grid(self) -> np.ndarray:
        return default_grid(*self.sweep_grid)

    def with_scaled_attenuation(self, c: float) -> "Scenario":
        return replace(self, paths=tuple(replace(p, attenuation=p.attenuation * c) for p in self.paths))


def to_channel(s: Scenario) -> np.ndarray:
    """Interference channel ``H`` (N x M) of a scenario."""
    return multipath_channel(s.path_specs(), s.radar, s.bs)


# ---------------------------------------------------------------- presets

def _two_path(los: float, nlos: float) -> tuple[ScenarioPath, ScenarioPath]:
    return (ScenarioPath(LOS_ATTENUATION, DEFAULT_DISTANCE, los, los),
            ScenarioPath(NLOS_ATTENUATION, DEFAULT_DISTANCE + NLOS_EXCESS, nlos, nlos))


_PRESETS: dict[str, Scenario] = {
    "fig1a": Scenario(
        radar=ArrayConfig(128), bs=ArrayConfig(4), paths=_two_path(-7.0, -6.0),
        blocked_sector=(-10.0, -3.0), sweep_grid=(-90.0, 90.0, 0.1),
    ),
    "fig1b": Scenario(
        radar=ArrayConfig(64), bs=ArrayConfig(4), paths=_two_path(-3.0, -2.0),
        blocked_sector=(-5.0, -2.0), sweep_grid=(-90.0, 90.0, 0.1),
    ),
    "fig2": Scenario(
        radar=ArrayConfig(128), bs=ArrayConfig(4), paths=_two_path(-7.0, -6.0),
        blocked_sector=(-10.0, -3.0), sweep_grid=(-90.0, 90.0, 1.0),
    ),
}
PRESET_NAMES = tuple(_PRESETS)
DEFAULT = _PRESETS["fig1a"]


def preset(name: str) -> Scenario:
    """One of the built-in experiments: ``fig1a``, ``fig1b`` or ``fig2``."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise InvalidInputError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None


# ---------------------------------------------------------------- file format

_SCALARS = ("target_angle", "pfa", "snr_db", "seed", "normalization_mode")
_ARRAY_KEYS = ("num_elements", "normalized_spacing", "carrier_wavelength")
_PATH_KEYS = ("attenuation", "base_distance", "radar_angle", "bs_angle")
_TOP_KEYS = set(_SCALARS) | {"blocked_sector", "sweep_grid", "radar", "bs", "paths"}


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {value!r}")


def to_toml(s: Scenario) -> str:
    """Canonical text form; equal scenarios serialise to identical bytes."""
    lines = [f"{k} = {_fmt(getattr(s, k))}" for k in ("target_angle", "blocked_sector", "pfa", "snr_db",
                                                       "sweep_grid", "seed", "normalization_mode")]
    for table in ("radar", "bs"):
        cfg = getattr(s, table)
        lines += ["", f"[{table}]"] + [f"{k} = {_fmt(getattr(cfg, k))}" for k in _ARRAY_KEYS]
    for p in s.paths:
        lines += ["", "[[paths]]"] + [f"{k} = {_fmt(getattr(p, k))}" for k in _PATH_KEYS]
    return "\n".join(lines) + "\n"


def digest(s: Scenario) -> str:
    """SHA-256 of the canonical serialisation."""
    return hashlib.sha256(to_toml(s).encode("utf-8")).hexdigest()


def _check_keys(table: Mapping, allowed, where: str) -> None:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise InvalidInputError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def from_mapping(data: Mapping[str, Any], base: Scenario = DEFAULT) -> Scenario:
    """Build a scenario from parsed TOML, filling missing keys from ``base``."""
    _check_keys(data, _TOP_KEYS, "scenario")
    kwargs: dict[str, Any] = {}
    for table in ("radar", "bs"):
        cfg = getattr(base, table)
        if table in data:
            sub = data[table]
            if not isinstance(sub, Mapping):
                raise InvalidInputError(f"[{table}] must be a table")
            _check_keys(sub, _ARRAY_KEYS, f"[{table}]")
            merged = {k: sub.get(k, getattr(cfg, k)) for k in _ARRAY_KEYS}
            n = merged["num_elements"]
            if isinstance(n, bool) or not isinstance(n, int):
                raise InvalidInputError(f"[{table}] num_elements must be an integer")
            cfg = ArrayConfig(n, _float(merged["normalized_spacing"], f"{table}.normalized_spacing"),
                              _float(merged["carrier_wavelength"], f"{table}.carrier_wavelength"))
        kwargs[table] = cfg
    if "paths" in data:
        raw = data["paths"]
        if not isinstance(raw, list) or not raw:
            raise InvalidInputError("paths must be a nonempty array of tables")
        paths = []
        for i, p in enumerate(raw):
            if not isinstance(p, Mapping):
                raise InvalidInputError(f"paths[{i}] must be a table")
            _check_keys(p, _PATH_KEYS, f"paths[{i}]")
            missing = [k for k in _PATH_KEYS if k not in p]
            if missing:
                raise InvalidInputError(f"paths[{i}] is missing {', '.join(missing)}")
            paths.append(ScenarioPath(**{k: p[k] for k in _PATH_KEYS}))
        kwargs["paths"] = tuple(paths)
    else:
        kwargs["paths"] = base.paths
    for key in ("blocked_sector", "sweep_grid"):
        value = data.get(key, getattr(base, key))
        if not isinstance(value, (list, tuple)):
            raise InvalidInputError(f"{key} must be an array")
        kwargs[key] = tuple(value)
    for key in _SCALARS:
        kwargs[key] = data.get(key, getattr(base, key))
    if not isinstance(kwargs["normalization_mode"], str):
        raise InvalidInputError("normalization_mode must be a string")
    return Scenario(**kwargs)


def from_toml(text: str, base: Scenario = DEFAULT) -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InvalidInputError(f"malformed scenario file: {exc}") from exc
    return from_mapping(data, base)


def load(path, base: Scenario = DEFAULT) -> Scenario:
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidInputError(f"cannot read scenario file {path}: {exc}") from exc
    return from_toml(text, base)
