"""Run configuration: flat ``section.key = value`` text with strict keys.

Lines starting with ``#`` and blank lines are ignored. Values come from, in
rising precedence: built-in defaults, the config file, ``PPMLR_*``
environment variables, and command-line flags. An environment variable
names a key in upper case with ``__`` for the dot, so ``PPMLR_RUN__STEPS=20``
sets ``run.steps``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .decomp import PartitionConfig
from .grid import FULL_CELLS, FULL_EXTENT, FULL_RATIO, FULL_SPACING, StretchedGrid, magnetosphere_grid
from .physics import Constants, DEFAULT_MOMENT
from .ppm1d import as_scheme
from .stepper import RadialProfile, SolarWindParams, SolverOptions

ENV_PREFIX = "PPMLR_"


class ConfigError(ValueError):
    pass


def _floats(n):
    def parse(text):
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != n:
            raise ValueError(f"expected {n} comma-separated numbers")
        return tuple(float(p) for p in parts)
    return parse


def _ints(n):
    def parse(text):
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != n:
            raise ValueError(f"expected {n} comma-separated integers")
        return tuple(int(p) for p in parts)
    return parse


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


def _optional(parse):
    def inner(text):
        return None if str(text).strip().lower() in ("none", "") else parse(text)
    return inner


def _choice(*options):
    def parse(text):
        t = str(text).strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    return parse


PRESETS = {
    "full": {"grid.cells": FULL_CELLS, "grid.d_uniform": FULL_SPACING, "grid.ratio": FULL_RATIO},
    "desk": {"grid.cells": (30, 35, 35), "grid.d_uniform": 2.0, "grid.ratio": 1.2},
}

# key -> (parser, default)
SCHEMA = {
    "grid.preset": (_choice(*PRESETS), "desk"),
    "grid.cells": (_optional(_ints(3)), None),
    "grid.d_uniform": (_optional(float), None),
    "grid.ratio": (_optional(float), None),
    "grid.x_range": (_floats(2), FULL_EXTENT[0]),
    "grid.y_range": (_floats(2), FULL_EXTENT[1]),
    "grid.z_range": (_floats(2), FULL_EXTENT[2]),
    "grid.core_half_width": (float, 10.0),
    "partition.nx": (int, 1),
    "partition.ny": (int, 1),
    "partition.nz": (int, 1),
    "solar_wind.rho": (float, SolarWindParams.rho_sw),
    "solar_wind.p": (float, SolarWindParams.p_sw),
    "solar_wind.v": (_floats(3), SolarWindParams.v_sw),
    "solar_wind.imf": (_floats(3), SolarWindParams.imf),
    "profile.r0": (float, RadialProfile.r0),
    "profile.density_boost": (float, RadialProfile.density_boost),
    "profile.temperature_boost": (float, RadialProfile.temperature_boost),
    "constants.gamma": (float, 5.0 / 3.0),
    "constants.mu0": (float, 1.0),
    "constants.dipole_moment": (_floats(3), DEFAULT_MOMENT),
    "constants.p_floor": (_optional(float), None),
    "run.cfl": (float, 0.5),
    "run.ghost": (_optional(int), None),
    "run.scheme": (_choice("ppm", "monotone", "compact"), "ppm"),
    "run.sources": (_bool, True),
    "run.transport": (_choice("staged", "direct"), "direct"),
    "run.steps": (_optional(int), 10),
    "run.end_time": (_optional(float), None),
    "run.snapshot_every": (int, 10),
    "run.out": (str, "ppmlr-out"),
    "run.seed": (_optional(int), None),
    "run.inner_radius": (float, 3.0),
    "run.efficiency": (float, 0.732),
}


def parse_text(text, source="config"):
    """Raw ``{key: string}`` pairs from config text."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def env_overrides(environ=None):
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower().replace("__", ".")
        if key not in SCHEMA:
            raise ConfigError(f"environment variable {name} names unknown key {key!r}")
        out[key] = value
    return out


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def build(cls, *layers):
        """Merge raw layers (later wins), parse and validate."""
        raw = {}
        for layer in layers:
            for key in layer:
                if key not in SCHEMA:
                    raise ConfigError(f"unknown key {key!r}")
            raw.update(layer)
        values = {}
        for key, (parse, default) in SCHEMA.items():
            if key in raw:
                try:
                    values[key] = parse(raw[key]) if isinstance(raw[key], str) else raw[key]
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{key}: {exc}") from None
            else:
                values[key] = default
        for key, value in PRESETS[values["grid.preset"]].items():
            if values[key] is None:
                values[key] = value
        cfg = cls(values)
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path=None, environ=None, overrides=None):
        layers = []
        if path is not None:
            with open(path) as fh:
                layers.append(parse_text(fh.read(), str(path)))
        layers.append(env_overrides(environ))
        layers.append(overrides or {})
        return cls.build(*layers)

    def check(self):
        v = self.values
        if v["run.snapshot_every"] < 1:
            raise ConfigError("run.snapshot_every must be at least 1")
        if v["run.steps"] is None and v["run.end_time"] is None:
            raise ConfigError("set run.steps or run.end_time")
        if v["run.steps"] is not None and v["run.steps"] < 0:
            raise ConfigError("run.steps must be non-negative")
        if not 0.0 < v["run.efficiency"] <= 1.0:
            raise ConfigError("run.efficiency must be in (0, 1]")
        try:
            self.options()
            self.solar_wind()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        g = v["run.ghost"]
        need = as_scheme(v["run.scheme"]).ghost
        if g is not None and g < need:
            raise ConfigError(f"run.ghost = {g} is below the {need} the {v['run.scheme']} scheme needs")

    def grid(self) -> StretchedGrid:
        v = self.values
        return magnetosphere_grid(v["grid.cells"], v["grid.d_uniform"], v["grid.ratio"],
                                  (v["grid.x_range"], v["grid.y_range"], v["grid.z_range"]),
                                  v["grid.core_half_width"])

    def partition(self) -> PartitionConfig:
        v = self.values
        return PartitionConfig(v["partition.nx"], v["partition.ny"], v["partition.nz"])

    def constants(self) -> Constants:
        v = self.values
        return Constants(mu0=v["constants.mu0"], gamma=v["constants.gamma"],
                         dipole_moment=v["constants.dipole_moment"], p_floor=v["constants.p_floor"])

    def solar_wind(self) -> SolarWindParams:
        v = self.values
        return SolarWindParams(v["solar_wind.rho"], v["solar_wind.p"], v["solar_wind.v"], v["solar_wind.imf"])

    def profile(self) -> RadialProfile:
        v = self.values
        return RadialProfile(v["profile.r0"], v["profile.density_boost"], v["profile.temperature_boost"])

    def options(self) -> SolverOptions:
        v = self.values
        return SolverOptions(self.constants(), as_scheme(v["run.scheme"]), v["run.cfl"], v["run.sources"])

    def dump(self):
        lines = []
        for key, value in self.values.items():
            if isinstance(value, tuple):
                value = ",".join(repr(x) for x in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"
