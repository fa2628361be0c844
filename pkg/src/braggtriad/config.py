"""Run configuration, figure presets and INI (de)serialization."""

from __future__ import annotations

import configparser
import dataclasses
import io
import math
from dataclasses import dataclass, field, replace

from .condensate import TWO_PI, CondensateParams
from .observables import ProbeState


class ConfigError(ValueError):
    pass


ATOMS = 5e6
MU_PHONON = TWO_PI * 6.7e3
MU_PARTICLE = TWO_PI * 1.23e3


@dataclass(frozen=True)
class RunConfig:
    params: CondensateParams
    probe: ProbeState = ProbeState.coherent(1.0)
    t_start_us: float = 0.0
    t_stop_us: float = 1000.0
    t_step_us: float = 1.0
    output: str | None = None
    preset: str | None = None
    # threshold curve
    x_min: float = 0.1
    x_max: float = 10.0
    x_points: int = 200
    # Rabi sweep
    omega_min: float = 0.0
    omega_max: float = 20.0
    omega_points: int = 41
    t_fixed_us: float = 10.0
    # oracle cross-check
    cutoff: int = 24
    tau_max: float = 2.0
    tau_points: int = 21

    def __post_init__(self):
        if not self.t_step_us > 0:
            raise ConfigError(f"time step must be > 0, got {self.t_step_us}")
        if not self.t_stop_us >= self.t_start_us >= 0:
            raise ConfigError("need stop >= start >= 0")
        if not 0 < self.x_min < self.x_max:
            raise ConfigError("need 0 < x_min < x_max")
        if self.x_points < 2 or self.omega_points < 2 or self.tau_points < 2:
            raise ConfigError("grids need at least 2 points")
        if not 0 <= self.omega_min < self.omega_max:
            raise ConfigError("need 0 <= omega_min < omega_max")
        if self.t_fixed_us < 0:
            raise ConfigError("t_fixed must be >= 0")
        if self.cutoff < 2:
            raise ConfigError("cutoff must be >= 2")
        if not self.tau_max > 0:
            raise ConfigError("tau_max must be > 0")

    def time_grid_us(self):
        n = int(math.floor((self.t_stop_us - self.t_start_us) / self.t_step_us + 1e-9))
        return [self.t_start_us + k * self.t_step_us for k in range(n + 1)]


def _phys(x, mu, rabi):
    return CondensateParams(atom_count=ATOMS, chem_potential=mu, momentum_x=x, rabi=rabi)


_FIG2B = dict(params=_phys(0.47, MU_PHONON, 7.0), probe=ProbeState.coherent(1.0), t_stop_us=3000.0)
_FIG4A = dict(params=_phys(8.329, MU_PARTICLE, 7.0), probe=ProbeState.fock(1))

PRESETS = {
    "fig1": dict(params=_phys(0.47, MU_PHONON, 7.0), x_min=0.1, x_max=10.0, x_points=200),
    "fig2a": dict(params=_phys(0.47, MU_PHONON, 8.0), probe=ProbeState.coherent(1.0)),
    "fig2b": _FIG2B,
    "fig2a-inset": dict(params=_phys(0.47, MU_PHONON, 16.0), probe=ProbeState.coherent(1.0), t_stop_us=200.0),
    "fig2b-inset": dict(params=_phys(2.0, MU_PHONON, 16.0), probe=ProbeState.coherent(1.0), t_stop_us=200.0),
    "fig3a": {**_FIG2B, "probe": ProbeState.vacuum()},
    "fig3b": {**_FIG2B, "probe": ProbeState.fock(1)},
    "fig4a": _FIG4A,
    "fig4b": {**_FIG4A, "params": _phys(8.329, MU_PARTICLE, 1.0)},
    "fig4a-inset": {**_FIG4A, "omega_min": 0.0, "omega_max": 20.0, "omega_points": 41, "t_fixed_us": 10.0},
}


def preset(name: str) -> RunConfig:
    try:
        fields = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return RunConfig(preset=name, **fields)


def default_config() -> RunConfig:
    return preset("fig2b")


# --- INI round trip -----------------------------------------------------------

_PHYSICS_KEYS = {
    "atom_count": "atom_count",
    "chem_potential_rad_s": "chem_potential",
    "momentum_x": "momentum_x",
    "rabi": "rabi",
}
_SECTIONS = {
    "time": {"start_us": "t_start_us", "stop_us": "t_stop_us", "step_us": "t_step_us"},
    "sweep": {
        "x_min": "x_min", "x_max": "x_max", "x_points": "x_points",
        "omega_min": "omega_min", "omega_max": "omega_max", "omega_points": "omega_points",
        "t_fixed_us": "t_fixed_us",
    },
    "oracle": {"cutoff": "cutoff", "tau_max": "tau_max", "tau_points": "tau_points"},
}
_LAB_KEYS = ("density", "scattering_length", "atomic_mass", "q")
_INT_FIELDS = {f.name for f in dataclasses.fields(RunConfig) if f.type == "int"}


def to_ini(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    physics = {}
    if cfg.preset:
        physics["preset"] = cfg.preset
    for key, attr in _PHYSICS_KEYS.items():
        physics[key] = repr(float(getattr(cfg.params, attr)))
    parser["physics"] = physics
    parser["probe"] = {"state": str(cfg.probe)}
    for section, keys in _SECTIONS.items():
        parser[section] = {key: repr(getattr(cfg, attr)) for key, attr in keys.items()}
    parser["output"] = {"path": cfg.output} if cfg.output else {}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _number(section, key, text, as_int=False):
    try:
        return int(text) if as_int else float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {text!r}") from None


def from_ini(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    allowed = {"physics", "probe", "output", *_SECTIONS}
    unknown = set(parser.sections()) - allowed
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    physics = dict(parser["physics"]) if parser.has_section("physics") else {}
    bad = set(physics) - {"preset", "chem_potential_hz", *_PHYSICS_KEYS, *_LAB_KEYS}
    if bad:
        raise ConfigError(f"unknown keys in [physics]: {sorted(bad)}")

    name = physics.pop("preset", None)
    cfg = preset(name) if name else default_config()
    if not name and physics:
        cfg = replace(cfg, preset=None, params=_physics_from(physics, cfg.params))
    elif not name:
        cfg = replace(cfg, preset=None)

    updates = {}
    if parser.has_section("probe"):
        probe = dict(parser["probe"])
        if set(probe) - {"state"}:
            raise ConfigError(f"unknown keys in [probe]: {sorted(set(probe) - {'state'})}")
        if "state" in probe and not name:
            try:
                updates["probe"] = ProbeState.parse(probe["state"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    for section, keys in _SECTIONS.items():
        if not parser.has_section(section):
            continue
        for key, value in parser[section].items():
            if key not in keys:
                raise ConfigError(f"unknown key in [{section}]: {key}")
            attr = keys[key]
            updates[attr] = _number(section, key, value, attr in _INT_FIELDS)
    if parser.has_section("output"):
        out = dict(parser["output"])
        if set(out) - {"path"}:
            raise ConfigError(f"unknown keys in [output]: {sorted(set(out) - {'path'})}")
        updates["output"] = out.get("path") or None
    try:
        return replace(cfg, **updates)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _physics_from(physics: dict, base: CondensateParams) -> CondensateParams:
    vals = {k: _number("physics", k, v) for k, v in physics.items()}
    try:
        if any(k in vals for k in _LAB_KEYS):
            missing = [k for k in _LAB_KEYS if k not in vals]
            if missing:
                raise ConfigError(f"lab-parameter path needs {missing}")
            return CondensateParams.from_lab(
                vals.get("atom_count", base.atom_count),
                vals["density"], vals["scattering_length"], vals["atomic_mass"], vals["q"],
                vals.get("rabi", base.rabi),
            )
        if "chem_potential_hz" in vals:
            vals["chem_potential_rad_s"] = TWO_PI * vals.pop("chem_potential_hz")
        kwargs = {attr: vals.get(key, getattr(base, attr)) for key, attr in _PHYSICS_KEYS.items()}
        return CondensateParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return from_ini(fh.read())
