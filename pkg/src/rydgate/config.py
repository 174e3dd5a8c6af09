"""Flat key = value experiment configuration with explicit unit suffixes.

Unit bugs are the dominant risk in this kind of tool, so every physical key
carries its unit in the name (``omega0_over_2pi_mhz``, ``lifetime_us``,
``temperature_uk``) and unknown keys are rejected outright. Values are
numbers, comma-separated lists of numbers, or bare words; ``#`` starts a
comment.
"""

import math
from dataclasses import dataclass, field

from .budget import SystemConfig
from .pulses import Family, PulseShape

MODES = ("simulate", "optimize", "sweep", "budget")

# key -> (target, converter); "system" keys build the SystemConfig.
_SYSTEM_KEYS = {
    "omega0_over_2pi_mhz": ("rabi_over_2pi", 1e6),
    "trap_x_over_2pi_khz": ("trap_x_over_2pi", 1e3),
    "trap_y_over_2pi_khz": ("trap_y_over_2pi", 1e3),
    "trap_z_over_2pi_khz": ("trap_z_over_2pi", 1e3),
    "rydberg_lifetime_us": ("rydberg_lifetime", 1e-6),
    "wavelength_nm": ("wavelength", 1e-9),
    "c6_over_h_ghz_um6": ("c6_over_h", 1e9 * 1e-36),
    "distance_um": ("distance", 1e-6),
    "mass_kg": ("mass", 1.0),
}

_PULSE_KEYS = {
    "pulse_family": str,
    "pulse_tau": float,
    "pulse_delta0": float,
    "pulse_amp": float,
    "pulse_width": float,
    "pulse_height": float,
    "pulse_base": float,
    "pulse_kappa": float,
    "pulse_jump_time": float,
    "pulse_jump_theta": float,
    "pulse_amplitudes": list,
    "pulse_frequencies": list,
    "pulse_omega_scale": float,
}

_RUN_KEYS = {
    "mode": str,
    "v_over_omega0": float,
    "objective": str,
    "feasibility_threshold": float,
    "family": str,
    "kappa": float,
    "width": float,
    "tau": float,
    "tau_min": float,
    "tau_max": float,
    "sweep_variable": str,
    "sweep_grid": list,
    "temperatures_uk": list,
    "figure": str,
    "fock_dim": int,
    "fock_dim_x": int,
    "tolerance": float,
    "seed": int,
    "dcrab_superiterations": int,
    "dcrab_components": int,
    "label": str,
}

_ALL_KEYS = set(_SYSTEM_KEYS) | set(_PULSE_KEYS) | set(_RUN_KEYS)


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    """Parsed and validated experiment configuration."""

    mode: str
    raw: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def system(self) -> SystemConfig:
        kwargs = {}
        for key, (target, scale) in _SYSTEM_KEYS.items():
            if key in self.raw:
                kwargs[target] = self.raw[key] * scale
        try:
            return SystemConfig(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def v_over_omega0(self) -> float:
        if "v_over_omega0" in self.raw:
            return float(self.raw["v_over_omega0"])
        return self.system().v_over_omega0

    def pulse(self) -> PulseShape:
        if "pulse_family" not in self.raw:
            raise ConfigError("pulse_family is required for this mode")
        family = _parse_family(self.raw["pulse_family"])
        kw = {"family": family, "tau": self.raw.get("pulse_tau")}
        if kw["tau"] is None:
            raise ConfigError("pulse_tau is required")
        for src, dst in (("pulse_delta0", "delta0"), ("pulse_amp", "amp"),
                         ("pulse_width", "width"), ("pulse_height", "height"),
                         ("pulse_base", "base"), ("pulse_kappa", "kappa"),
                         ("pulse_omega_scale", "omega_scale")):
            if src in self.raw:
                kw[dst] = self.raw[src]
        if family is Family.DELTA_JUMP:
            t_j = self.raw.get("pulse_jump_time", kw["tau"] / 2.0)
            theta = self.raw.get("pulse_jump_theta")
            if theta is not None:
                kw["jump_points"] = ((t_j, theta),)
        if family is Family.DCRAB:
            kw["amplitudes"] = tuple(self.raw.get("pulse_amplitudes", ()))
            kw["frequencies"] = tuple(self.raw.get("pulse_frequencies", ()))
        try:
            return PulseShape(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid pulse: {exc}") from exc

    def temperatures(self) -> tuple:
        uk = self.raw.get("temperatures_uk", [0.0])
        if not isinstance(uk, list):
            uk = [uk]
        return tuple(float(t) * 1e-6 for t in uk)

    def resolved_items(self):
        """All key/value pairs in a stable order, for output headers."""
        return sorted(self.raw.items())


def _parse_family(name: str) -> Family:
    try:
        return Family(name.strip().lower())
    except ValueError as exc:
        valid = ", ".join(f.value for f in Family)
        raise ConfigError(f"unknown pulse family {name!r}; expected one of {valid}") \
            from exc


def _parse_value(text: str):
    text = text.strip()
    if "," in text:
        return [_parse_scalar(t) for t in text.split(",") if t.strip()]
    return _parse_scalar(text)


def _parse_scalar(text: str):
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        return text  # bare word (mode names, families, ...)
    if math.isfinite(value) and value == int(value) and "e" not in text.lower() \
            and "." not in text:
        return int(value)
    return value


def parse_config(text: str, overrides=()) -> ExperimentConfig:
    """Parse a config document plus ``key=value`` override strings; rejects
    unknown keys, repeated keys and a missing or invalid mode."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = _parse_value(value)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"override: unknown key {key!r}")
        raw[key] = _parse_value(value)

    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    cfg = ExperimentConfig(mode=mode, raw=raw)
    if mode in ("sweep",) and "sweep_variable" not in raw:
        raise ConfigError("sweep mode requires sweep_variable")
    if mode == "sweep" and not raw.get("sweep_grid"):
        raise ConfigError("sweep mode requires a non-empty sweep_grid")
    if mode in ("optimize", "sweep") and "seed" not in raw:
        raise ConfigError(f"{mode} mode uses randomness and requires a seed")
    return cfg


def format_config(cfg: ExperimentConfig) -> str:
    """Render the resolved configuration back to the flat text format; the
    result re-parses to an equivalent configuration."""
    lines = []
    for key, value in cfg.resolved_items():
        if isinstance(value, list):
            value = ", ".join(repr(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines)
