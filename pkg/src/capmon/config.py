"""Flat key/value config files (JSON or TOML) with SI units in the key names."""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .errors import ConfigError
from .estimator import PsoConfig
from .simulator import ScenarioConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# file key -> (field, description with unit)
SCENARIO_KEYS = {
    "c_farads": ("c", "true capacitance [F]"),
    "esr_ohms": ("esr", "true ESR [ohm]"),
    "v_sm_dc_volts": ("v_sm_dc", "submodule DC voltage, first sample [V]"),
    "i_dc_amps": ("i_dc", "DC arm-current component [A]"),
    "i_ac_mag_amps": ("i_ac_mag", "fundamental arm-current amplitude [A]"),
    "f_grid_hz": ("f_grid", "fundamental frequency [Hz]"),
    "i_2h_mag_amps": ("i_2h_mag", "second-harmonic amplitude [A]"),
    "f_sw_hz": ("f_sw", "submodule switching frequency [Hz]"),
    "duty": ("duty", "PWM duty cycle [fraction 0..1]"),
    "f_sa_hz": ("f_sa", "sample rate [Hz]"),
    "window_len_s": ("window_len", "window length [s]"),
    "t0_s": ("t0", "window start time on the fundamental [s]"),
    "noise_sigma_v_volts": ("noise_sigma_v", "voltage noise std dev [V]"),
    "noise_sigma_i_amps": ("noise_sigma_i", "current noise std dev [A]"),
    "seed": ("seed", "noise seed [integer]"),
}

PSO_KEYS = {
    "swarm_size": ("swarm_size", "particles per swarm [count]"),
    "c1": ("c1", "cognitive weight [-]"),
    "c2": ("c2", "social weight [-]"),
    "w_start": ("w_start", "initial inertia weight [-]"),
    "w_end": ("w_end", "final inertia weight [-]"),
    "max_iter": ("max_iter", "maximum iterations per run [count]"),
    "error_limit": ("error_limit", "stop once best normalised MSE <= this [-]"),
    "c_min_farads": ("c_min", "lower capacitance bound [F]"),
    "c_max_farads": ("c_max", "upper capacitance bound [F]"),
    "esr_min_ohms": ("esr_min", "lower ESR bound [ohm]"),
    "esr_max_ohms": ("esr_max", "upper ESR bound [ohm]"),
    "repeats": ("repeats", "independent runs whose median is reported [count]"),
    "seed": ("seed", "base seed of the repeats [integer]"),
    "v_max_frac": ("v_max_frac", "velocity cap as fraction of bound width [-]"),
}

INT_FIELDS = {"seed", "swarm_size", "max_iter", "repeats"}


def load_mapping(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", {"path": str(path)}) from None
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}", {"path": str(path)}) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a flat key/value mapping", {"path": str(path)})
    return data


def _convert(data, keys):
    unknown = sorted(set(data) - set(keys))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}", {"unknown": unknown})
    out = {}
    for key, value in data.items():
        name = keys[key][0]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number", {key: value})
        if name in INT_FIELDS:
            if float(value) != int(value):
                raise ConfigError(f"{key} must be an integer", {key: value})
            value = int(value)
        else:
            value = float(value)
        out[name] = value
    return out


def scenario_from_mapping(data):
    return ScenarioConfig(**_convert(data, SCENARIO_KEYS))


def pso_from_mapping(data):
    kw = _convert(data, PSO_KEYS)
    base = PsoConfig()
    c = (kw.pop("c_min", base.bounds_c[0]), kw.pop("c_max", base.bounds_c[1]))
    esr = (kw.pop("esr_min", base.bounds_esr[0]), kw.pop("esr_max", base.bounds_esr[1]))
    return PsoConfig(bounds_c=c, bounds_esr=esr, **kw)


def load_scenario(path):
    return scenario_from_mapping(load_mapping(path))


def load_pso(path):
    return pso_from_mapping(load_mapping(path))


def describe(keys):
    width = max(len(k) for k in keys)
    return "\n".join(f"  {k.ljust(width)}  {desc}" for k, (_, desc) in keys.items())
