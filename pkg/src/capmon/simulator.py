"""Synthetic single-submodule waveforms with known capacitor parameters.

The submodule sees an arm current made of a DC part, a fundamental and an
optional second harmonic (the operating profile of a mission-profile
emulator), is switched by carrier PWM, and its capacitor voltage is
integrated with the same discrete model the estimator inverts.  Ground truth
is therefore exactly representable; model mismatch is studied by adding
measurement noise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import ConfigError
from .signals import CapacitorParams, SamplingWindow

#: Capacitor of the simulated MMC (2.2 mF, 40 mOhm).
TABLE_I_C = 2.2e-3
TABLE_I_ESR = 40e-3

#: Experimental test scenarios: (submodule DC voltage [V], AC current magnitude [A]).
EXPERIMENT_SCENARIOS = {
    1: (50.0, 9.0),
    2: (50.0, 6.0),
    3: (50.0, 3.0),
    4: (30.0, 9.0),
    5: (30.0, 6.0),
    6: (30.0, 3.0),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Operating point, sampling setup and noise of a synthetic window.

    The defaults are the simulated capacitor (2.2 mF, 40 mOhm, 3 kHz
    switching, 100 kHz sampling, 10 ms window) driven at the 30 V / 9 A
    emulator operating point.  ``t0`` places the half-cycle window on the
    fundamental: the default 15 ms starts at the negative current peak, so
    the window spans a current zero crossing and the capacitor both
    discharges and charges.
    """

    c: float = TABLE_I_C
    esr: float = TABLE_I_ESR
    v_sm_dc: float = 30.0
    i_dc: float = 0.0
    i_ac_mag: float = 9.0
    f_grid: float = 50.0
    i_2h_mag: float = 0.0
    f_sw: float = 3e3
    duty: float = 0.5
    f_sa: float = 100e3
    window_len: float = 10e-3
    t0: float = 15e-3
    noise_sigma_v: float = 0.0
    noise_sigma_i: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "seed":
                if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                    raise ConfigError("seed must be an integer", {"seed": value})
            elif not math.isfinite(value):
                raise ConfigError(f"{f.name} must be finite", {f.name: value})
        if not (self.c > 0 and self.esr >= 0):
            raise ConfigError("need c > 0 and esr >= 0", {"c": self.c, "esr": self.esr})
        if not (self.f_sa > 0 and self.f_sw > 0 and self.f_grid >= 0):
            raise ConfigError("frequencies must be positive")
        if self.f_sa < 10 * self.f_sw:
            raise ConfigError(
                "sample rate must be at least 10x the switching frequency",
                {"f_sa": self.f_sa, "f_sw": self.f_sw},
            )
        if self.window_len * self.f_sa < 2:
            raise ConfigError("window must hold at least 2 samples")
        if not 0.0 <= self.duty <= 1.0:
            raise ConfigError("duty must lie in [0, 1]", {"duty": self.duty})
        if self.noise_sigma_v < 0 or self.noise_sigma_i < 0:
            raise ConfigError("noise sigmas must be non-negative")

    @property
    def truth(self):
        return CapacitorParams(self.c, self.esr)

    @property
    def ts(self):
        return 1.0 / self.f_sa

    @property
    def n_samples(self):
        return int(round(self.window_len * self.f_sa))

    @property
    def t(self):
        return self.t0 + self.ts * np.arange(self.n_samples)

    def with_truth(self, c, esr):
        return replace(self, c=c, esr=esr)

    def to_dict(self):
        return asdict(self)


def experiment_scenario(number, **overrides):
    """Scenario at one of the six experimental operating points.

    Uses the emulator's capacitor (2.26 mF, 44.12 mOhm) and 1 kHz switching.
    """
    v_dc, i_ac = EXPERIMENT_SCENARIOS[number]
    base = dict(c=2.26e-3, esr=44.12e-3, f_sw=1e3, v_sm_dc=v_dc, i_ac_mag=i_ac)
    base.update(overrides)
    return ScenarioConfig(**base)


def synthesize_arm_current(cfg):
    t = cfg.t
    w = 2.0 * math.pi * cfg.f_grid
    return cfg.i_dc + cfg.i_ac_mag * np.sin(w * t) + cfg.i_2h_mag * np.sin(2.0 * w * t)


def synthesize_switching(cfg):
    """Carrier-comparison PWM: on while a unit sawtooth at f_sw is below ``duty``.

    The carrier restarts at the first sample of the window.
    """
    k = np.arange(cfg.n_samples)
    phase = np.mod(k * (cfg.f_sw / cfg.f_sa), 1.0)
    return (phase < cfg.duty).astype(np.int8)


def integrate_true_voltage(cfg, i_arm, v_sw):
    """Forward-integrate the capacitor voltage with the true C and ESR.

    Plain sample-by-sample recursion starting from ``v_sm_dc``; kept
    deliberately separate from the vectorised predictor so each can check
    the other.
    """
    if len(i_arm) != len(v_sw):
        raise ValueError("i_arm and v_sw lengths differ")
    i_c = [float(i) * float(s) for i, s in zip(i_arm, v_sw)]
    ts, c, esr = cfg.ts, cfg.c, cfg.esr
    v = [float(cfg.v_sm_dc)]
    for k in range(1, len(i_c)):
        v.append(v[-1] + i_c[k] * ts / c + esr * (i_c[k] - i_c[k - 1]))
    return np.array(v)


def generate_window(cfg, window_id="sim"):
    """Build a noisy measurement window and return it with the ground truth.

    Voltage noise is drawn before current noise from one generator seeded by
    ``cfg.seed``; both draws happen even when a sigma is zero so the stream
    layout never depends on the noise settings.
    """
    i_arm = synthesize_arm_current(cfg)
    v_sw = synthesize_switching(cfg)
    v_true = integrate_true_voltage(cfg, i_arm, v_sw)

    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_samples
    noise_v = rng.normal(0.0, 1.0, n) * cfg.noise_sigma_v
    noise_i = rng.normal(0.0, 1.0, n) * cfg.noise_sigma_i

    window = SamplingWindow(
        t0=cfg.t0,
        ts=cfg.ts,
        v_sm=v_true + noise_v,
        v_sw=v_sw,
        i_arm=i_arm + noise_i,
        window_id=window_id,
    )
    return window, cfg.truth
