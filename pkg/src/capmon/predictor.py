"""Capacitor-voltage prediction and the normalised mean-square-error cost."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindow, NonPositiveCapacitance
from .signals import validate_window


@dataclass(frozen=True)
class PredictionResult:
    v_hat: np.ndarray
    v_err: float
    v_m: float
    inst_err: np.ndarray


class _Terms:
    """Per-window quantities that do not depend on the candidate parameters.

    The recursion v[k] = v[k-1] + i_c[k] ts / C + R (i_c[k] - i_c[k-1]) with
    v[0] anchored to the measurement telescopes to

        v[k] = v_sm[0] + (ts / C) * sum_{j=1..k} i_c[j] + R * (i_c[k] - i_c[0])

    so a candidate only scales two fixed series.
    """

    def __init__(self, window):
        validate_window(window).raise_if_invalid()
        i_c = window.i_arm * window.v_sw
        charge = np.empty_like(i_c)
        charge[0] = 0.0
        np.cumsum(i_c[1:], out=charge[1:])
        self.charge = charge * window.ts
        self.step = i_c - i_c[0]
        self.v_sm = window.v_sm
        self.v0 = window.v_sm[0]
        self.v_m = float(np.max(window.v_sm))
        if not self.v_m > 0:
            raise DegenerateWindow("maximum measured voltage must be positive")
        self.norm = 1.0 / (self.v_m**2 * len(i_c))

    def predict(self, c, esr):
        c = np.asarray(c, dtype=float)
        esr = np.asarray(esr, dtype=float)
        if np.any(~(c > 0)):
            raise NonPositiveCapacitance("capacitance must be positive", {"c": c.tolist()})
        # broadcast candidates along a leading axis
        return (
            self.v0
            + self.charge / c[..., None]
            + esr[..., None] * self.step
        )

    def cost(self, c, esr):
        resid = self.v_sm - self.predict(c, esr)
        return np.einsum("...k,...k->...", resid, resid) * self.norm


def predict_voltage(window, params):
    """Predicted submodule voltage for candidate ``params``, anchored at v_sm[0]."""
    if not params.c > 0:
        raise NonPositiveCapacitance("capacitance must be positive", {"c": params.c})
    return _Terms(window).predict(params.c, params.esr)


def cost(window, params):
    """Squared prediction error summed over the window, over (V_m^2 * N)."""
    if not params.c > 0:
        raise NonPositiveCapacitance("capacitance must be positive", {"c": params.c})
    return float(_Terms(window).cost(params.c, params.esr))


def predict(window, params):
    """Prediction plus cost and instantaneous error in one pass."""
    terms = _Terms(window)
    v_hat = terms.predict(params.c, params.esr)
    inst_err = window.v_sm - v_hat
    v_err = float(inst_err @ inst_err) * terms.norm
    return PredictionResult(v_hat=v_hat, v_err=v_err, v_m=terms.v_m, inst_err=inst_err)


def batch_cost(window):
    """Return ``f(c, esr) -> costs`` for arrays of candidates on one window.

    Window validation and the parameter-independent series are computed once.
    """
    return _Terms(window).cost
