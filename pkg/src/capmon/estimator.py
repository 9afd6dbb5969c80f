"""Particle swarm estimation of capacitance and ESR.

Each particle is a candidate (C, ESR).  The swarm minimises the normalised
voltage-prediction error of a window; a run stops as soon as the best cost
reaches ``error_limit`` or after ``max_iter`` iterations.  ``estimate``
repeats independent runs and reports the medians.

Positions are kept in unit-box coordinates, ``(x - lo) / (hi - lo)`` per
axis, so one velocity scale serves both axes although C and ESR differ by
orders of magnitude.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .errors import ConfigError, UnobservableEsrWarning
from .predictor import batch_cost
from .signals import CapacitorParams, NO_TRANSITIONS, SamplingWindow, validate_window
from .stats import boxplot_stats

SCHEMA_VERSION = 1

ERROR_LIMIT = "error_limit"
MAX_ITER = "max_iter"


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters; defaults are the published tuning.

    Bounds are ``(min, max)`` in farads and ohms.  ``v_max_frac`` caps each
    velocity component at that fraction of the bound width.
    """

    swarm_size: int = 10
    c1: float = 1.49
    c2: float = 1.49
    w_start: float = 0.9
    w_end: float = 0.4
    max_iter: int = 100
    error_limit: float = 1e-6
    bounds_c: tuple = (1.1e-3, 6.6e-3)
    bounds_esr: tuple = (20e-3, 120e-3)
    repeats: int = 15
    seed: int = 0
    v_max_frac: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "bounds_c", tuple(float(b) for b in self.bounds_c))
        object.__setattr__(self, "bounds_esr", tuple(float(b) for b in self.bounds_esr))
        for name in ("swarm_size", "max_iter", "repeats", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer", {name: value})
        if self.swarm_size < 2:
            raise ConfigError("swarm_size must be at least 2")
        if self.max_iter < 1 or self.repeats < 1:
            raise ConfigError("max_iter and repeats must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("bounds_c", "bounds_esr"):
            lo, hi = getattr(self, name)
            if not (0 < lo < hi and math.isfinite(hi)):
                raise ConfigError(f"{name} must be a proper interval with a positive lower end")
        if not (self.w_start >= self.w_end >= 0):
            raise ConfigError("need w_start >= w_end >= 0")
        if not (self.c1 >= 0 and self.c2 >= 0):
            raise ConfigError("c1 and c2 must be non-negative")
        if not self.v_max_frac > 0:
            raise ConfigError("v_max_frac must be positive")
        if math.isnan(self.error_limit):
            raise ConfigError("error_limit must not be NaN")

    @property
    def lower(self):
        return np.array([self.bounds_c[0], self.bounds_esr[0]])

    @property
    def width(self):
        return np.array(
            [self.bounds_c[1] - self.bounds_c[0], self.bounds_esr[1] - self.bounds_esr[0]]
        )

    def inertia(self, iter_index):
        """Inertia weight, decaying linearly from w_start to w_end."""
        if self.max_iter == 1:
            return self.w_start
        frac = iter_index / (self.max_iter - 1)
        return self.w_start + (self.w_end - self.w_start) * frac

    def to_dict(self):
        d = asdict(self)
        d["bounds_c"] = list(self.bounds_c)
        d["bounds_esr"] = list(self.bounds_esr)
        return d


@dataclass(frozen=True)
class Particle:
    x: CapacitorParams
    v: tuple
    best_x: CapacitorParams
    best_cost: float


@dataclass(frozen=True)
class Swarm:
    """Synchronous swarm state in unit-box coordinates.

    ``x``, ``v`` and ``best_x`` are ``(swarm_size, 2)`` arrays with columns
    (C, ESR).  ``rng`` is the run's generator; draws are taken in particle
    order.
    """

    x: np.ndarray
    v: np.ndarray
    cost: np.ndarray
    best_x: np.ndarray
    best_cost: np.ndarray
    g_index: int
    rng: np.random.Generator = field(repr=False)

    @property
    def g_x(self):
        return self.best_x[self.g_index]

    @property
    def g_cost(self):
        return float(self.best_cost[self.g_index])

    def particles(self, config):
        lo, width = config.lower, config.width
        out = []
        for x, v, bx, bc in zip(self.x, self.v, self.best_x, self.best_cost):
            px, pb = lo + x * width, lo + bx * width
            out.append(
                Particle(
                    x=CapacitorParams(*px),
                    v=tuple(v * width),
                    best_x=CapacitorParams(*pb),
                    best_cost=float(bc),
                )
            )
        return out


@dataclass(frozen=True)
class RunTrace:
    iterations: int
    global_best: CapacitorParams
    global_best_cost: float
    cost_history: tuple
    terminated_by: str
    seed: int

    def to_dict(self):
        return {
            "seed": self.seed,
            "iterations": self.iterations,
            "c": self.global_best.c,
            "esr": self.global_best.esr,
            "cost": self.global_best_cost,
            "terminated_by": self.terminated_by,
            "cost_history": list(self.cost_history),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            iterations=int(d["iterations"]),
            global_best=CapacitorParams(d["c"], d["esr"]),
            global_best_cost=float(d["cost"]),
            cost_history=tuple(d["cost_history"]),
            terminated_by=d["terminated_by"],
            seed=int(d["seed"]),
        )


@dataclass(frozen=True)
class EstimationReport:
    """Per-repeat results of :func:`estimate` and their medians.

    IQRs are percent of ``reference`` (the known initial values when given,
    otherwise the medians themselves).
    """

    per_repeat: tuple
    c_median: float
    esr_median: float
    c_iqr: float
    esr_iqr: float
    window_id: str
    reference: CapacitorParams
    config: PsoConfig
    esr_observable: bool = True

    @property
    def median(self):
        return CapacitorParams(self.c_median, self.esr_median)

    @property
    def c_values(self):
        return np.array([r.global_best.c for r in self.per_repeat])

    @property
    def esr_values(self):
        return np.array([r.global_best.esr for r in self.per_repeat])

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "window_id": self.window_id,
            "c_median": self.c_median,
            "esr_median": self.esr_median,
            "c_iqr_pct": self.c_iqr,
            "esr_iqr_pct": self.esr_iqr,
            "iqr_reference": {"c": self.reference.c, "esr": self.reference.esr},
            "esr_observable": self.esr_observable,
            "config": self.config.to_dict(),
            "repeats": [dict(index=i, **r.to_dict()) for i, r in enumerate(self.per_repeat)],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d):
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report schema_version {version!r}")
        cfg = dict(d["config"])
        return cls(
            per_repeat=tuple(RunTrace.from_dict(r) for r in d["repeats"]),
            c_median=float(d["c_median"]),
            esr_median=float(d["esr_median"]),
            c_iqr=float(d["c_iqr_pct"]),
            esr_iqr=float(d["esr_iqr_pct"]),
            window_id=d["window_id"],
            reference=CapacitorParams(d["iqr_reference"]["c"], d["iqr_reference"]["esr"]),
            config=PsoConfig(**cfg),
            esr_observable=bool(d.get("esr_observable", True)),
        )


def child_seed(seed, index):
    """Stable 64-bit seed for repeat ``index`` derived from ``seed``.

    Uses numpy's SeedSequence hashing of the pair, which is fixed across
    numpy releases.
    """
    lo, hi = np.random.SeedSequence([int(seed), int(index)]).generate_state(2)
    return (int(hi) << 32) | int(lo)


def _objective(target):
    if isinstance(target, SamplingWindow):
        return batch_cost(target)
    return target


def _evaluate(objective, u, config):
    phys = config.lower + u * config.width
    return np.asarray(objective(phys[:, 0], phys[:, 1]), dtype=float)


def init_swarm(target, config, rng):
    """Uniform positions inside the bounds, velocities uniform in +-(bound width)."""
    objective = _objective(target)
    n = config.swarm_size
    x = rng.random((n, 2))
    v = rng.uniform(-1.0, 1.0, (n, 2))
    cost = _evaluate(objective, x, config)
    return Swarm(
        x=x,
        v=v,
        cost=cost,
        best_x=x.copy(),
        best_cost=cost.copy(),
        g_index=int(np.argmin(cost)),
        rng=rng,
    )


def pso_step(swarm, target, iter_index, config):
    """One synchronous velocity/position update of every particle.

    ``target`` is a window or a callable ``f(c, esr) -> costs`` on arrays.
    Positions leaving the bounds are clamped and the offending velocity
    component zeroed.  Personal bests move only on strict improvement; the
    global best is the lowest personal-best cost, lowest index on ties.
    """
    objective = _objective(target)
    n = config.swarm_size
    rng = swarm.rng
    r1 = rng.random((n, 1))
    r2 = rng.random((n, 1))
    w = config.inertia(iter_index)

    v = (
        w * swarm.v
        + config.c1 * r1 * (swarm.best_x - swarm.x)
        + config.c2 * r2 * (swarm.g_x - swarm.x)
    )
    v = np.clip(v, -config.v_max_frac, config.v_max_frac)
    x = swarm.x + v
    outside = (x < 0.0) | (x > 1.0)
    x = np.clip(x, 0.0, 1.0)
    v = np.where(outside, 0.0, v)

    cost = _evaluate(objective, x, config)
    improved = cost < swarm.best_cost
    best_x = np.where(improved[:, None], x, swarm.best_x)
    best_cost = np.where(improved, cost, swarm.best_cost)
    return Swarm(
        x=x,
        v=v,
        cost=cost,
        best_x=best_x,
        best_cost=best_cost,
        g_index=int(np.argmin(best_cost)),
        rng=rng,
    )


def _run(objective, config, seed):
    rng = np.random.default_rng(seed)
    swarm = init_swarm(objective, config, rng)
    history = []
    terminated_by = MAX_ITER
    for j in range(config.max_iter):
        swarm = pso_step(swarm, objective, j, config)
        history.append(swarm.g_cost)
        if swarm.g_cost <= config.error_limit:
            terminated_by = ERROR_LIMIT
            break
    best = config.lower + swarm.g_x * config.width
    return RunTrace(
        iterations=len(history),
        global_best=CapacitorParams(float(best[0]), float(best[1])),
        global_best_cost=swarm.g_cost,
        cost_history=tuple(history),
        terminated_by=terminated_by,
        seed=int(seed),
    )


def _check_window(window):
    result = validate_window(window)
    result.raise_if_invalid()
    if not result.esr_observable:
        warnings.warn(NO_TRANSITIONS, UnobservableEsrWarning, stacklevel=3)
    return result.esr_observable


def run_once(window, config, seed=None):
    """A single PSO run on ``window``; ``seed`` defaults to ``config.seed``."""
    _check_window(window)
    return _run(batch_cost(window), config, config.seed if seed is None else seed)


def minimize(objective, config, seed=None):
    """Run the swarm on an arbitrary vectorised objective ``f(c, esr)``."""
    return _run(objective, config, config.seed if seed is None else seed)


def estimate(window, config, reference=None):
    """Repeat independent runs and aggregate their medians and IQRs.

    Repeat ``i`` is seeded with ``child_seed(config.seed, i)``.
    ``reference`` (CapacitorParams or ReferenceParams) sets the base of the
    IQR percentages.
    """
    observable = _check_window(window)
    objective = batch_cost(window)
    traces = tuple(_run(objective, config, child_seed(config.seed, i)) for i in range(config.repeats))
    c_vals = np.array([t.global_best.c for t in traces])
    esr_vals = np.array([t.global_best.esr for t in traces])
    c_med = float(np.median(c_vals))
    esr_med = float(np.median(esr_vals))
    if reference is None:
        ref = CapacitorParams(c_med, esr_med)
    elif hasattr(reference, "c0"):
        ref = CapacitorParams(reference.c0, reference.esr0)
    else:
        ref = reference
    if ref.esr <= 0:
        # all repeats found ESR = 0; fall back to the lower bound as scale
        ref = replace(ref, esr=config.bounds_esr[0])
    return EstimationReport(
        per_repeat=traces,
        c_median=c_med,
        esr_median=esr_med,
        c_iqr=boxplot_stats(c_vals, ref.c).iqr_pct,
        esr_iqr=boxplot_stats(esr_vals, ref.esr).iqr_pct,
        window_id=window.window_id,
        reference=ref,
        config=config,
        esr_observable=observable,
    )
