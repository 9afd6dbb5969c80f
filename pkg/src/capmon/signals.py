"""Sampling-window and capacitor-parameter types, validation and CSV I/O.

A window holds three uniformly sampled series for one submodule: the
measured submodule voltage, the binary switching state (1 = capacitor
inserted, 0 = bypassed) and the arm current.  All values are SI units.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidWindow

CSV_HEADER = ("t", "v_sm", "v_sw", "i_arm")
#: Allowed deviation of each time step from the nominal sample period.
TIME_STEP_TOL = 1e-6

NO_TRANSITIONS = "no switching transitions; ESR unobservable"


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _as_switching(values):
    arr = np.asarray(values)
    # keep non-binary input as float so validation can report it
    if arr.size and np.all(np.isfinite(arr)) and np.all((arr == 0) | (arr == 1)):
        return _frozen(arr, np.int8)
    return _frozen(arr, float)


@dataclass(frozen=True, eq=False)
class SamplingWindow:
    """Time-aligned submodule voltage, switching state and arm current.

    Construction never fails on bad data; call :func:`validate_window` (or any
    downstream operation, which does so implicitly) to check the invariants.
    """

    t0: float
    ts: float
    v_sm: np.ndarray
    v_sw: np.ndarray
    i_arm: np.ndarray
    window_id: str = field(default="window", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "ts", float(self.ts))
        object.__setattr__(self, "v_sm", _frozen(self.v_sm))
        object.__setattr__(self, "v_sw", _as_switching(self.v_sw))
        object.__setattr__(self, "i_arm", _frozen(self.i_arm))

    def __len__(self):
        return len(self.v_sm)

    @property
    def t(self):
        return self.t0 + self.ts * np.arange(len(self.v_sm))

    @property
    def v_max(self):
        """Largest measured submodule voltage in the window."""
        return float(np.max(self.v_sm))

    @property
    def n_transitions(self):
        return int(np.count_nonzero(np.diff(self.v_sw)))

    def equals(self, other):
        """Exact (bitwise) equality of all samples and timing."""
        return (
            self.t0 == other.t0
            and self.ts == other.ts
            and np.array_equal(self.v_sm, other.v_sm)
            and np.array_equal(self.v_sw, other.v_sw)
            and np.array_equal(self.i_arm, other.i_arm)
        )


@dataclass(frozen=True)
class CapacitorParams:
    """Capacitance (F) and equivalent series resistance (ohm)."""

    c: float
    esr: float

    def __post_init__(self):
        if not (self.c > 0):
            raise ValueError(f"capacitance must be positive, got {self.c!r}")
        if not (self.esr >= 0):
            raise ValueError(f"ESR must be non-negative, got {self.esr!r}")

    def per_unit(self, ref):
        return self.c / ref.c0, self.esr / ref.esr0


@dataclass(frozen=True)
class ReferenceParams:
    """Initial (datasheet) capacitance and ESR used for per-unit scaling."""

    c0: float
    esr0: float

    def __post_init__(self):
        if not (self.c0 > 0 and self.esr0 > 0):
            raise ValueError("reference capacitance and ESR must be positive")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple = ()
    warnings: tuple = ()

    @property
    def ok(self):
        return not self.violations

    @property
    def esr_observable(self):
        return NO_TRANSITIONS not in self.warnings

    def raise_if_invalid(self):
        if self.violations:
            raise InvalidWindow(self.violations)


def validate_window(window):
    """Check a window against the signal requirements.

    Returns a :class:`ValidationResult`; never raises.  A window without any
    switching transition is valid but carries the ``NO_TRANSITIONS`` warning,
    since the ESR term of the prediction then never sees a current step.
    """
    violations = []
    lengths = {len(window.v_sm), len(window.v_sw), len(window.i_arm)}
    if len(lengths) != 1:
        violations.append(Violation("length_mismatch", "series lengths differ"))
    if min(lengths) < 2:
        violations.append(Violation("too_short", "window needs at least 2 samples"))
    if not (np.isfinite(window.ts) and window.ts > 0):
        violations.append(Violation("non_positive_ts", "sample period must be positive"))
    if not np.isfinite(window.t0):
        violations.append(Violation("non_finite", "non-finite start time"))

    finite = all(np.all(np.isfinite(s)) for s in (window.v_sm, window.v_sw, window.i_arm))
    if not finite:
        violations.append(Violation("non_finite", "non-finite sample (NaN or Inf)"))
    if window.v_sw.size and not np.all((window.v_sw == 0) | (window.v_sw == 1)):
        violations.append(Violation("non_binary_switching", "non-binary switching state"))
    if finite and window.v_sm.size and not (np.max(window.v_sm) > 0):
        violations.append(
            Violation("non_positive_vmax", "maximum submodule voltage must be positive")
        )

    warnings = ()
    if not violations and window.n_transitions == 0:
        warnings = (NO_TRANSITIONS,)
    return ValidationResult(tuple(violations), warnings)


def capacitor_current(window):
    """Capacitor current: arm current gated by the switching state."""
    validate_window(window).raise_if_invalid()
    return window.i_arm * window.v_sw


def read_window_csv(path, window_id=None):
    """Load a window from the ``t,v_sm,v_sw,i_arm`` CSV format.

    The time column must increase with a constant step; each step may deviate
    from the mean step by at most ``TIME_STEP_TOL`` relative.  Structural
    problems raise :class:`InvalidWindow`; sample-level problems (non-binary
    switching, NaN) are left for :func:`validate_window`.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidWindow([Violation("bad_csv", f"{path}: empty file")]) from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise InvalidWindow(
                [Violation("bad_csv", f"{path}: header must be {','.join(CSV_HEADER)}")]
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise InvalidWindow(
                    [Violation("bad_csv", f"{path}:{lineno}: expected 4 columns")]
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise InvalidWindow(
                    [Violation("bad_csv", f"{path}:{lineno}: non-numeric field")]
                ) from None

    if len(rows) < 2:
        raise InvalidWindow([Violation("too_short", "window needs at least 2 samples")])
    data = np.array(rows)
    t = data[:, 0]
    steps = np.diff(t)
    ts = (t[-1] - t[0]) / (len(t) - 1)
    if not (ts > 0) or np.any(np.abs(steps - ts) > TIME_STEP_TOL * ts):
        raise InvalidWindow(
            [Violation("non_uniform_time", f"{path}: time column is not uniformly increasing")]
        )
    return SamplingWindow(
        t0=t[0],
        ts=ts,
        v_sm=data[:, 1],
        v_sw=data[:, 2],
        i_arm=data[:, 3],
        window_id=window_id or path.stem,
    )


def _fmt(x):
    return repr(float(x))


def window_to_csv(window):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t, v, s, i in zip(window.t, window.v_sm, window.v_sw, window.i_arm):
        writer.writerow((_fmt(t), _fmt(v), int(s) if float(s).is_integer() else _fmt(s), _fmt(i)))
    return buf.getvalue()
