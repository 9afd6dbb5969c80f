"""Distribution summaries for repeated estimates.

Quartiles use linear interpolation between order statistics (numpy's
default, "type 7"): the p-quantile of sorted ``x[0..n-1]`` sits at
fractional index ``p * (n - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput

WHISKER_REACH = 1.5


@dataclass(frozen=True)
class BoxplotStats:
    median: float
    q1: float
    q3: float
    iqr_pct: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple

    @property
    def iqr(self):
        return self.q3 - self.q1


def boxplot_stats(values, reference):
    """Median, quartiles, whiskers and outliers of ``values``.

    Whiskers sit 1.5 IQR beyond the quartiles, clipped to the data range;
    outliers are the values strictly outside the whiskers.  ``iqr_pct`` is
    the IQR as a percentage of ``reference``.
    """
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.size == 0:
        raise EmptyInput("boxplot_stats needs at least one value")
    if not reference > 0:
        raise ValueError("reference must be positive")
    q1, median, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    lo = max(q1 - WHISKER_REACH * iqr, float(x.min()))
    hi = min(q3 + WHISKER_REACH * iqr, float(x.max()))
    outliers = tuple(float(v) for v in np.sort(x[(x < lo) | (x > hi)]))
    return BoxplotStats(
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        iqr_pct=float(100.0 * iqr / reference),
        whisker_lo=float(lo),
        whisker_hi=float(hi),
        outliers=outliers,
    )
