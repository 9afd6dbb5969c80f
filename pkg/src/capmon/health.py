"""End-of-life assessment from estimated capacitance and ESR.

A capacitor is at end of life once either indicator crosses its limit:
capacitance down to 80 % of its initial value, or ESR up to 200 %.
Both limits are inclusive.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

C_EOL_PU = 0.8
ESR_EOL_PU = 2.0

HEALTHY = "healthy"
EOL_CAPACITANCE = "eol_capacitance"
EOL_ESR = "eol_esr"
EOL_BOTH = "eol_both"


@dataclass(frozen=True)
class HealthStatus:
    c_pu: float
    esr_pu: float
    c_eol: bool
    esr_eol: bool
    verdict: str

    def to_dict(self):
        return asdict(self)


def assess_values(c, esr, ref):
    c_pu = c / ref.c0
    esr_pu = esr / ref.esr0
    c_eol = c_pu <= C_EOL_PU
    esr_eol = esr_pu >= ESR_EOL_PU
    if c_eol and esr_eol:
        verdict = EOL_BOTH
    elif c_eol:
        verdict = EOL_CAPACITANCE
    elif esr_eol:
        verdict = EOL_ESR
    else:
        verdict = HEALTHY
    return HealthStatus(c_pu, esr_pu, bool(c_eol), bool(esr_eol), verdict)


def assess(report, ref):
    """Health verdict from the medians of an estimation report."""
    return assess_values(report.c_median, report.esr_median, ref)
