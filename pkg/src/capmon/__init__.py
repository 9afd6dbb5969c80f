"""Capacitance and ESR condition monitoring for converter submodule capacitors."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapmonError,
    ConfigError,
    DegenerateWindow,
    EmptyInput,
    InvalidWindow,
    NonPositiveCapacitance,
    UnobservableEsr,
    UnobservableEsrWarning,
)
from .signals import (  # noqa: E402
    CapacitorParams,
    ReferenceParams,
    SamplingWindow,
    ValidationResult,
    capacitor_current,
    read_window_csv,
    validate_window,
)
from .simulator import ScenarioConfig, generate_window  # noqa: E402
from .predictor import PredictionResult, cost, predict, predict_voltage  # noqa: E402
from .stats import BoxplotStats, boxplot_stats  # noqa: E402
from .estimator import EstimationReport, PsoConfig, RunTrace, estimate, run_once  # noqa: E402
from .health import HealthStatus, assess  # noqa: E402
