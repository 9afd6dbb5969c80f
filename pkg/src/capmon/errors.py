"""Exception and warning types shared across capmon."""


class CapmonError(Exception):
    """Base class; ``code`` is the machine-readable identifier used by the CLI."""

    code = "capmon_error"

    def __init__(self, message, context=None):
        super().__init__(message)
        self.message = message
        self.context = dict(context or {})


class InvalidWindow(CapmonError):
    """A sampling window failed validation.

    ``violations`` holds the violation codes in the order they were found;
    ``code`` is the first of them.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0]
        self.code = first.code
        super().__init__(
            "; ".join(v.message for v in self.violations),
            {"violations": [v.code for v in self.violations]},
        )


class ConfigError(CapmonError, ValueError):
    code = "invalid_config"


class NonPositiveCapacitance(CapmonError, ValueError):
    code = "non_positive_capacitance"


class DegenerateWindow(CapmonError, ValueError):
    code = "degenerate_window"


class EmptyInput(CapmonError, ValueError):
    code = "empty_input"


class UnobservableEsr(CapmonError):
    """Raised only in strict mode; otherwise reported as a warning."""

    code = "unobservable_esr"


class UnobservableEsrWarning(UserWarning):
    pass
