"""
Error Types
===========

Exception hierarchy shared by every module. ``ValidationFailed`` covers bad
inputs (CLI exit code 1); ``NumericalFailure`` covers solves, quadratures and
integrations that could not meet their tolerance (CLI exit code 2).
"""


class SuperoscError(Exception):
    """Base error carrying a message and a context mapping."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = dict(context)

    def with_context(self, **context):
        self.context.update(context)
        return self

    def __str__(self):
        if not self.context:
            return self.message
        details = ', '.join(f'{key}={value}' for key, value in sorted(self.context.items()))
        return f'{self.message} ({details})'


# ===============================================
# === INPUT ERRORS =============================
# ===============================================

class ValidationFailed(SuperoscError):
    """An input failed validation; ``field_path`` names the offending field."""

    def __init__(self, message, field_path='', **context):
        super().__init__(message, **context)
        self.field_path = field_path

    def __str__(self):
        text = super().__str__()
        return f'{self.field_path}: {text}' if self.field_path else text


class DuplicateTimes(ValidationFailed):
    pass


class EmptyWindow(ValidationFailed):
    pass


class MissingColumn(ValidationFailed):
    pass


# ===============================================
# === NUMERICAL ERRORS =========================
# ===============================================

class NumericalFailure(SuperoscError):
    pass


class IllConditioned(NumericalFailure):
    pass


class TolUnachievable(NumericalFailure):
    pass


class StepSizeUnderflow(NumericalFailure):
    pass


class NormDriftExceeded(NumericalFailure):
    pass


class NotAsymptoticallyStatic(NumericalFailure):
    pass


class DegenerateRoots(NumericalFailure):
    pass


class ResonanceInBand(NumericalFailure):
    pass


class IllConditionedWarning(UserWarning):
    """Soft report that a Gram solve ran close to its conditioning limit."""
