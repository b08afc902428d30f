"""Exception hierarchy shared by every layer of contrail-seg."""

from typing import Optional


class ContrailSegError(Exception):
    """Base class for all errors raised by contrail-seg."""

    kind = "error"
    exit_code = 1

    def detail_fields(self) -> str:
        """Return trailing ``key=value`` pairs for the one-line CLI error."""
        return ""

    def one_line(self) -> str:
        """Render the machine-parsable single line printed by the CLI."""
        text = " ".join(str(self).split())
        extra = self.detail_fields()
        return f"error: {self.kind}: {text}{' ' + extra if extra else ''}"


class DimensionError(ContrailSegError):
    """Tensor or mask shapes are incompatible."""

    kind = "dimension"


class ConfigError(ContrailSegError):
    """A configuration value is invalid or unknown."""

    kind = "config"
    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

    def with_prefix(self, prefix: str) -> "ConfigError":
        """Return a copy whose field path is nested under ``prefix``."""
        field = f"{prefix}.{self.field}" if self.field else prefix
        return ConfigError(str(self), field=field)

    def detail_fields(self) -> str:
        return f"field={self.field}" if self.field else ""


class UsageError(ContrailSegError):
    """An API was called in a way its contract forbids."""

    kind = "usage"


class AnnotationError(ContrailSegError):
    """A polygon annotation is degenerate or inconsistent."""

    kind = "annotation"


class FormatError(ContrailSegError):
    """A JSON document violates its schema."""

    kind = "format"

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer

    def detail_fields(self) -> str:
        return f"pointer={self.pointer or '/'}"


class IntegrityError(ContrailSegError):
    """A tensor container payload is truncated or corrupt."""

    kind = "integrity"


class NumericalError(ContrailSegError):
    """An op produced NaN or infinite values while debug checks were on."""

    kind = "numerical"

    def __init__(self, message: str, op: str):
        super().__init__(message)
        self.op = op

    def detail_fields(self) -> str:
        return f"op={self.op}"


class TrainingError(ContrailSegError):
    """Training diverged."""

    kind = "training"

    def __init__(self, message: str, epoch: int, fold: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch
        self.fold = fold

    def detail_fields(self) -> str:
        fields = f"epoch={self.epoch}"
        if self.fold is not None:
            fields += f" fold={self.fold}"
        return fields
