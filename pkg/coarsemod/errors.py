"""
Exception types raised by coarsemod.

Property failures are reported through certificates, not exceptions; the
classes here cover misuse, unsupported inputs and window exhaustion.
"""


class CoarseModError(Exception):
    """Base class for all library errors."""


class UnknownGeneratorError(CoarseModError):
    def __init__(self, symbol: str, allowed: list[str]):
        self.symbol = symbol
        self.allowed = allowed
        super().__init__(
            f"Unknown generator symbol '{symbol}'. Allowed symbols: {sorted(allowed)}"
        )


class UnsupportedFamilyError(CoarseModError):
    pass


class RadiusCapExceededError(CoarseModError):
    def __init__(self, cap: int, requested: int | None = None):
        self.cap = cap
        self.requested = requested
        detail = f" (requested {requested})" if requested is not None else ""
        super().__init__(f"radius cap {cap} exceeded{detail}")


class WindowTooSmallError(CoarseModError):
    def __init__(self, message: str, required: int | None = None):
        self.required = required
        super().__init__(message)


class MismatchedSpecsError(CoarseModError):
    pass


class NotIdempotentError(CoarseModError):
    pass


class UncertifiedStructureError(CoarseModError):
    pass


class UnsupportedTierError(CoarseModError):
    pass


class NonDivergentWitnessError(CoarseModError):
    pass


class TaskSpecError(CoarseModError):
    """Raised for task files that fail validation; `field` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")
