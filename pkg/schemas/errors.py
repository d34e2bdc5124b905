from typing import Dict, Optional


class InsdelError(Exception):
    """Base class for every error raised by the simulator"""


class MissingHeader(InsdelError):
    pass


class AlphabetMismatch(InsdelError):
    pass


class BothEmpty(InsdelError):
    pass


class ConstructionFailed(InsdelError):
    def __init__(self, attempts: int, message: Optional[str] = None):
        self.attempts = attempts
        super().__init__(message or f"no verified synchronization string after {attempts} attempts")


class LengthMismatch(InsdelError):
    pass


class PatternMismatch(InsdelError):
    pass


class TooLarge(InsdelError):
    pass


class InfeasibleParams(InsdelError):
    pass


class ParamMismatch(InsdelError):
    pass


class DimMismatch(InsdelError):
    pass


class ConfigInvalid(InsdelError):
    """Carries field -> message pairs so the CLI can report each bad flag"""

    def __init__(self, field_errors: Dict[str, str]):
        self.field_errors = dict(field_errors)
        detail = "; ".join(f"{k}: {v}" for k, v in self.field_errors.items())
        super().__init__(f"invalid experiment config ({detail})")


class OuterDecodeFailed(InsdelError):
    pass
