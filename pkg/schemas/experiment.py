from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, computed_field, model_validator

from protocol.qubit_protocol import ProtocolParams
from schemas.errors import ConfigInvalid
from schemas.registers import PolicyKind
from sync.sync_string import SyncString
from utils.rational import Rational

FORMAT_VERSION = 1


class Scheme(str, Enum):
    TRIVIAL = "trivial"
    SYNC = "sync"
    QUBIT = "qubit"


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scheme: Scheme
    n: int = Field(ge=1)
    delta: Rational
    epsilon: Rational = Fraction(1, 2)
    c: int = Field(default=1, ge=1)
    l: int = Field(default=4, ge=1)
    adversary: str = "uniform-random-insdel"
    trials: int = Field(default=1, ge=0)
    seed: int = Field(default=0, ge=0)
    out_path: Optional[str] = None
    alphabet_size: Optional[int] = Field(default=None, ge=2)
    policy: PolicyKind = PolicyKind.ADVERSARIAL

    @model_validator(mode="after")
    def _ranges(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.scheme is Scheme.QUBIT:
            if not 0 < self.delta < Fraction(1, 4):
                raise ValueError("delta must lie in (0, 1/4) for the qubit protocol")
        elif not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        return self

    @classmethod
    def build(cls, **fields) -> "ExperimentConfig":
        """Construct, turning pydantic's report into ConfigInvalid with one message per field"""
        from agents.adversary import builtin_adversaries

        try:
            config = cls(**fields)
        except ValidationError as e:
            errors = {}
            for err in e.errors():
                name = ".".join(str(part) for part in err["loc"]) or "config"
                errors[name] = err["msg"]
            raise ConfigInvalid(errors) from e

        names = [a.name for a in builtin_adversaries()]
        if config.adversary not in names:
            raise ConfigInvalid({"adversary": f"unknown adversary {config.adversary!r}; choose from {', '.join(names)}"})
        return config


class BoundCheck(BaseModel):
    bound: Union[int, float]
    observed: Union[int, float]

    @computed_field
    @property
    def passed(self) -> bool:
        return self.observed <= self.bound


class TrialRecord(BaseModel):
    format_version: int = FORMAT_VERSION
    trial: int
    seed: int
    p: int
    q: int
    corruptions: int
    erasures: int
    half_errors: int
    misdecodings: int
    block_cover_size: int
    chunk_errors: Optional[int] = None
    qubit_damage: Optional[int] = None
    checks: Dict[str, BoundCheck] = Field(default_factory=dict)
    # pattern JSON, kept only when some check failed
    counterexample: Optional[str] = None
    # received qubit wire in dump format, same condition; persisted to its own file
    wire: Optional[str] = Field(default=None, exclude=True)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())


class Summary(BaseModel):
    format_version: int = FORMAT_VERSION
    scheme: Scheme
    n: int
    delta: str
    adversary: str
    trials: int = 0
    violations: int = 0
    max_half_errors: int = 0
    mean_half_errors: float = 0.0
    check_passes: Dict[str, int] = Field(default_factory=dict)
    # qubit scheme: max over trials of damage / (n sqrt(δ log2(1/δ))) and cover / (nδ)
    fitted_damage_constant: Optional[float] = None
    fitted_cover_constant: Optional[float] = None

    def csv_row(self) -> Dict[str, object]:
        row = self.model_dump(exclude={"check_passes"})
        row["scheme"] = self.scheme.value
        row["check_passes"] = ";".join(f"{k}={v}" for k, v in sorted(self.check_passes.items()))
        return row


class ExhaustiveReport(BaseModel):
    format_version: int = FORMAT_VERSION
    scheme: Scheme
    n: int
    budget: int
    patterns: int = 0
    runs: int = 0
    violations: int = 0
    counterexamples: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0


class ExperimentState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ExperimentConfig
    workers: Optional[int] = None
    sync_string: Optional[SyncString] = None
    params: Optional[ProtocolParams] = None
    records: List[TrialRecord] = Field(default_factory=list)
    summary: Optional[Summary] = None
    written_files: List[str] = Field(default_factory=list)
