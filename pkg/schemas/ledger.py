from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, Field, computed_field, model_validator

from schemas.registers import BOTTOM, Mark, Register


class IndexDecoding(BaseModel):
    """Decoded source index (or None for ⊥) for every received position"""

    n: int = Field(ge=0)
    entries: Tuple[Optional[int], ...] = ()

    @model_validator(mode="after")
    def _check(self):
        for value in self.entries:
            if value is not None and not 1 <= value <= self.n:
                raise ValueError(f"decoded index {value} outside 1..{self.n}")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, position: int) -> Optional[int]:
        """1-based lookup"""
        return self.entries[position - 1]


class MisdecodingReport(BaseModel):
    count: int = 0
    # (received position, true index, decoded index or None)
    details: List[Tuple[int, int, Optional[int]]] = Field(default_factory=list)


@dataclass(frozen=True)
class SimulatedOutput:
    """What C_B hands to the receiver: exactly n slots, each a register or ⊥"""

    entries: Tuple[Union[Register, Mark], ...]
    decoding: Optional[IndexDecoding] = None
    discarded: int = 0
    # register at each decoded position, None where nothing was fed to the index decoder
    claimants: Tuple[Optional[Register], ...] = ()

    def __post_init__(self):
        if any(isinstance(e, Mark) and e is not BOTTOM for e in self.entries):
            raise ValueError("simulated output may only contain registers and ⊥")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index):
        return self.entries[index]


class ErrorLedger(BaseModel):
    n: int
    corruptions: int = 0
    erasures: int = 0
    correct: int = 0
    misdecodings: int = 0
    damaged: List[int] = Field(default_factory=list)
    block_cover: List[Tuple[int, int]] = Field(default_factory=list)
    double_reads: int = 0
    channel_alphabet: Optional[int] = None

    # qubit protocol only
    chunk_errors: Optional[int] = None
    lost_systems: Optional[int] = None
    added_systems: Optional[int] = None
    qubit_corruptions: Optional[int] = None
    qubit_erasures: Optional[int] = None
    scan_reads: Optional[int] = None

    @computed_field
    @property
    def half_errors(self) -> int:
        return 2 * self.corruptions + self.erasures
