"""
Register-level data model shared by every scheme.

Quantum payloads are opaque tokens: they can be moved, never copied, and any
measurement of one marks it consumed. Classical headers ride alongside the
payload and can be read any number of times without disturbing it.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from schemas.errors import MissingHeader

logger = logging.getLogger(__name__)


class Alphabet(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: int = Field(ge=2, description="number of distinct classical symbols")

    def contains(self, symbol: int) -> bool:
        return 0 <= symbol < self.size


class OriginKind(str, Enum):
    SOURCE = "source"
    ADVERSARIAL = "adversarial"


@dataclass(frozen=True)
class TokenOrigin:
    kind: OriginKind
    position: Optional[int] = None
    tag: Optional[str] = None

    @classmethod
    def source(cls, position: int) -> "TokenOrigin":
        return cls(OriginKind.SOURCE, position=position)

    @classmethod
    def adversarial(cls, tag: str) -> "TokenOrigin":
        return cls(OriginKind.ADVERSARIAL, tag=tag)


@dataclass(eq=False)
class QuantumToken:
    """Stand-in for the content of one quantum register (identity semantics)"""

    id: int
    origin: TokenOrigin
    consumed: bool = False

    @property
    def is_source(self) -> bool:
        return self.origin.kind is OriginKind.SOURCE

    def __repr__(self) -> str:
        where = self.origin.position if self.is_source else self.origin.tag
        flag = "x" if self.consumed else ""
        return f"Token#{self.id}({self.origin.kind.value}:{where}){flag}"


@dataclass(frozen=True)
class ClassicalData:
    """Copyable payload: a bit on the qubit wire or a byte for the outer code"""

    value: int


class Mark(Enum):
    TOP = "⊤"  # end of transmission, appended by PAD
    BOTTOM = "⊥"  # erasure, only ever produced by a decoder

    def __repr__(self) -> str:
        return self.value


TOP = Mark.TOP
BOTTOM = Mark.BOTTOM

Payload = Union[QuantumToken, ClassicalData, Mark]


@dataclass(frozen=True)
class Register:
    payload: Payload
    header: Optional[str] = None


@dataclass(frozen=True)
class TransmittedSeq:
    """Ordered channel entries: registers (or wire qubits) and ⊤/⊥ marks"""

    entries: Tuple[object, ...] = ()

    @classmethod
    def of(cls, entries: Sequence[object]) -> "TransmittedSeq":
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[object]:
        return iter(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    def before_top(self) -> Tuple[object, ...]:
        """Entries up to (excluding) the first ⊤; a premature ⊤ ends the transmission"""
        for i, entry in enumerate(self.entries):
            if entry is TOP:
                return self.entries[:i]
        return self.entries

    def has_marks(self) -> bool:
        return any(isinstance(e, Mark) for e in self.entries)

    def top_suffix_is_contiguous(self) -> bool:
        first = next((i for i, e in enumerate(self.entries) if e is TOP), len(self.entries))
        return all(e is TOP for e in self.entries[first:])


class TokenMint:
    """Run-scoped token factory; ids are never reused within one run"""

    def __init__(self):
        self._ids = itertools.count()

    def source(self, n: int) -> List[QuantumToken]:
        if n < 1:
            raise ValueError(f"need at least one source token, got n={n}")
        return [QuantumToken(next(self._ids), TokenOrigin.source(i)) for i in range(1, n + 1)]

    def adversarial(self, tag: str = "") -> QuantumToken:
        return QuantumToken(next(self._ids), TokenOrigin.adversarial(tag))


def mint_source_tokens(n: int, mint: Optional[TokenMint] = None) -> List[QuantumToken]:
    """n fresh tokens with origins Source(1)..Source(n)"""
    return (mint or TokenMint()).source(n)


def read_header(register: Register) -> str:
    """Nondisturbing projective measurement of the index subsystem"""
    if register.header is None:
        raise MissingHeader(f"register carrying {register.payload!r} has no classical header")
    return register.header


class PolicyKind(str, Enum):
    ADVERSARIAL = "adversarial"
    UNIFORM = "uniform"
    ALWAYS_FAIL = "always-fail"


class MeasurementPolicy:
    """
    Supplies outcomes for measurements that destroy quantum data.

    Outcomes are cached per (token, slot) so a collapsed register keeps
    answering the same way. Digit-aware outcomes stay inside the support of the
    re-encoding image: an s/2 block of a genuine data chunk never reads all-zero.
    """

    def __init__(self, kind: Union[PolicyKind, str] = PolicyKind.ADVERSARIAL, seed: int = 0):
        self.kind = PolicyKind(kind)
        self.rng = np.random.default_rng(seed)
        self.double_reads = 0
        self.destructive_reads = 0
        self._outcomes: Dict[Tuple[int, object], int] = {}
        self._digit_images: Dict[Tuple[int, int], int] = {}

    def token_bit(self, token: QuantumToken, slot: Optional[Tuple[int, int]] = None) -> int:
        key = (token.id, slot)
        if key in self._outcomes:
            return self._outcomes[key]

        if slot is not None:
            bit = self._digit_bit(token, *slot)
        elif self.kind is PolicyKind.UNIFORM:
            bit = int(self.rng.integers(0, 2))
        else:
            bit = 0
        self._outcomes[key] = bit
        return bit

    def _digit_bit(self, token: QuantumToken, pos: int, half: int) -> int:
        block, offset = divmod(pos - 1, half)
        if self.kind is PolicyKind.UNIFORM:
            key = (token.id, block)
            if key not in self._digit_images:
                self._digit_images[key] = int(self.rng.integers(1, 2 ** half))
            image = self._digit_images[key]
        else:
            # image of digit 0: the most zeros any valid block can show
            image = 1
        return (image >> (half - 1 - offset)) & 1

    def support_passes(self) -> bool:
        """Outcome of the E0-support measurement on a damaged block"""
        if self.kind is PolicyKind.ADVERSARIAL:
            return True  # pass-with-corruption costs two half-errors
        if self.kind is PolicyKind.UNIFORM:
            return bool(self.rng.integers(0, 2))
        return False


def destructive_read(payload: Payload, policy: MeasurementPolicy,
                     slot: Optional[Tuple[int, int]] = None) -> int:
    """Computational-basis measurement of a payload; consumes quantum tokens"""

    if isinstance(payload, ClassicalData):
        return payload.value
    if not isinstance(payload, QuantumToken):
        raise TypeError(f"cannot measure {payload!r}")

    if payload.consumed:
        policy.double_reads += 1
        logger.debug("double read of %r", payload)
    bit = policy.token_bit(payload, slot)
    payload.consumed = True
    policy.destructive_reads += 1
    return bit
