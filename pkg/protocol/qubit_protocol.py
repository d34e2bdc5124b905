"""
Binary-channel protocol arithmetic: parameter derivation, the 0^(s/2)-free
re-encoding E0, wire qubit types and the block-cover accounting.

Logarithms are base 2 throughout. The re-encoded chunk length uses digit
counting, r' = D * s/2 with D the fewest base-(2^(s/2) - 1) digits that can
hold every r-bit value.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from agents.auditor import cover_positions
from schemas.errors import InfeasibleParams, LengthMismatch
from schemas.ledger import ErrorLedger
from schemas.registers import TOP, ClassicalData, QuantumToken
from sync.sync_string import default_alphabet_size
from utils.rational import Rational, ceil_fraction, parse_rational

logger = logging.getLogger(__name__)


class Support(Enum):
    NOT_IN_IMAGE = "not-in-image"


NOT_IN_IMAGE = Support.NOT_IN_IMAGE


class DigitEncoding:
    """Digit d in 0..2^(s/2)-2 <-> (d+1) as an s/2-bit string; 0^(s/2) is never used"""

    def __init__(self, half: int):
        if half < 2:
            raise ValueError("digit width s/2 must be at least 2")
        self.half = half
        self.base = 2 ** half - 1

    def to_bits(self, digit: int) -> str:
        if not 0 <= digit < self.base:
            raise ValueError(f"digit {digit} outside 0..{self.base - 1}")
        return format(digit + 1, f"0{self.half}b")

    def from_bits(self, bits: str) -> Optional[int]:
        if len(bits) != self.half or set(bits) - {"0", "1"}:
            return None
        value = int(bits, 2)
        return value - 1 if value else None


def digit_count(r: int, s: int) -> int:
    """Fewest base-(2^(s/2)-1) digits covering [0, 2^r)"""
    base = 2 ** (s // 2) - 1
    count, reach = 0, 1
    while reach < 2 ** r:
        reach *= base
        count += 1
    return count


@dataclass(frozen=True)
class E0Code:
    r: int
    s: int

    @property
    def digits(self) -> int:
        return digit_count(self.r, self.s)

    @property
    def r_prime(self) -> int:
        return self.digits * (self.s // 2)

    @property
    def encoding(self) -> DigitEncoding:
        return DigitEncoding(self.s // 2)


def _code(params) -> E0Code:
    return params if isinstance(params, E0Code) else E0Code(params.r, params.s)


def encode_E0(chunk_bits: str, params) -> str:
    """r-bit chunk -> r'-bit string with no 0^(s/2) block and no 0^s anywhere"""
    code = _code(params)
    if len(chunk_bits) != code.r:
        raise LengthMismatch(f"chunk has {len(chunk_bits)} bits, expected r={code.r}")
    value = int(chunk_bits, 2) if chunk_bits else 0
    enc = code.encoding

    digits = []
    for _ in range(code.digits):
        value, d = divmod(value, enc.base)
        digits.append(d)
    return "".join(enc.to_bits(d) for d in reversed(digits))


def decode_E0(wire: str, params) -> Union[str, Support]:
    """Inverse of E0 on its image; anything outside the image is NOT_IN_IMAGE"""
    code = _code(params)
    if len(wire) != code.r_prime:
        raise LengthMismatch(f"wire block has {len(wire)} bits, expected r'={code.r_prime}")
    enc = code.encoding

    value = 0
    for start in range(0, len(wire), enc.half):
        digit = enc.from_bits(wire[start:start + enc.half])
        if digit is None:
            return NOT_IN_IMAGE
        value = value * enc.base + digit
    if value >= 2 ** code.r:
        return NOT_IN_IMAGE
    return format(value, f"0{code.r}b") if code.r else ""


class ProtocolParams(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    delta: Rational
    c: int = 1
    epsilon: Rational
    l: int
    r: int
    N: int
    s: int
    r_prime: int
    digits: int
    pad: int = Field(ge=0, description="zero qubits appended so that N*r covers n")

    @property
    def chunk_length(self) -> int:
        """Wire qubits per chunk: 1 + s barrier, l symbol, r' data"""
        return 1 + self.s + self.l + self.r_prime

    @property
    def wire_length(self) -> int:
        return self.N * self.chunk_length

    @property
    def max_systems(self) -> int:
        """Bob's loop bound N(1+δ), rounded up"""
        return ceil_fraction(self.N * (1 + self.delta))

    @property
    def half(self) -> int:
        return self.s // 2

    @property
    def e0(self) -> E0Code:
        return E0Code(self.r, self.s)


def _log2_inverse(delta: Fraction) -> Union[int, float]:
    inverse = 1 / delta
    if inverse.denominator == 1 and inverse.numerator & (inverse.numerator - 1) == 0:
        return inverse.numerator.bit_length() - 1
    return math.log2(float(inverse))


def _ceil_sqrt(x: Union[Fraction, float]) -> int:
    """Smallest integer m with m*m >= x"""
    if isinstance(x, Fraction):
        bound = ceil_fraction(x)
        m = math.isqrt(bound)
        return m if m * m >= bound else m + 1
    return math.ceil(math.sqrt(x))


def derive_params(n: int, delta, c: int = 1, epsilon=Fraction(1, 2), l: int = 4) -> ProtocolParams:
    delta = parse_rational(delta)
    epsilon = parse_rational(epsilon)
    if not 0 < delta < Fraction(1, 4):
        raise InfeasibleParams(f"delta must lie in (0, 1/4), got {delta}")
    if not 0 < epsilon < 1:
        raise InfeasibleParams(f"epsilon must lie in (0, 1), got {epsilon}")
    if c < 1:
        raise InfeasibleParams(f"barrier constant c must be positive, got {c}")

    log_inv = _log2_inverse(delta)
    if isinstance(log_inv, int):
        r = _ceil_sqrt(Fraction(log_inv) / delta)
        N = _ceil_sqrt(Fraction(n * n) * delta / log_inv)
        s = 2 * c * log_inv
    else:
        r = _ceil_sqrt(log_inv / float(delta))
        N = _ceil_sqrt(n * n * float(delta) / log_inv)
        s = 2 * math.ceil(c * log_inv)

    if n < r:
        raise InfeasibleParams(f"n={n} is shorter than one chunk (r={r})")
    if l < 1:
        raise InfeasibleParams("sync symbols need at least one bit")
    if l > s // 2:
        raise InfeasibleParams(
            f"l={l} exceeds s/2={s // 2}; sync symbols could then open a 0^s run (raise c)")
    needed = min(N, default_alphabet_size(epsilon))
    if 2 ** l < needed:
        raise InfeasibleParams(f"2^l = {2 ** l} symbols cannot host a sync string for N={N}, eps={epsilon} "
                               f"(need {needed})")

    digits = digit_count(r, s)
    params = ProtocolParams(n=n, delta=delta, c=c, epsilon=epsilon, l=l, r=r, N=N, s=s,
                            r_prime=digits * (s // 2), digits=digits, pad=N * r - n)
    logger.info("protocol params n=%d delta=%s: r=%d N=%d s=%d r'=%d", n, delta, r, N, s, params.r_prime)
    return params


@dataclass(frozen=True)
class DataQubit:
    """One of the r' wire slots carrying re-encoded chunk `chunk`"""

    token: QuantumToken
    chunk: int
    pos: int


WireQubit = Union[ClassicalData, DataQubit]


def symbol_bits(symbol: int, l: int) -> List[int]:
    return [(symbol >> (l - 1 - b)) & 1 for b in range(l)]


def classical_skeleton(stream: Sequence[object], params, chunk_bits: Optional[Sequence[str]] = None) -> str:
    """
    Bits the stream would show under a computational-basis measurement when
    chunk i holds `chunk_bits[i-1]` (all-zero chunks by default).
    """
    code = _code(params)
    zero = "0" * code.r
    images = {}
    out = []
    for entry in stream:
        if isinstance(entry, ClassicalData):
            out.append(str(entry.value))
        elif isinstance(entry, DataQubit):
            if entry.chunk not in images:
                bits = chunk_bits[entry.chunk - 1] if chunk_bits else zero
                images[entry.chunk] = encode_E0(bits, code)
            out.append(images[entry.chunk][entry.pos - 1])
    return "".join(out)


def stray_zero_runs(bits: str, params) -> List[int]:
    """Offsets of every 0^s in a chunk-aligned stream once the barrier zeros are masked out"""
    chars = list(bits)
    for start in range(0, len(bits), params.chunk_length):
        for t in range(start + 1, min(start + 1 + params.s, len(bits))):
            chars[t] = "|"
    masked = "".join(chars)
    return [m.start() for m in re.finditer(f"(?=0{{{params.s}}})", masked)]


def barrier_offsets(bits: str, s: int) -> List[int]:
    """0-based offsets where the scanner would see 1 followed by s zeros"""
    return [m.start() for m in re.finditer(f"(?=10{{{s}}})", bits)]


def block_cover(ledger: ErrorLedger, params) -> List[Tuple[int, int]]:
    """Minimal cover of the damaged source qubits by length-r intervals"""
    return cover_positions(ledger.damaged, params.r)


def dump_wire(entries: Sequence[object]) -> str:
    lines = []
    for entry in entries:
        if entry is TOP:
            lines.append("T")
        elif isinstance(entry, ClassicalData):
            lines.append(f"C{entry.value}")
        elif isinstance(entry, DataQubit):
            lines.append(f"D{entry.chunk}.{entry.pos}")
        else:
            raise ValueError(f"cannot render {entry!r} on the qubit wire")
    return "\n".join(lines) + "\n"


def parse_wire(text: str) -> List[Tuple]:
    """Inverse of dump_wire at the symbolic level: ("C", bit), ("D", chunk, pos) or ("T",)"""
    parsed = []
    for line in text.split():
        if line == "T":
            parsed.append(("T",))
        elif line[0] == "C" and line[1:] in ("0", "1"):
            parsed.append(("C", int(line[1:])))
        elif line[0] == "D":
            chunk, pos = line[1:].split(".")
            parsed.append(("D", int(chunk), int(pos)))
        else:
            raise ValueError(f"bad wire line {line!r}")
    return parsed
