"""
The intermediaries C_A / C_B that turn the insdel channel into a
corruption/erasure channel.

Both schemes attach a classical header to every register, read the headers
at the far end without touching the payloads, and rearrange. A slot claimed
exactly once receives that register's payload (header stripped); a slot
claimed zero or several times becomes ⊥ and every claimant is discarded.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

from schemas.errors import LengthMismatch, MissingHeader
from schemas.ledger import IndexDecoding, SimulatedOutput
from schemas.registers import BOTTOM, TOP, QuantumToken, Register, TransmittedSeq, read_header
from sync.index_decoder import decode_indices
from sync.sync_string import SyncString

logger = logging.getLogger(__name__)


def _parse_number(header: str) -> Optional[int]:
    # canonical decimal only; "02" or " 2" is a forgery that claims nothing
    if not header.isdigit() or header != str(int(header)):
        return None
    return int(header)


def _arrange(claims: Dict[int, List[Register]], n: int) -> Tuple[List[object], int]:
    entries: List[object] = []
    dropped = 0
    for index in range(1, n + 1):
        claimants = claims.get(index, [])
        if len(claimants) == 1:
            payload = claimants[0].payload
            entries.append(BOTTOM if payload is BOTTOM else Register(payload=payload))
        else:
            entries.append(BOTTOM)
            dropped += len(claimants)
    return entries, dropped


def _readable(entry: object) -> Optional[Tuple[Register, str]]:
    if not isinstance(entry, Register):
        return None
    try:
        return entry, read_header(entry)
    except MissingHeader:
        return None


class TrivialIndexerAgent:
    """Polynomial-alphabet scheme: the header is the register's message number"""

    def encode(self, payloads: Sequence[QuantumToken]) -> TransmittedSeq:
        if not payloads:
            raise ValueError("nothing to encode")
        return TransmittedSeq.of(
            Register(payload=payload, header=str(i)) for i, payload in enumerate(payloads, start=1))

    def decode(self, received: TransmittedSeq, n: int) -> SimulatedOutput:
        claims: Dict[int, List[Register]] = defaultdict(list)
        discarded = 0

        for entry in received.before_top():
            readable = _readable(entry)
            index = _parse_number(readable[1]) if readable else None
            if index is None or not 1 <= index <= n:
                discarded += 1
                continue
            claims[index].append(readable[0])

        entries, dropped = _arrange(claims, n)
        logger.debug("trivial decode: %d discarded, %d dropped as duplicates", discarded, dropped)
        return SimulatedOutput(tuple(entries), discarded=discarded + dropped)

    @staticmethod
    def channel_alphabet(n: int, sim_alphabet: int = 2) -> int:
        """dim(H_ch) = dim(H_sim) * n"""
        return sim_alphabet * n


class SyncIndexerAgent:
    """Constant-alphabet scheme: the header of register i is the symbol S_i"""

    def __init__(self, s: SyncString):
        self.s = s

    def encode(self, payloads: Sequence[object]) -> TransmittedSeq:
        if len(payloads) != len(self.s):
            raise LengthMismatch(f"{len(payloads)} payloads for a sync string of length {len(self.s)}")
        return TransmittedSeq.of(
            Register(payload=payload, header=str(self.s.symbol(i)))
            for i, payload in enumerate(payloads, start=1))

    def decode(self, received: TransmittedSeq) -> SimulatedOutput:
        """
        The decoding has one entry per received position up to the last
        non-⊤ entry. Unreadable entries, and everything after a premature ⊤,
        decode to None and are never fed to the index decoder.
        """
        entries = received.entries
        length = max((t for t, entry in enumerate(entries, start=1) if entry is not TOP), default=0)
        prefix = received.before_top()

        claimants: List[Optional[Register]] = [None] * length
        positions: List[int] = []
        symbols: List[int] = []
        discarded = sum(1 for entry in entries[len(prefix):length] if entry is not TOP)

        for t, entry in enumerate(prefix):
            readable = _readable(entry)
            symbol = _parse_number(readable[1]) if readable else None
            if symbol is None or symbol >= self.s.alphabet_size:
                discarded += 1
                continue
            claimants[t] = readable[0]
            positions.append(t)
            symbols.append(symbol)

        indices: List[Optional[int]] = [None] * length
        for t, index in zip(positions, decode_indices(self.s, symbols).entries):
            indices[t] = index
        decoding = IndexDecoding(n=len(self.s), entries=tuple(indices))

        claims: Dict[int, List[Register]] = defaultdict(list)
        for register, index in zip(claimants, indices):
            if index is not None:
                claims[index].append(register)

        slots, dropped = _arrange(claims, len(self.s))
        return SimulatedOutput(tuple(slots), decoding=decoding, discarded=discarded + dropped,
                               claimants=tuple(claimants))

    def channel_alphabet(self, sim_alphabet: int = 2) -> int:
        """|Σ_ch| >= |Σ_sim| * |Σ_syn|"""
        return sim_alphabet * self.s.alphabet_size
