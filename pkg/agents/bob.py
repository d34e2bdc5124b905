"""
Bob's side of the binary protocol.

Bob measures incoming qubits until he sees 10^s, reads the next l qubits as
the sync symbol (E system), runs the E0-support measurement on the next r'
qubits (D system), and repeats for at most N(1+δ) systems or until ⊤. The
D⊗E systems then go through the sync-string indexing decoder.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from agents.alice import AliceTranscript
from agents.auditor import AuditorAgent, cover_positions
from agents.indexers import SyncIndexerAgent
from config.settings import get_config
from metrics.edit_metrics import lcs_length
from protocol.qubit_protocol import NOT_IN_IMAGE, DataQubit, ProtocolParams, decode_E0
from schemas.ledger import ErrorLedger, SimulatedOutput
from schemas.registers import (BOTTOM, TOP, ClassicalData, MeasurementPolicy, QuantumToken, Register, TokenMint,
                               TransmittedSeq, destructive_read)
from sync.sync_string import SyncString

logger = logging.getLogger(__name__)


class _Cursor:
    def __init__(self, entries: Sequence[object]):
        self.entries = entries
        self.at = 0

    def next(self) -> Optional[object]:
        """Next wire entry, or None once ⊤ or the end is reached"""
        if self.at >= len(self.entries) or self.entries[self.at] is TOP:
            return None
        entry = self.entries[self.at]
        self.at += 1
        return entry

    def take(self, count: int) -> List[object]:
        taken = []
        while len(taken) < count:
            entry = self.next()
            if entry is None:
                break
            taken.append(entry)
        return taken


@dataclass
class GatheredSystems:
    systems: List[Register] = field(default_factory=list)
    scan_reads: int = 0


class BobDecoderAgent:
    """Barrier scanner plus sync-string indexing over the recovered D⊗E systems"""

    def __init__(self, params: ProtocolParams, s: SyncString,
                 policy: Optional[MeasurementPolicy] = None, mint: Optional[TokenMint] = None):
        self.params = params
        self.s = s
        self.policy = policy or MeasurementPolicy(get_config("measurement_policy"))
        self.mint = mint or TokenMint()
        self._scan_reads = 0

    def _measure(self, entry: object) -> int:
        if isinstance(entry, DataQubit):
            self._scan_reads += 1
            return destructive_read(entry.token, self.policy, slot=(entry.pos, self.params.half))
        return destructive_read(entry, self.policy)

    def _seek_barrier(self, cursor: _Cursor) -> bool:
        zeros = None  # no 1 seen yet
        while True:
            entry = cursor.next()
            if entry is None:
                return False
            if self._measure(entry) == 1:
                zeros = 0
            elif zeros is not None:
                zeros += 1
                if zeros == self.params.s:
                    return True

    def _support(self, block: List[object]) -> object:
        """E0-support measurement on r' wire slots: the chunk token, a corrupted system, or ⊥"""
        r_prime = self.params.r_prime
        if len(block) < r_prime:
            self._disturb(block)
            return BOTTOM

        head = block[0]
        if (isinstance(head, DataQubit) and not head.token.consumed
                and all(isinstance(e, DataQubit) and e.token is head.token for e in block)
                and [e.pos for e in block] == list(range(1, r_prime + 1))):
            return head.token

        if all(isinstance(e, ClassicalData) for e in block):
            # prepared by the adversary in the computational basis: the outcome is determined
            bits = "".join(str(e.value) for e in block)
            if decode_E0(bits, self.params) is NOT_IN_IMAGE:
                return BOTTOM
            return self.mint.adversarial("classical-block")

        self._disturb(block)
        if self.policy.support_passes():
            return self.mint.adversarial("support-pass")
        return BOTTOM

    @staticmethod
    def _disturb(block: List[object]) -> None:
        for entry in block:
            if isinstance(entry, DataQubit):
                entry.token.consumed = True

    def gather(self, wire: TransmittedSeq) -> GatheredSystems:
        self._scan_reads = 0
        cursor = _Cursor(wire.entries)
        systems: List[Register] = []

        for _ in range(self.params.max_systems):
            if not self._seek_barrier(cursor):
                break
            header = cursor.take(self.params.l)
            if len(header) < self.params.l:
                break
            symbol = 0
            for entry in header:
                symbol = (symbol << 1) | self._measure(entry)
            block = cursor.take(self.params.r_prime)
            systems.append(Register(payload=self._support(block), header=str(symbol)))
            if len(block) < self.params.r_prime:
                break

        logger.debug("bob: %d systems gathered, %d data qubits read while scanning",
                     len(systems), self._scan_reads)
        return GatheredSystems(systems, self._scan_reads)

    def decode(self, wire: TransmittedSeq) -> Tuple[SimulatedOutput, GatheredSystems]:
        gathered = self.gather(wire)
        padding = [TOP] * (self.params.max_systems - len(gathered.systems))
        output = SyncIndexerAgent(self.s).decode(TransmittedSeq.of(gathered.systems + padding))
        return output, gathered


def _system_label(register: Register, chunk_of: Dict[int, int], s: SyncString) -> Optional[int]:
    """Chunk index a D⊗E system faithfully carries, or None when it is garbage"""
    payload = register.payload
    if not isinstance(payload, QuantumToken) or payload.consumed or payload.id not in chunk_of:
        return None
    chunk = chunk_of[payload.id]
    return chunk if register.header == str(s.symbol(chunk)) else None


def audit_protocol(transcript: AliceTranscript, output: SimulatedOutput, gathered: GatheredSystems,
                   params: ProtocolParams, s: SyncString, policy: MeasurementPolicy) -> ErrorLedger:
    """Chunk-level ledger plus the qubit-level damage it implies"""
    ledger = AuditorAgent().audit(transcript.chunk_tokens, output, double_reads=policy.double_reads)
    chunk_of = {token.id: i for i, token in enumerate(transcript.chunk_tokens, start=1)}

    labels = [_system_label(reg, chunk_of, s) for reg in gathered.systems]
    # garbage systems match nothing
    comparable = [label if label is not None else -k for k, label in enumerate(labels, start=1)]
    common = lcs_length(comparable, list(range(1, params.N + 1)))
    ledger.chunk_errors = params.N + len(labels) - 2 * common
    ledger.lost_systems = params.N - common
    ledger.added_systems = len(labels) - common

    if output.decoding is not None:
        ledger.misdecodings = sum(
            1 for reg, index in zip(output.claimants, output.decoding.entries)
            if reg is not None and (label := _system_label(reg, chunk_of, s)) is not None and index != label)

    chunk_damage = ledger.damaged
    qubits: List[int] = []
    ledger.qubit_corruptions = ledger.qubit_erasures = 0
    for chunk in chunk_damage:
        span = [q for q in range((chunk - 1) * params.r + 1, chunk * params.r + 1) if q <= params.n]
        qubits.extend(span)
        if output[chunk - 1] is BOTTOM:
            ledger.qubit_erasures += len(span)
        else:
            ledger.qubit_corruptions += len(span)

    ledger.damaged = qubits
    ledger.block_cover = cover_positions(qubits, params.r)
    ledger.scan_reads = gathered.scan_reads
    ledger.channel_alphabet = 2
    return ledger


def bob_decode(wire: TransmittedSeq, params: ProtocolParams, s: SyncString, transcript: AliceTranscript,
               policy: Optional[MeasurementPolicy] = None,
               mint: Optional[TokenMint] = None) -> Tuple[SimulatedOutput, ErrorLedger]:
    """Decode the wire; the transcript is used only to score what Bob produced"""
    bob = BobDecoderAgent(params, s, policy, mint)
    output, gathered = bob.decode(wire)
    return output, audit_protocol(transcript, output, gathered, params, s, bob.policy)
