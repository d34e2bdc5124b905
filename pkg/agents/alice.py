import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from protocol.qubit_protocol import DataQubit, ProtocolParams, symbol_bits
from schemas.errors import ParamMismatch
from schemas.registers import ClassicalData, QuantumToken, TokenMint, TransmittedSeq
from sync.sync_string import SyncString

logger = logging.getLogger(__name__)


@dataclass
class AliceTranscript:
    """What Alice sent, kept on the side for auditing only; Bob never sees it"""

    stream: TransmittedSeq
    chunk_tokens: List[QuantumToken]
    # members[i-1] lists the r source qubits packed into chunk i (None = padding)
    members: List[List[Optional[QuantumToken]]] = field(default_factory=list)


class AliceEncoderAgent:
    """Chunks n qubits into N blocks and frames each as 1 0^s | S(i) | E0(chunk)"""

    def __init__(self, params: ProtocolParams, s: SyncString, mint: Optional[TokenMint] = None):
        if len(s) != params.N:
            raise ParamMismatch(f"sync string has length {len(s)}, protocol needs N={params.N}")
        if s.alphabet_size > 2 ** params.l:
            raise ParamMismatch(f"sync alphabet {s.alphabet_size} does not fit in l={params.l} bits")
        self.params = params
        self.s = s
        self.mint = mint or TokenMint()

    def encode(self, source: Sequence[QuantumToken]) -> AliceTranscript:
        params = self.params
        if len(source) != params.n:
            raise ParamMismatch(f"{len(source)} source qubits, protocol was derived for n={params.n}")

        padded: List[Optional[QuantumToken]] = list(source) + [None] * params.pad
        members = [padded[k * params.r:(k + 1) * params.r] for k in range(params.N)]
        # E0 on the chunk's joint state: one token stands for the whole re-encoded block
        chunk_tokens = self.mint.source(params.N)

        stream: list = []
        for i, token in enumerate(chunk_tokens, start=1):
            stream.append(ClassicalData(1))
            stream.extend(ClassicalData(0) for _ in range(params.s))
            stream.extend(ClassicalData(b) for b in symbol_bits(self.s.symbol(i), params.l))
            stream.extend(DataQubit(token=token, chunk=i, pos=pos) for pos in range(1, params.r_prime + 1))

        logger.debug("alice: %d chunks, %d wire qubits", params.N, len(stream))
        return AliceTranscript(TransmittedSeq.of(stream), chunk_tokens, members)


def alice_encode(source: Sequence[QuantumToken], params: ProtocolParams, s: SyncString,
                 mint: Optional[TokenMint] = None) -> AliceTranscript:
    return AliceEncoderAgent(params, s, mint).encode(source)
