"""
Classical Reed-Solomon outer code over GF(256) for byte payloads.

Stands in for the black-box QECC when payloads are classical test data: the
simulated channel's ⊥ slots become erasure positions, anything else that
arrives is taken at face value.
"""

import logging
from typing import List

from reedsolo import ReedSolomonError, RSCodec

from schemas.errors import LengthMismatch, OuterDecodeFailed
from schemas.ledger import ErrorLedger, SimulatedOutput
from schemas.registers import BOTTOM, ClassicalData, Register

logger = logging.getLogger(__name__)

MAX_CODEWORD = 255


class OuterCodeAgent:
    """Corrects any pattern with 2c + e <= nsym half-errors"""

    def __init__(self, nsym: int):
        if not 1 <= nsym < MAX_CODEWORD:
            raise ValueError(f"nsym must lie in 1..{MAX_CODEWORD - 1}, got {nsym}")
        self.nsym = nsym
        self.codec = RSCodec(nsym)

    def encode(self, message: bytes) -> List[ClassicalData]:
        if len(message) + self.nsym > MAX_CODEWORD:
            raise LengthMismatch(f"{len(message)} + {self.nsym} parity bytes exceed one GF(256) codeword")
        return [ClassicalData(b) for b in bytes(self.codec.encode(bytes(message)))]

    def decode(self, output: SimulatedOutput) -> bytes:
        received = bytearray()
        erasures = []
        for position, entry in enumerate(output.entries):
            payload = entry.payload if isinstance(entry, Register) else BOTTOM
            if isinstance(payload, ClassicalData) and 0 <= payload.value < 256:
                received.append(payload.value)
            else:
                # ⊥ or a payload no byte could have produced
                received.append(0)
                erasures.append(position)

        try:
            decoded, _full, errata = self.codec.decode(received, erase_pos=erasures or None)
        except ReedSolomonError as exc:
            raise OuterDecodeFailed(f"outer code gave up with {len(erasures)} erasures: {exc}") from exc
        logger.debug("outer code: %d erasures, %d errata corrected", len(erasures), len(errata))
        return bytes(decoded)

    def protects(self, ledger: ErrorLedger) -> bool:
        return ledger.half_errors <= self.nsym
