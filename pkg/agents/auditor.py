from typing import List, Sequence, Tuple

from schemas.errors import LengthMismatch
from schemas.ledger import ErrorLedger, SimulatedOutput
from schemas.registers import BOTTOM, ClassicalData, QuantumToken, Register


def is_intact(payload: object, expected: object) -> bool:
    """Correct delivery: the very source token, unmeasured, or equal classical data"""
    if isinstance(expected, QuantumToken):
        return payload is expected and not expected.consumed
    if isinstance(expected, ClassicalData):
        return payload == expected
    return False


def cover_positions(positions: Sequence[int], width: int) -> List[Tuple[int, int]]:
    """Fewest length-`width` intervals covering the positions (greedy from the left)"""
    cover: List[Tuple[int, int]] = []
    end = 0
    for position in sorted(positions):
        if position > end:
            cover.append((position, width))
            end = position + width - 1
    return cover


class AuditorAgent:
    """Classifies every output slot against the source: correct, corrupted or erased"""

    def audit(self, source: Sequence[object], output: SimulatedOutput,
              misdecodings: int = 0, double_reads: int = 0) -> ErrorLedger:
        if len(output) != len(source):
            raise LengthMismatch(f"output has {len(output)} slots for {len(source)} source registers")

        ledger = ErrorLedger(n=len(source), misdecodings=misdecodings, double_reads=double_reads)
        for position, (expected, entry) in enumerate(zip(source, output.entries), start=1):
            if entry is BOTTOM:
                ledger.erasures += 1
                ledger.damaged.append(position)
            elif isinstance(entry, Register) and is_intact(entry.payload, expected):
                ledger.correct += 1
            else:
                ledger.corruptions += 1
                ledger.damaged.append(position)
        return ledger


def audit_ledger(source: Sequence[object], output: SimulatedOutput) -> ErrorLedger:
    return AuditorAgent().audit(source, output)
