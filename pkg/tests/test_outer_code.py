from fractions import Fraction

import pytest

from agents.auditor import AuditorAgent
from agents.indexers import TrivialIndexerAgent
from agents.outer_code import OuterCodeAgent
from channel.insdel_channel import apply_channel
from schemas.errors import LengthMismatch, OuterDecodeFailed
from schemas.ledger import SimulatedOutput
from schemas.noise import NoisePattern
from schemas.registers import BOTTOM, ClassicalData, Register, TokenMint


def _through_channel(symbols, pattern, fill_headers=()):
    mint = TokenMint()
    fill = [Register(payload=mint.adversarial("fill"), header=h) for h in fill_headers]
    indexer = TrivialIndexerAgent()
    output = indexer.decode(apply_channel(indexer.encode(symbols), pattern, fill), len(symbols))
    return output, AuditorAgent().audit(symbols, output)


def test_clean_round_trip():
    outer = OuterCodeAgent(4)
    symbols = outer.encode(b"hello")
    assert len(symbols) == 9
    output = SimulatedOutput(tuple(Register(c) for c in symbols))
    assert outer.decode(output) == b"hello"


def test_erasures_from_deletions_are_repaired():
    outer = OuterCodeAgent(4)
    symbols = outer.encode(b"insdel")
    n = len(symbols)
    pattern = NoisePattern.from_slots(n, Fraction(2, n), [i for i in range(1, n + 1) if i not in (2, 7)], [])
    output, ledger = _through_channel(symbols, pattern)
    assert ledger.erasures == 2 and outer.protects(ledger)
    assert outer.decode(output) == b"insdel"


def test_forged_register_is_an_erasure_for_the_outer_code():
    outer = OuterCodeAgent(4)
    symbols = outer.encode(b"abc")
    n = len(symbols)
    pattern = NoisePattern.from_slots(n, Fraction(2, n), [1, 3, 4, 5, 6, 7], [2])
    output, ledger = _through_channel(symbols, pattern, ["2"])
    assert ledger.corruptions == 1
    assert outer.decode(output) == b"abc"


def test_too_many_erasures():
    outer = OuterCodeAgent(2)
    symbols = outer.encode(b"xy")
    entries = (BOTTOM, BOTTOM, BOTTOM) + tuple(Register(c) for c in symbols[3:])
    with pytest.raises(OuterDecodeFailed):
        outer.decode(SimulatedOutput(entries))


def test_codeword_limit():
    with pytest.raises(LengthMismatch):
        OuterCodeAgent(10).encode(bytes(250))
    with pytest.raises(ValueError):
        OuterCodeAgent(0)


def test_corrupted_byte_is_corrected():
    outer = OuterCodeAgent(4)
    symbols = outer.encode(b"data")
    symbols[1] = ClassicalData(symbols[1].value ^ 0xFF)
    assert outer.decode(SimulatedOutput(tuple(Register(c) for c in symbols))) == b"data"
