import pytest

from agents.auditor import AuditorAgent, audit_ledger, cover_positions, is_intact
from schemas.errors import LengthMismatch
from schemas.ledger import SimulatedOutput
from schemas.registers import BOTTOM, TOP, ClassicalData, Register, TokenMint


def test_intact_source():
    source = TokenMint().source(3)
    ledger = audit_ledger(source, SimulatedOutput(tuple(Register(t) for t in source)))
    assert (ledger.corruptions, ledger.erasures, ledger.correct) == (0, 0, 3)
    assert ledger.half_errors == 0


def test_all_erased():
    ledger = audit_ledger(TokenMint().source(4), SimulatedOutput((BOTTOM,) * 4))
    assert (ledger.corruptions, ledger.erasures) == (0, 4)
    assert ledger.damaged == [1, 2, 3, 4]


def test_consumed_token_counts_as_corrupted():
    source = TokenMint().source(2)
    source[0].consumed = True
    ledger = AuditorAgent().audit(source, SimulatedOutput(tuple(Register(t) for t in source)))
    assert (ledger.corruptions, ledger.correct) == (1, 1)
    assert ledger.half_errors == 2


def test_swapped_payloads_are_corrupt():
    a, b = TokenMint().source(2)
    ledger = audit_ledger([a, b], SimulatedOutput((Register(b), Register(a))))
    assert ledger.corruptions == 2


def test_classical_payloads_compare_by_value():
    assert is_intact(ClassicalData(7), ClassicalData(7))
    assert not is_intact(ClassicalData(7), ClassicalData(8))


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        audit_ledger(TokenMint().source(2), SimulatedOutput((BOTTOM,)))


def test_cover_positions():
    assert cover_positions([], 4) == []
    assert cover_positions([5, 6, 7, 8], 4) == [(5, 4)]
    assert cover_positions([9, 1, 3, 4], 4) == [(1, 4), (9, 4)]


def test_top_never_reaches_decoded_output():
    with pytest.raises(ValueError):
        SimulatedOutput((Register(TokenMint().source(1)[0]), TOP))
