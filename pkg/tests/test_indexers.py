from fractions import Fraction

import pytest

from agents.auditor import AuditorAgent
from agents.indexers import SyncIndexerAgent, TrivialIndexerAgent
from channel.insdel_channel import apply_channel, enumerate_patterns
from execution.trial_runner import exhaustive_fills, run_indexing_once
from sync.index_decoder import count_misdecodings
from schemas.errors import LengthMismatch
from schemas.experiment import Scheme
from schemas.noise import NoisePattern
from schemas.registers import BOTTOM, TOP, Register, TokenMint
from sync.sync_string import SyncString

HALF = Fraction(1, 2)


def _deliver_trivial(n, pattern, fill_headers):
    mint = TokenMint()
    source = mint.source(n)
    fill = [Register(payload=mint.adversarial("fill"), header=h) for h in fill_headers]
    indexer = TrivialIndexerAgent()
    output = indexer.decode(apply_channel(indexer.encode(source), pattern, fill), n)
    return source, output, AuditorAgent().audit(source, output)


def test_trivial_headers():
    seq = TrivialIndexerAgent().encode(TokenMint().source(3))
    assert [r.header for r in seq] == ["1", "2", "3"]


def test_trivial_noiseless():
    _, output, ledger = _deliver_trivial(3, NoisePattern.identity(3), [])
    assert (ledger.corruptions, ledger.erasures, ledger.correct) == (0, 0, 3)
    assert all(r.header is None for r in output.entries)


def test_trivial_deletion_becomes_erasure():
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 3, 4], [])
    _, output, ledger = _deliver_trivial(4, pattern, [])
    assert output[1] is BOTTOM
    assert (ledger.corruptions, ledger.erasures) == (0, 1)
    assert ledger.half_errors <= pattern.p + pattern.q


def test_trivial_forgery_becomes_corruption():
    pattern = NoisePattern.from_slots(4, Fraction(1, 2), [1, 3, 4], [2])
    _, output, ledger = _deliver_trivial(4, pattern, ["2"])
    assert not output[1].payload.is_source
    assert (ledger.corruptions, ledger.erasures) == (1, 0)
    assert ledger.half_errors == 2 == pattern.p + pattern.q


def test_trivial_duplicate_claim_erases_both():
    pattern = NoisePattern.from_slots(3, Fraction(1, 3), [1, 2, 3], [3])
    _, output, ledger = _deliver_trivial(3, pattern, ["2"])
    assert output[1] is BOTTOM
    assert output.discarded == 2
    assert (ledger.corruptions, ledger.erasures) == (0, 1)


def test_trivial_ignores_non_canonical_headers():
    pattern = NoisePattern.from_slots(2, Fraction(1, 2), [1, 2], [1])
    _, _, ledger = _deliver_trivial(2, pattern, ["01"])
    assert ledger.correct == 2


def test_trivial_alphabet_grows_with_n():
    assert TrivialIndexerAgent.channel_alphabet(10) == 20


@pytest.mark.parametrize("n,budget", [(4, 2), (6, 2)])
def test_trivial_half_errors_exhaustive(n, budget):
    for pattern in enumerate_patterns(n, budget):
        for fill in exhaustive_fills(Scheme.TRIVIAL, pattern).values():
            ledger = run_indexing_once(Scheme.TRIVIAL, n, pattern, fill)
            assert ledger.half_errors <= pattern.p + pattern.q


def test_sync_headers_are_symbols():
    s = SyncString(content=(2, 0, 1), alphabet_size=3, epsilon=HALF)
    seq = SyncIndexerAgent(s).encode(TokenMint().source(3))
    assert [r.header for r in seq] == ["2", "0", "1"]


def test_sync_length_checked():
    s = SyncString(content=(0, 1), alphabet_size=2, epsilon=HALF)
    with pytest.raises(LengthMismatch):
        SyncIndexerAgent(s).encode(TokenMint().source(3))


def test_sync_single_deletion_on_distinct_string():
    s = SyncString(content=(0, 1, 2, 3), alphabet_size=4, epsilon=HALF)
    mint = TokenMint()
    source = mint.source(4)
    indexer = SyncIndexerAgent(s)
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 3, 4], [])
    output = indexer.decode(apply_channel(indexer.encode(source), pattern, []))
    ledger = AuditorAgent().audit(source, output)
    assert output.decoding.entries == (1, 3, 4)
    assert (ledger.corruptions, ledger.erasures) == (0, 1)
    assert len(output.claimants) == 3
    assert indexer.channel_alphabet() == 8


def test_sync_noiseless():
    s = SyncString(content=(0, 1, 0, 2), alphabet_size=3, epsilon=HALF)
    mint = TokenMint()
    source = mint.source(4)
    indexer = SyncIndexerAgent(s)
    output = indexer.decode(apply_channel(indexer.encode(source), NoisePattern.identity(4), []))
    assert AuditorAgent().audit(source, output).correct == 4


def test_sync_unreadable_insertion_keeps_positions_aligned():
    s = SyncString(content=(0, 1, 2, 3), alphabet_size=4, epsilon=HALF)
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 2, 3, 4], [3])
    ledger = run_indexing_once(Scheme.SYNC, 4, pattern, ["junk"], s)
    assert (ledger.misdecodings, ledger.half_errors, ledger.correct) == (0, 0, 4)

    # the trivial scheme already handled this input
    assert run_indexing_once(Scheme.TRIVIAL, 4, pattern, ["junk"]).half_errors == 0


def test_sync_decoding_covers_the_unreadable_slot():
    s = SyncString(content=(0, 1, 2, 3), alphabet_size=4, epsilon=HALF)
    mint = TokenMint()
    indexer = SyncIndexerAgent(s)
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 2, 3, 4], [3])
    fill = [Register(payload=mint.adversarial("fill"), header="9")]
    output = indexer.decode(apply_channel(indexer.encode(mint.source(4)), pattern, fill))
    assert output.decoding.entries == (1, 2, None, 3, 4)
    assert output.claimants[2] is None
    assert output.discarded == 1
    assert count_misdecodings(s, pattern, output.decoding).count == 0


def test_sync_premature_top_erases_the_rest():
    s = SyncString(content=(0, 1, 2, 3), alphabet_size=4, epsilon=HALF)
    mint = TokenMint()
    source = mint.source(4)
    indexer = SyncIndexerAgent(s)
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 2, 3, 4], [3])
    output = indexer.decode(apply_channel(indexer.encode(source), pattern, [TOP], allow_top=True))

    assert output.decoding.entries == (1, 2, None, None, None)
    assert output.discarded == 2
    report = count_misdecodings(s, pattern, output.decoding)
    assert report.count == 2
    assert report.details == [(4, 3, None), (5, 4, None)]
    ledger = AuditorAgent().audit(source, output, misdecodings=report.count)
    assert (ledger.correct, ledger.erasures, ledger.corruptions) == (2, 2, 0)


def test_sync_trailing_top_insertion_is_indistinguishable_from_padding():
    s = SyncString(content=(0, 1, 2, 3), alphabet_size=4, epsilon=HALF)
    mint = TokenMint()
    indexer = SyncIndexerAgent(s)
    pattern = NoisePattern.from_slots(4, Fraction(1, 4), [1, 2, 3, 4], [5])
    output = indexer.decode(apply_channel(indexer.encode(mint.source(4)), pattern, [TOP], allow_top=True))
    assert output.decoding.entries == (1, 2, 3, 4)
    assert count_misdecodings(s, pattern, output.decoding).count == 0
