from fractions import Fraction

import pytest

from agents.adversary import get_adversary, pattern_from_edits
from agents.alice import AliceEncoderAgent, alice_encode
from agents.bob import BobDecoderAgent, bob_decode
from channel.insdel_channel import apply_channel
from protocol.qubit_protocol import DataQubit, derive_params
from schemas.errors import ParamMismatch
from schemas.noise import NoisePattern
from schemas.registers import Alphabet, ClassicalData, MeasurementPolicy, PolicyKind, TokenMint
from sync.sync_string import SyncString, construct_sync_string

HALF = Fraction(1, 2)


@pytest.fixture
def setup():
    params = derive_params(64, Fraction(1, 16))
    s = construct_sync_string(params.N, HALF, Alphabet(size=16), seed=0)
    mint = TokenMint()
    transcript = alice_encode(mint.source(params.n), params, s, mint)
    return params, s, mint, transcript


def _wire_delta(params, edits):
    return Fraction(edits, params.wire_length)


def test_alice_frames_every_chunk(setup):
    params, s, _, transcript = setup
    stream = list(transcript.stream)
    assert len(stream) == params.wire_length
    for i in range(params.N):
        chunk = stream[i * params.chunk_length:(i + 1) * params.chunk_length]
        assert chunk[0] == ClassicalData(1)
        assert chunk[1:1 + params.s] == [ClassicalData(0)] * params.s
        symbol = int("".join(str(e.value) for e in chunk[1 + params.s:1 + params.s + params.l]), 2)
        assert symbol == s.symbol(i + 1)
        data = chunk[1 + params.s + params.l:]
        assert all(isinstance(e, DataQubit) and e.chunk == i + 1 for e in data)
        assert [e.pos for e in data] == list(range(1, params.r_prime + 1))
    assert [len(m) for m in transcript.members] == [params.r] * params.N


def test_alice_checks_inputs(setup):
    params, s, _, _ = setup
    with pytest.raises(ParamMismatch):
        alice_encode(TokenMint().source(params.n - 1), params, s)
    short = SyncString(content=(0, 1), alphabet_size=16, epsilon=HALF)
    with pytest.raises(ParamMismatch):
        AliceEncoderAgent(params, short)
    wide = SyncString(content=tuple(range(params.N)), alphabet_size=32, epsilon=HALF)
    with pytest.raises(ParamMismatch):
        AliceEncoderAgent(params, wide)


def test_noiseless_round_trip(setup):
    params, s, mint, transcript = setup
    wire = apply_channel(transcript.stream, NoisePattern.identity(params.wire_length), [])
    output, ledger = bob_decode(wire, params, s, transcript, MeasurementPolicy(PolicyKind.ADVERSARIAL), mint)
    assert ledger.correct == params.N
    assert (ledger.corruptions, ledger.erasures, ledger.chunk_errors) == (0, 0, 0)
    assert (ledger.qubit_corruptions, ledger.qubit_erasures, ledger.scan_reads) == (0, 0, 0)
    assert ledger.block_cover == []
    assert all(r.payload is t for r, t in zip(output.entries, transcript.chunk_tokens))


def test_deleted_data_qubit(setup):
    params, s, mint, transcript = setup
    # chunk 2 starts at wire position 26; its data slots are 39..50
    pattern = pattern_from_edits(params.wire_length, _wire_delta(params, 1), [40], [])
    wire = apply_channel(transcript.stream, pattern, [])
    output, ledger = bob_decode(wire, params, s, transcript, MeasurementPolicy(PolicyKind.ADVERSARIAL), mint)
    assert ledger.chunk_errors <= 3
    assert ledger.lost_systems == 2 and ledger.added_systems == 1
    # chunk 3's data qubits were read while hunting for the next barrier
    assert ledger.scan_reads == params.r_prime
    assert ledger.damaged == list(range(9, 25))
    assert ledger.correct == params.N - 2


def test_bit_inside_barrier(setup):
    params, s, mint, transcript = setup
    pattern = pattern_from_edits(params.wire_length, _wire_delta(params, 1), [], [30])
    wire = apply_channel(transcript.stream, pattern, [ClassicalData(1)])
    _, ledger = bob_decode(wire, params, s, transcript, MeasurementPolicy(PolicyKind.ADVERSARIAL), mint)
    assert ledger.chunk_errors <= 2
    assert ledger.qubit_erasures + ledger.qubit_corruptions <= 2 * params.r


def test_always_fail_policy_erases_damaged_block(setup):
    params, s, mint, transcript = setup
    pattern = pattern_from_edits(params.wire_length, _wire_delta(params, 1), [40], [])
    wire = apply_channel(transcript.stream, pattern, [])
    output, ledger = bob_decode(wire, params, s, transcript, MeasurementPolicy(PolicyKind.ALWAYS_FAIL), mint)
    assert ledger.corruptions == 0
    assert ledger.qubit_corruptions == 0


@pytest.mark.parametrize("adversary", ["uniform-random-insdel", "burst-delete", "burst-insert",
                                       "barrier-attacker", "index-forging"])
def test_budgeted_attacks_keep_output_shape(setup, adversary):
    params, s, mint, transcript = setup
    attack = get_adversary(adversary, barrier=params.s).attack(
        transcript.stream, _wire_delta(params, 4), 1, mint)
    wire = apply_channel(transcript.stream, attack.pattern, attack.fill)
    output, ledger = bob_decode(wire, params, s, transcript, MeasurementPolicy(PolicyKind.UNIFORM, seed=1), mint)
    assert len(output) == params.N
    assert ledger.corruptions + ledger.erasures + ledger.correct == params.N
    assert len(ledger.block_cover) <= len(ledger.damaged)


def test_gather_stops_at_max_systems(setup):
    params, s, mint, transcript = setup
    bob = BobDecoderAgent(params, s, mint=mint)
    gathered = bob.gather(transcript.stream)
    assert len(gathered.systems) == params.N <= params.max_systems
    assert [r.header for r in gathered.systems] == [str(s.symbol(i)) for i in range(1, params.N + 1)]
