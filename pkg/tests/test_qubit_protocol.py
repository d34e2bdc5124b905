from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agents.alice import alice_encode
from protocol.qubit_protocol import (NOT_IN_IMAGE, DigitEncoding, E0Code, barrier_offsets, block_cover,
                                     classical_skeleton, decode_E0, derive_params, digit_count, dump_wire,
                                     encode_E0, parse_wire, stray_zero_runs)
from schemas.errors import InfeasibleParams, LengthMismatch
from schemas.ledger import ErrorLedger
from schemas.registers import TOP, Alphabet, ClassicalData, TokenMint
from sync.sync_string import construct_sync_string


def test_params_for_one_sixty_fourth():
    params = derive_params(1000, Fraction(1, 64))
    assert (params.r, params.s, params.N) == (20, 12, 52)
    assert params.digits == 4 and params.r_prime == 24
    assert params.pad == 52 * 20 - 1000
    assert params.max_systems == 53


def test_params_reject_bad_ranges():
    with pytest.raises(InfeasibleParams):
        derive_params(1000, Fraction(1, 4))
    with pytest.raises(InfeasibleParams):
        derive_params(10, Fraction(1, 64))
    # l must fit in half a barrier
    with pytest.raises(InfeasibleParams):
        derive_params(1000, Fraction(1, 64), l=7)
    # 2 symbols cannot host a sync string of length 52
    with pytest.raises(InfeasibleParams):
        derive_params(1000, Fraction(1, 64), l=1)


def test_params_without_power_of_two():
    params = derive_params(500, Fraction(1, 10))
    assert params.s % 2 == 0
    assert params.N * params.r >= params.n


def test_digit_count():
    assert digit_count(4, 4) == 3
    assert digit_count(2, 4) == 2
    assert digit_count(20, 12) == 4


def test_digit_map():
    enc = DigitEncoding(2)
    assert [enc.to_bits(d) for d in range(3)] == ["01", "10", "11"]
    assert enc.from_bits("00") is None
    with pytest.raises(ValueError):
        enc.to_bits(3)


def test_e0_examples():
    code = E0Code(r=4, s=4)
    assert encode_E0("0101", code) == "011011"
    assert decode_E0("011011", code) == "0101"
    assert encode_E0("0000", code) == "010101"
    assert decode_E0("000110", code) is NOT_IN_IMAGE
    assert decode_E0("111111", code) is NOT_IN_IMAGE


def test_e0_length_checks():
    code = E0Code(r=4, s=4)
    with pytest.raises(LengthMismatch):
        encode_E0("010", code)
    with pytest.raises(LengthMismatch):
        decode_E0("0101", code)


@pytest.mark.parametrize("r,s", [(2, 4), (4, 4), (5, 6), (6, 8)])
def test_e0_is_injective_and_zero_free(r, s):
    code = E0Code(r=r, s=s)
    images = set()
    for bits in product("01", repeat=r):
        chunk = "".join(bits)
        image = encode_E0(chunk, code)
        assert len(image) == code.r_prime
        assert "0" * s not in image
        assert all(image[k:k + s // 2] != "0" * (s // 2) for k in range(0, len(image), s // 2))
        assert decode_E0(image, code) == chunk
        images.add(image)
    assert len(images) == 2 ** r


@given(st.text(alphabet="01", min_size=6, max_size=6))
@settings(max_examples=64)
def test_decode_accepts_only_the_image(wire):
    code = E0Code(r=4, s=4)
    decoded = decode_E0(wire, code)
    if decoded is NOT_IN_IMAGE:
        assert all(encode_E0("".join(b), code) != wire for b in product("01", repeat=4))
    else:
        assert encode_E0(decoded, code) == wire


def _small_protocol():
    params = derive_params(64, Fraction(1, 16))
    s = construct_sync_string(params.N, Fraction(1, 2), Alphabet(size=16), seed=0)
    return params, s


def test_small_protocol_params():
    params, s = _small_protocol()
    assert (params.r, params.N, params.s, params.r_prime) == (8, 8, 8, 12)
    assert params.chunk_length == 25 and params.wire_length == 200


def test_stream_has_only_barrier_zero_runs():
    params, s = _small_protocol()
    stream = alice_encode(TokenMint().source(params.n), params, s).stream
    for chunks in (None, ["11111111"] * params.N, ["00000000", "10000000"] * (params.N // 2)):
        bits = classical_skeleton(stream, params, chunks)
        assert stray_zero_runs(bits, params) == []
        assert barrier_offsets(bits, params.s) == [k * params.chunk_length for k in range(params.N)]


def test_block_cover_of_one_chunk():
    params, _ = _small_protocol()
    assert block_cover(ErrorLedger(n=params.n), params) == []
    ledger = ErrorLedger(n=params.n, damaged=list(range(9, 17)))
    assert block_cover(ledger, params) == [(9, 8)]


def test_wire_dump():
    params, s = _small_protocol()
    stream = alice_encode(TokenMint().source(params.n), params, s).stream
    text = dump_wire(list(stream)[:params.chunk_length] + [TOP])
    parsed = parse_wire(text)
    assert parsed[0] == ("C", 1)
    assert parsed[1:1 + params.s] == [("C", 0)] * params.s
    assert parsed[-2] == ("D", 1, params.r_prime)
    assert parsed[-1] == ("T",)
    with pytest.raises(ValueError):
        parse_wire("X9\n")
    with pytest.raises(ValueError):
        dump_wire([ClassicalData(0), "junk"])
