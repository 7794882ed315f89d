"""Wire format, input model, and hypertest invariants."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfuzz.model import (
    MAX_PART_LEN,
    EncodingError,
    HyperInput,
    Hypertest,
    ObservationEntry,
    SecurityLabel,
    decode,
    encode,
)


def test_security_label_lattice():
    assert len(SecurityLabel) == 2
    assert SecurityLabel.HIGH > SecurityLabel.LOW


def test_encode_empty_parts():
    assert encode(HyperInput()) == bytes(8)


def test_encode_single_bytes():
    blob = encode(HyperInput(public=b"\x03", secret=b"\x05"))
    assert blob == b"\x01\x00\x00\x00\x01\x00\x00\x00\x03\x05"


def test_encode_rejects_oversized_parts():
    big = bytes(MAX_PART_LEN + 1)
    with pytest.raises(EncodingError):
        encode(HyperInput(public=big))
    with pytest.raises(EncodingError):
        encode(HyperInput(secret=big))


def test_encode_accepts_max_len_parts():
    part = bytes(MAX_PART_LEN)
    inp = HyperInput(public=part, secret=b"x")
    assert decode(encode(inp)) == inp


def test_decode_all_zero_header():
    assert decode(bytes(8)) == HyperInput()


def test_decode_clamps_public_first():
    # Declared public 5 but only 2 body bytes: public takes both, secret empty.
    raw = b"\x05\x00\x00\x00\x01\x00\x00\x00\xaa\xbb"
    assert decode(raw) == HyperInput(public=b"\xaa\xbb", secret=b"")


def test_decode_discards_surplus():
    raw = b"\x01\x00\x00\x00\x01\x00\x00\x00\x03\x05\xff"
    assert decode(raw) == HyperInput(public=b"\x03", secret=b"\x05")


def test_decode_short_header_zero_padded():
    # Header reads as [05 00 00 00 | 00 00 00 00] with no body bytes left.
    assert decode(b"\x05") == HyperInput()
    # One full length plus one header byte of the second length.
    assert decode(b"\x01\x00\x00\x00\x02") == HyperInput()


def test_decode_is_total_on_empty():
    assert decode(b"") == HyperInput()


@given(
    st.binary(max_size=2048),
    st.binary(max_size=2048),
)
def test_roundtrip(public, secret):
    inp = HyperInput(public=public, secret=secret)
    assert decode(encode(inp)) == inp


@given(st.binary(max_size=128))
def test_decode_total(raw):
    out = decode(raw)
    assert isinstance(out.public, bytes)
    assert isinstance(out.secret, bytes)
    assert len(out.public) + len(out.secret) <= max(0, len(raw) - 0)


@given(st.binary(max_size=512), st.binary(max_size=512))
def test_encode_injective_shape(public, secret):
    blob = encode(HyperInput(public=public, secret=secret))
    assert len(blob) == 8 + len(public) + len(secret)


def test_hypertest_invariants_enforced():
    with pytest.raises(ValueError):
        Hypertest(b"p", b"s", b"s", 1, 2)
    with pytest.raises(ValueError):
        Hypertest(b"p", b"a", b"b", 7, 7)
    ht = Hypertest(b"p", b"a", b"b", 1, 2)
    assert ht.output_hash_a != ht.output_hash_b


def test_observation_entry_defaults_independent():
    a, b = ObservationEntry(), ObservationEntry()
    a.secret_input_hashes.append(1)
    assert b.secret_input_hashes == []
