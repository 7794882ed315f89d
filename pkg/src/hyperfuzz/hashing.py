"""64-bit fingerprints for inputs, outputs, and coverage maps.

All equality decisions in the leak table operate on these fingerprints, so the
function must be fast, stable across runs, and bit-exact to the published
XXH64 algorithm: corpora and report files produced here stay comparable with
anything else that speaks XXH64.
"""

from __future__ import annotations

import struct

Hash64 = int

_P1 = 0x9E3779B185EBCA87
_P2 = 0xC2B2AE3D27D4EB4F
_P3 = 0x165667B19E3779F9
_P4 = 0x85EBCA77C2B2AE63
_P5 = 0x27D4EB2F165667C5

_MASK = 0xFFFFFFFFFFFFFFFF

_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")


def _rotl(value: int, shift: int) -> int:
    return ((value << shift) | (value >> (64 - shift))) & _MASK


def _round(acc: int, lane: int) -> int:
    acc = (acc + lane * _P2) & _MASK
    return (_rotl(acc, 31) * _P1) & _MASK


def _merge_round(acc: int, lane: int) -> int:
    acc ^= _round(0, lane)
    return (acc * _P1 + _P4) & _MASK


def hash64(data: bytes, seed: int = 0) -> Hash64:
    """XXH64 of ``data`` with the given seed, as an unsigned 64-bit int."""
    length = len(data)
    pos = 0

    if length >= 32:
        v1 = (seed + _P1 + _P2) & _MASK
        v2 = (seed + _P2) & _MASK
        v3 = seed & _MASK
        v4 = (seed - _P1) & _MASK
        limit = length - 32
        while pos <= limit:
            v1 = _round(v1, _U64.unpack_from(data, pos)[0])
            v2 = _round(v2, _U64.unpack_from(data, pos + 8)[0])
            v3 = _round(v3, _U64.unpack_from(data, pos + 16)[0])
            v4 = _round(v4, _U64.unpack_from(data, pos + 24)[0])
            pos += 32
        acc = (_rotl(v1, 1) + _rotl(v2, 7) + _rotl(v3, 12) + _rotl(v4, 18)) & _MASK
        acc = _merge_round(acc, v1)
        acc = _merge_round(acc, v2)
        acc = _merge_round(acc, v3)
        acc = _merge_round(acc, v4)
    else:
        acc = (seed + _P5) & _MASK

    acc = (acc + length) & _MASK

    while pos + 8 <= length:
        acc ^= _round(0, _U64.unpack_from(data, pos)[0])
        acc = (_rotl(acc, 27) * _P1 + _P4) & _MASK
        pos += 8
    if pos + 4 <= length:
        acc ^= (_U32.unpack_from(data, pos)[0] * _P1) & _MASK
        acc = (_rotl(acc, 23) * _P2 + _P3) & _MASK
        pos += 4
    while pos < length:
        acc ^= (data[pos] * _P5) & _MASK
        acc = (_rotl(acc, 11) * _P1) & _MASK
        pos += 1

    acc ^= acc >> 33
    acc = (acc * _P2) & _MASK
    acc ^= acc >> 29
    acc = (acc * _P3) & _MASK
    acc ^= acc >> 32
    return acc


def hash_hex(value: Hash64) -> str:
    """Render a hash as exactly 16 lowercase hex digits (report file format)."""
    return f"{value:016x}"
