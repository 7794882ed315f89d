"""Core data model: labeled two-part inputs, the wire encoding, and hypertests.

A test case is a pair of byte strings: a public (attacker-visible) part and a
secret part.  Noninterference requires that two executions agreeing on the
public part produce byte-identical public output regardless of the secrets; a
``Hypertest`` is a concrete witness that a target violates this.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

from .hashing import Hash64

# Hard cap on each part so encoded inputs stay bounded at 4 GiB-proof sizes.
MAX_PART_LEN = 1 << 20

_HEADER = struct.Struct("<II")


class SecurityLabel(IntEnum):
    """Information-flow label; HIGH (secret) strictly dominates LOW (public)."""

    LOW = 0
    HIGH = 1


@dataclass(frozen=True, slots=True)
class HyperInput:
    """One generated test case: public part feeds the attacker-visible channel,
    secret part must not influence it."""

    public: bytes = b""
    secret: bytes = b""


class EncodingError(ValueError):
    """Raised when an input cannot be serialized to the wire format."""


def encode(inp: HyperInput) -> bytes:
    """Serialize to ``[publicLen u32 LE][secretLen u32 LE][public][secret]``."""
    if len(inp.public) > MAX_PART_LEN:
        raise EncodingError(f"public part {len(inp.public)} exceeds {MAX_PART_LEN}")
    if len(inp.secret) > MAX_PART_LEN:
        raise EncodingError(f"secret part {len(inp.secret)} exceeds {MAX_PART_LEN}")
    return _HEADER.pack(len(inp.public), len(inp.secret)) + inp.public + inp.secret


def decode(raw: bytes) -> HyperInput:
    """Parse the wire format; total on all byte strings.

    Missing header bytes read as zero, declared lengths are clamped to the
    available body (public part wins bytes first), surplus body is discarded.
    """
    header = bytes(raw[:8]).ljust(8, b"\x00")
    public_len, secret_len = _HEADER.unpack(header)
    body = bytes(raw[8:])
    public = body[:public_len]
    secret = body[len(public):len(public) + secret_len]
    return HyperInput(public=public, secret=secret)


@dataclass(frozen=True)
class Hypertest:
    """Witness of a leak: same public input, two secrets, differing outputs.

    Constructing one with equal secrets or equal output hashes is a logic
    error and rejected outright.
    """

    public: bytes
    secret_a: bytes
    secret_b: bytes
    output_hash_a: Hash64
    output_hash_b: Hash64

    def __post_init__(self) -> None:
        if self.secret_a == self.secret_b:
            raise ValueError("hypertest secrets must differ")
        if self.output_hash_a == self.output_hash_b:
            raise ValueError("hypertest output hashes must differ")


@dataclass(slots=True)
class ObservationEntry:
    """Per-public-key record in the leak table.

    Hash lists grow in lockstep (one secret hash per output hash); full
    secrets are kept for at most a bounded suffix of observations so that a
    confirmed leak can always be replayed from concrete inputs.
    """

    secret_input_hashes: list[Hash64] = field(default_factory=list)
    public_output_hashes: list[Hash64] = field(default_factory=list)
    secret_inputs_full: list[bytes] = field(default_factory=list)
