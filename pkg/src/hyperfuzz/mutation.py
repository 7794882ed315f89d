"""Havoc-style mutation with strict phase confinement.

A mutation phase names which part of the input may change: PublicOnly and
SecretOnly leave the other part byte-identical, Whole may touch both.
PublicOnly exists to populate the leak table with fresh public keys;
SecretOnly probes a fixed key with new secrets, which is what actually
witnesses a leak; Whole explores freely.

One call applies a stack of 1..16 (power-of-two biased) primitive mutators
drawn from a representative havoc set; length-changing mutators respect the
per-part size cap so every result still encodes.
"""

from __future__ import annotations

import random
from enum import Enum
from typing import Sequence

from .model import MAX_PART_LEN, HyperInput


class MutationPhase(Enum):
    PUBLIC_ONLY = "public_only"
    SECRET_ONLY = "secret_only"
    WHOLE = "whole"


class MutatorKind(Enum):
    BIT_FLIP = "bit_flip"
    BYTE_SET = "byte_set"
    BYTE_RANDOM = "byte_random"
    ARITH8 = "arith8"
    ARITH16 = "arith16"
    ARITH32 = "arith32"
    INTERESTING8 = "interesting8"
    INTERESTING16 = "interesting16"
    INTERESTING32 = "interesting32"
    BLOCK_DELETE = "block_delete"
    BLOCK_INSERT = "block_insert"
    BLOCK_DUPLICATE = "block_duplicate"
    SPLICE = "splice"


PhaseWeights = tuple[float, float, float]

DEFAULT_PHASE_WEIGHTS: PhaseWeights = (1.0, 1.0, 1.0)

_PHASES = (MutationPhase.PUBLIC_ONLY, MutationPhase.SECRET_ONLY, MutationPhase.WHOLE)

INTERESTING_8 = (-128, -1, 0, 1, 16, 32, 64, 100, 127)
INTERESTING_16 = INTERESTING_8 + (-32768, -129, 128, 255, 256, 512, 1000, 1024, 4096, 32767)
INTERESTING_32 = INTERESTING_16 + (
    -2147483648, -100663046, -32769, 32768, 65535, 65536, 100663045, 2147483647,
)

_ARITH_MAX = 35
_MAX_BLOCK = 32


def validate_phase_weights(weights: Sequence[float]) -> PhaseWeights:
    """Normalize-and-check: three non-negative weights, not all zero."""
    if len(weights) != 3:
        raise ValueError("phase weights must have exactly three entries")
    w = tuple(float(x) for x in weights)
    if any(x < 0 for x in w):
        raise ValueError("phase weights must be non-negative")
    if sum(w) <= 0:
        raise ValueError("phase weights must not all be zero")
    return w  # type: ignore[return-value]


def choose_phase(rng: random.Random, weights: PhaseWeights = DEFAULT_PHASE_WEIGHTS) -> MutationPhase:
    """Weighted draw over the three phases."""
    w = validate_phase_weights(weights)
    point = rng.random() * (w[0] + w[1] + w[2])
    if point < w[0]:
        return _PHASES[0]
    if point < w[0] + w[1]:
        return _PHASES[1]
    return _PHASES[2]


def _block_len(rng: random.Random, cap: int) -> int:
    return 1 + rng.randrange(min(cap, _MAX_BLOCK))


def _mut_bit_flip(buf: bytearray, rng: random.Random) -> bytearray:
    bit = rng.randrange(len(buf) * 8)
    buf[bit >> 3] ^= 1 << (bit & 7)
    return buf


def _mut_byte_set(buf: bytearray, rng: random.Random) -> bytearray:
    buf[rng.randrange(len(buf))] = rng.randrange(256)
    return buf


def _mut_byte_random(buf: bytearray, rng: random.Random) -> bytearray:
    # XOR with a non-zero value guarantees the byte actually changes.
    buf[rng.randrange(len(buf))] ^= rng.randrange(1, 256)
    return buf


def _mut_arith(buf: bytearray, rng: random.Random, width: int) -> bytearray:
    pos = rng.randrange(len(buf) - width + 1)
    endian = "little" if rng.getrandbits(1) else "big"
    delta = rng.randrange(1, _ARITH_MAX + 1)
    if rng.getrandbits(1):
        delta = -delta
    value = int.from_bytes(buf[pos:pos + width], endian)
    value = (value + delta) % (1 << (8 * width))
    buf[pos:pos + width] = value.to_bytes(width, endian)
    return buf


def _mut_interesting(buf: bytearray, rng: random.Random, width: int, table: Sequence[int]) -> bytearray:
    pos = rng.randrange(len(buf) - width + 1)
    endian = "little" if rng.getrandbits(1) else "big"
    value = rng.choice(table) % (1 << (8 * width))
    buf[pos:pos + width] = value.to_bytes(width, endian)
    return buf


def _mut_block_delete(buf: bytearray, rng: random.Random) -> bytearray:
    start = rng.randrange(len(buf))
    length = _block_len(rng, len(buf) - start)
    del buf[start:start + length]
    return buf


def _mut_block_insert(buf: bytearray, rng: random.Random) -> bytearray:
    room = MAX_PART_LEN - len(buf)
    if room <= 0:
        return buf
    length = _block_len(rng, room)
    pos = rng.randrange(len(buf) + 1)
    buf[pos:pos] = rng.randbytes(length)
    return buf


def _mut_block_duplicate(buf: bytearray, rng: random.Random) -> bytearray:
    room = MAX_PART_LEN - len(buf)
    if room <= 0:
        return buf
    start = rng.randrange(len(buf))
    length = min(_block_len(rng, len(buf) - start), room)
    block = buf[start:start + length]
    pos = rng.randrange(len(buf) + 1)
    buf[pos:pos] = block
    return buf


def _mut_splice(buf: bytearray, rng: random.Random, parts: Sequence[bytes]) -> bytearray:
    donor = parts[rng.randrange(len(parts))]
    keep = rng.randrange(len(buf) + 1)
    take = rng.randrange(len(donor) + 1) if donor else 0
    spliced = bytearray(buf[:keep])
    spliced += donor[take:][:MAX_PART_LEN - len(spliced)]
    return spliced


def _apply_one(buf: bytearray, rng: random.Random, parts: Sequence[bytes]) -> bytearray:
    """Pick one mutator eligible for the buffer's current length and apply it."""
    n = len(buf)
    if n == 0:
        kinds = [MutatorKind.BLOCK_INSERT]
    else:
        kinds = [
            MutatorKind.BIT_FLIP,
            MutatorKind.BYTE_SET,
            MutatorKind.BYTE_RANDOM,
            MutatorKind.ARITH8,
            MutatorKind.INTERESTING8,
            MutatorKind.BLOCK_DELETE,
            MutatorKind.BLOCK_INSERT,
            MutatorKind.BLOCK_DUPLICATE,
        ]
        if n >= 2:
            kinds += [MutatorKind.ARITH16, MutatorKind.INTERESTING16]
        if n >= 4:
            kinds += [MutatorKind.ARITH32, MutatorKind.INTERESTING32]
        if parts:
            kinds.append(MutatorKind.SPLICE)
    kind = kinds[rng.randrange(len(kinds))]

    if kind is MutatorKind.BIT_FLIP:
        return _mut_bit_flip(buf, rng)
    if kind is MutatorKind.BYTE_SET:
        return _mut_byte_set(buf, rng)
    if kind is MutatorKind.BYTE_RANDOM:
        return _mut_byte_random(buf, rng)
    if kind is MutatorKind.ARITH8:
        return _mut_arith(buf, rng, 1)
    if kind is MutatorKind.ARITH16:
        return _mut_arith(buf, rng, 2)
    if kind is MutatorKind.ARITH32:
        return _mut_arith(buf, rng, 4)
    if kind is MutatorKind.INTERESTING8:
        return _mut_interesting(buf, rng, 1, INTERESTING_8)
    if kind is MutatorKind.INTERESTING16:
        return _mut_interesting(buf, rng, 2, INTERESTING_16)
    if kind is MutatorKind.INTERESTING32:
        return _mut_interesting(buf, rng, 4, INTERESTING_32)
    if kind is MutatorKind.BLOCK_DELETE:
        return _mut_block_delete(buf, rng)
    if kind is MutatorKind.BLOCK_INSERT:
        return _mut_block_insert(buf, rng)
    if kind is MutatorKind.BLOCK_DUPLICATE:
        return _mut_block_duplicate(buf, rng)
    return _mut_splice(buf, rng, parts)


def mutate(
    base: HyperInput,
    phase: MutationPhase,
    rng: random.Random,
    corpus: Sequence[HyperInput] = (),
) -> HyperInput:
    """Produce a mutant of ``base`` confined to ``phase``.

    Applies 1, 2, 4, 8, or 16 stacked primitive mutations (uniform over the
    exponent).  Splice donors come from the matching part of corpus members.
    The result may equal ``base``; callers rely on the oracle, not the
    mutator, to filter duplicates.
    """
    public = bytearray(base.public)
    secret = bytearray(base.secret)
    stack = 1 << rng.randrange(5)
    for _ in range(stack):
        if phase is MutationPhase.PUBLIC_ONLY:
            mutate_public = True
        elif phase is MutationPhase.SECRET_ONLY:
            mutate_public = False
        else:
            mutate_public = bool(rng.getrandbits(1))
        if mutate_public:
            donors = [c.public for c in corpus]
            public = _apply_one(public, rng, donors)
        else:
            donors = [c.secret for c in corpus]
            secret = _apply_one(secret, rng, donors)
    return HyperInput(public=bytes(public), secret=bytes(secret))
