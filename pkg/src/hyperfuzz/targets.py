"""Built-in target corpus: small programs with known leak/no-leak ground truth.

Each target reads a public part and a secret part, may scribble in the
executor-provided arena, reports edge ids through ``cov``, and returns its
public output.  Missing bytes read as zero so every target is total on all
byte-string pairs.  ``expected_leak`` records the ground truth used by the
exhaustive checker and the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .executor import MemoryArena, TargetFn

EdgeFn = Callable[[int], None]


class LeakClass(Enum):
    EXPLICIT_FLOW = "explicit_flow"
    IMPLICIT_FLOW = "implicit_flow"
    MEMORY_PADDING = "memory_padding"
    MEMORY_OVER_READ = "memory_over_read"
    NONE = "none"
    FLAKY = "flaky"

    @property
    def leaks(self) -> bool:
        return self not in (LeakClass.NONE, LeakClass.FLAKY)


def _byte(data: bytes, idx: int) -> int:
    return data[idx] if idx < len(data) else 0


def is_large(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Classic explicit leak: one output bit reveals whether secret[0] > 2."""
    cov(1)
    if _byte(secret, 0) > 2:
        cov(2)
        return b"\x01"
    cov(3)
    return b"\x00"


def leaky_example(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Output is public[0], bumped by one when secret[0] > 2."""
    cov(1)
    p0 = _byte(public, 0)
    if _byte(secret, 0) > 2:
        cov(2)
        return bytes([(p0 + 1) & 0xFF])
    cov(3)
    return bytes([p0])


def total_leak(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Worst case: echoes the whole secret."""
    cov(1)
    if secret:
        cov(2)
    return secret


def password_check_toy(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Authentication oracle: reveals whether the guess equals the secret."""
    cov(1)
    if public == secret:
        cov(2)
        return b"\x01"
    cov(3)
    return b"\x00"


def parity_implicit(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Implicit flow: the branch taken, not the data, leaks secret parity."""
    cov(1)
    if _byte(secret, 0) & 1:
        cov(2)
        out = b"\x01"
    else:
        cov(3)
        out = b"\x00"
    return out


def padding_struct(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Models sending a C struct {char direction; int distance} over the wire.

    Only bytes 0 and 4..7 of the 8-byte record are written; bytes 1..3 are
    alignment padding and ship with whatever the allocator left there: the
    secret-derived fill pattern, or zeros when poisoning is off.
    """
    cov(1)
    cells = arena.cells
    cells[0] = _byte(public, 0)
    cells[4:8] = public[1:5].ljust(4, b"\x00")
    if len(public) >= 5:
        cov(2)
    else:
        cov(3)
    return bytes(cells[0:8])


def over_read(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Buffer over-read: outputs L = public[0] bytes from a 16-byte buffer
    that only holds len(public)-1 payload bytes; the tail is allocator fill."""
    cov(1)
    length = min(_byte(public, 0), 16)
    payload = public[1:17]
    arena.cells[0:len(payload)] = payload
    if length > 0:
        cov(2)
    else:
        cov(3)
    if payload:
        cov(4)
    if length > len(payload):
        cov(5)
    return bytes(arena.cells[0:length])


def constant_safe(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """No flow at all: constant output."""
    cov(1)
    return b"\x00"


def sum_safe(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
    """Public-only flow: byte sum of the public part, mod 256."""
    cov(1)
    if public:
        cov(2)
    return bytes([sum(public) & 0xFF])


def make_flaky_counter() -> TargetFn:
    """Nondeterministic non-leak: output is a per-executor execution counter.

    Every rerun differs, so the flakiness filter must discard every suspected
    pair here; each executor gets a fresh counter via this factory.
    """
    state = {"n": 0}

    def flaky_counter(public: bytes, secret: bytes, arena: MemoryArena, cov: EdgeFn) -> bytes:
        cov(1)
        state["n"] += 1
        return state["n"].to_bytes(4, "little")

    return flaky_counter


def _stateless(fn: TargetFn) -> Callable[[], TargetFn]:
    return lambda: fn


@dataclass(frozen=True)
class BuiltinTarget:
    """Registry row: factory returns a fresh target function per campaign."""

    name: str
    factory: Callable[[], TargetFn]
    leak_class: LeakClass
    summary: str

    @property
    def expected_leak(self) -> bool:
        return self.leak_class.leaks


_REGISTRY: dict[str, BuiltinTarget] = {}


def _register(name: str, factory: Callable[[], TargetFn], leak_class: LeakClass, summary: str) -> None:
    _REGISTRY[name] = BuiltinTarget(name, factory, leak_class, summary)


_register("isLarge", _stateless(is_large), LeakClass.EXPLICIT_FLOW,
          "one-bit explicit leak of secret[0] > 2")
_register("leakyExample", _stateless(leaky_example), LeakClass.EXPLICIT_FLOW,
          "public[0] bumped when secret[0] > 2")
_register("totalLeak", _stateless(total_leak), LeakClass.EXPLICIT_FLOW,
          "echoes the entire secret")
_register("passwordCheckToy", _stateless(password_check_toy), LeakClass.IMPLICIT_FLOW,
          "equality oracle public == secret")
_register("parityImplicit", _stateless(parity_implicit), LeakClass.IMPLICIT_FLOW,
          "implicit flow of secret parity")
_register("paddingStruct", _stateless(padding_struct), LeakClass.MEMORY_PADDING,
          "struct padding bytes ship allocator fill")
_register("overRead", _stateless(over_read), LeakClass.MEMORY_OVER_READ,
          "over-read past payload into allocator fill")
_register("constantSafe", _stateless(constant_safe), LeakClass.NONE,
          "constant output")
_register("sumSafe", _stateless(sum_safe), LeakClass.NONE,
          "byte sum of public part only")
_register("flakyCounter", make_flaky_counter, LeakClass.FLAKY,
          "nondeterministic execution counter")


def target_names() -> list[str]:
    return list(_REGISTRY)


def get_target(name: str) -> BuiltinTarget:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown builtin target {name!r}; known: {', '.join(_REGISTRY)}") from None


def evaluate_builtin(name: str, public: bytes, secret: bytes, arena: MemoryArena) -> bytes:
    """Run a registered target once against a caller-prepared arena."""
    return get_target(name).factory()(public, secret, arena, lambda _edge: None)
