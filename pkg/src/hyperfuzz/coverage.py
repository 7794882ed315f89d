"""Edge-coverage maps with AFL-style hit-count bucketing.

A map is 65536 saturating 8-bit counters indexed by edge id.  Novelty is
judged on bucketized counts, not raw counts, so loop iteration jitter does not
flood the queue: a run is interesting only if some edge lands in a strictly
higher bucket than the global maximum seen so far.
"""

from __future__ import annotations

from .hashing import Hash64, hash64

MAP_SIZE = 65536

# Count -> bucket index: 0, 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128-255.
_BUCKET_BOUNDS = (0, 1, 2, 3, 7, 15, 31, 127, 255)


def _build_bucket_table() -> bytes:
    table = bytearray(256)
    for count in range(256):
        for idx, bound in enumerate(_BUCKET_BOUNDS):
            if count <= bound:
                table[count] = idx
                break
    return bytes(table)


BUCKET_TABLE = _build_bucket_table()

_ZERO_MAP = bytes(MAP_SIZE)


def bucket_of(count: int) -> int:
    """Bucket index (0..8) for a raw hit count (0..255)."""
    return BUCKET_TABLE[count]


class CoverageMap:
    """65536 saturating 8-bit edge counters plus the set of touched indices.

    The counter array is allocated lazily; maps that never record anything
    (e.g. flakiness reruns) cost nothing.
    """

    __slots__ = ("counts", "touched")

    def __init__(self) -> None:
        self.counts: bytearray | None = None
        self.touched: set[int] = set()

    def record(self, edge: int) -> None:
        """Increment the saturating counter for ``edge`` (masked into range)."""
        idx = edge & (MAP_SIZE - 1)
        counts = self.counts
        if counts is None:
            counts = self.counts = bytearray(MAP_SIZE)
        current = counts[idx]
        if current < 255:
            counts[idx] = current + 1
        self.touched.add(idx)

    @classmethod
    def from_raw(cls, buf: bytes) -> "CoverageMap":
        """Adopt a raw 65536-byte counter region (e.g. a shared-memory dump)."""
        if len(buf) != MAP_SIZE:
            raise ValueError(f"coverage buffer must be {MAP_SIZE} bytes, got {len(buf)}")
        cov = cls()
        if buf.count(0) != MAP_SIZE:
            cov.counts = bytearray(buf)
            # Chunked scan keeps the common all-zero tail cheap.
            step = 4096
            touched = cov.touched
            for base in range(0, MAP_SIZE, step):
                chunk = buf[base:base + step]
                if chunk.count(0) == step:
                    continue
                for off, value in enumerate(chunk):
                    if value:
                        touched.add(base + off)
        return cov

    def bucketized(self) -> bytes:
        """Full map with every counter replaced by its bucket index."""
        if self.counts is None:
            return _ZERO_MAP
        return bytes(self.counts).translate(BUCKET_TABLE)

    def digest(self) -> Hash64:
        """Hash of the bucketized map; names queue entries on disk."""
        return hash64(self.bucketized())


def is_interesting(run: CoverageMap, global_map: CoverageMap) -> bool:
    """True iff ``run`` reaches a strictly higher bucket on any edge.

    ``global_map`` stores bucket indices (the per-edge maximum bucket observed
    across the campaign) and is updated in place whenever novelty is found.
    """
    run_counts = run.counts
    if run_counts is None:
        return False
    global_counts = global_map.counts
    if global_counts is None:
        global_counts = global_map.counts = bytearray(MAP_SIZE)
    table = BUCKET_TABLE
    novel = False
    for idx in run.touched:
        if table[run_counts[idx]] > global_counts[idx]:
            novel = True
            break
    if not novel:
        return False
    for idx in run.touched:
        bucket = table[run_counts[idx]]
        if bucket > global_counts[idx]:
            global_counts[idx] = bucket
        global_map.touched.add(idx)
    return True
