"""Main memory image and the cache-frame to ECC-slot address mapping."""

import struct
from dataclasses import dataclass

from .codec import BLOCK_SIZE
from .errors import UsageError

ZERO_BLOCK = bytes(BLOCK_SIZE)
GROUP_SIZE = 8  # block-ECCs per 64-byte memory block
DEFAULT_ECC_REGION_BASE = 1 << 36

_DUMP_RECORD = struct.Struct("<Q64s")


class MemoryImage:
    """Sparse block-addressed store; unwritten blocks read as zeros."""

    def __init__(self, blocks=None):
        self._blocks = {}
        if blocks:
            for addr, data in blocks.items():
                self.write_block(addr, data)

    @staticmethod
    def _check(addr):
        if addr < 0 or addr % BLOCK_SIZE:
            raise UsageError(f"memory address {addr:#x} is not {BLOCK_SIZE}-byte aligned")

    def read_block(self, addr):
        self._check(addr)
        return self._blocks.get(addr, ZERO_BLOCK)

    def write_block(self, addr, block):
        self._check(addr)
        if len(block) != BLOCK_SIZE:
            raise UsageError(f"block must be {BLOCK_SIZE} bytes")
        self._blocks[addr] = bytes(block)

    def __contains__(self, addr):
        return addr in self._blocks

    def __len__(self):
        return len(self._blocks)

    def items(self):
        return sorted(self._blocks.items())

    def region(self, lo=0, hi=None):
        """Copy of the non-zero blocks with ``lo <= addr < hi``.

        Zero blocks are dropped so images that differ only in which blocks
        were materialised compare equal.
        """
        return {
            a: d
            for a, d in self._blocks.items()
            if a >= lo and (hi is None or a < hi) and d != ZERO_BLOCK
        }

    def copy(self):
        m = MemoryImage()
        m._blocks = dict(self._blocks)
        return m

    def dump(self, fp):
        """Write ``(address u64 LE, 64-byte payload)`` records in address order."""
        for addr, data in self.items():
            fp.write(_DUMP_RECORD.pack(addr, data))

    @classmethod
    def load(cls, fp):
        m = cls()
        raw = fp.read()
        if len(raw) % _DUMP_RECORD.size:
            raise UsageError("truncated memory dump")
        for addr, data in _DUMP_RECORD.iter_unpack(raw):
            m.write_block(addr, data)
        return m


@dataclass(frozen=True)
class EccGeometry:
    """Where the block-ECC of every L2 frame lives in memory.

    Eight frames with the same way number and eight consecutive set indices
    (``8k .. 8k+7``) share one 64-byte ECC block.
    """

    l2_sets: int
    l2_ways: int
    ecc_region_base: int = DEFAULT_ECC_REGION_BASE

    def __post_init__(self):
        if self.l2_sets <= 0 or self.l2_sets % GROUP_SIZE:
            raise UsageError(f"l2_sets must be a positive multiple of {GROUP_SIZE}")
        if self.l2_ways <= 0:
            raise UsageError("l2_ways must be positive")
        if self.ecc_region_base % BLOCK_SIZE:
            raise UsageError("ecc_region_base must be block aligned")

    @property
    def region_size(self):
        return self.l2_sets * self.l2_ways * 8

    @property
    def region_end(self):
        return self.ecc_region_base + self.region_size

    def in_region(self, addr):
        return self.ecc_region_base <= addr < self.region_end


def ecc_address(set_index, way, geom):
    """``(block_addr, byte_offset)`` of the 8-byte ECC slot for an L2 frame."""
    if not 0 <= set_index < geom.l2_sets:
        raise UsageError(f"set {set_index} out of range [0, {geom.l2_sets})")
    if not 0 <= way < geom.l2_ways:
        raise UsageError(f"way {way} out of range [0, {geom.l2_ways})")
    group = way * (geom.l2_sets // GROUP_SIZE) + set_index // GROUP_SIZE
    return geom.ecc_region_base + BLOCK_SIZE * group, 8 * (set_index % GROUP_SIZE)


def adjacent_sets(set_index):
    """Set indices sharing an ECC block with ``set_index`` (same way)."""
    first = set_index - set_index % GROUP_SIZE
    return range(first, first + GROUP_SIZE)
