"""Set-associative write-back cache with true LRU and per-line parity."""

from dataclasses import dataclass

from .codec import BLOCK_SIZE, parity_signature
from .errors import UsageError


@dataclass(frozen=True)
class CacheGeometry:
    capacity: int
    ways: int
    latency: int = 1
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.block_size != BLOCK_SIZE:
            raise UsageError(f"only {BLOCK_SIZE}-byte blocks are supported")
        if self.ways <= 0 or self.capacity <= 0:
            raise UsageError("capacity and ways must be positive")
        lines, rem = divmod(self.capacity, self.block_size)
        if rem or lines % self.ways:
            raise UsageError(
                f"capacity {self.capacity} is not a multiple of ways*block_size"
            )
        sets = lines // self.ways
        if sets & (sets - 1):
            raise UsageError(f"set count {sets} is not a power of two")

    @property
    def sets(self):
        return self.capacity // (self.block_size * self.ways)

    @property
    def lines(self):
        return self.capacity // self.block_size


@dataclass(frozen=True)
class LineMeta:
    tag: int
    valid: bool
    dirty: bool
    lru_rank: int
    parity: int


@dataclass(frozen=True)
class Victim:
    addr: int
    data: bytes
    dirty: bool
    set: int
    way: int


class Cache:
    """Tag/data arrays for one cache level.

    Lines are identified by block address. ``lookup`` does not update
    recency; callers ``touch`` explicitly. LRU rank 0 is most recently used.
    """

    def __init__(self, geometry, name="cache", track_parity=True):
        self.geometry = geometry
        self.name = name
        self.track_parity = track_parity
        self.sets = geometry.sets
        self.ways = geometry.ways
        self._set_mask = self.sets - 1
        zero = bytes(BLOCK_SIZE)
        self.addr = [[None] * self.ways for _ in range(self.sets)]
        self.data = [[zero] * self.ways for _ in range(self.sets)]
        self.dirty = [[False] * self.ways for _ in range(self.sets)]
        self.parity = [[0] * self.ways for _ in range(self.sets)]
        self.rank = [list(range(self.ways)) for _ in range(self.sets)]
        self._where = {}  # block addr -> way

    def set_index(self, addr):
        return (addr // BLOCK_SIZE) & self._set_mask

    def tag(self, addr):
        return addr // (BLOCK_SIZE * self.sets)

    def lookup(self, addr):
        """``(set, way)`` on a hit, ``(set, None)`` on a miss."""
        return (addr // BLOCK_SIZE) & self._set_mask, self._where.get(addr)

    def __contains__(self, addr):
        return addr in self._where

    def _valid(self, s, w):
        if not (0 <= s < self.sets and 0 <= w < self.ways):
            raise UsageError(f"{self.name}: frame ({s}, {w}) out of range")
        if self.addr[s][w] is None:
            raise UsageError(f"{self.name}: frame ({s}, {w}) is not valid")

    def touch(self, s, w):
        if self.addr[s][w] is None:
            self._valid(s, w)
        self._promote(self.rank[s], w)

    def _promote(self, ranks, w):
        r = ranks[w]
        if r:
            for i in range(self.ways):
                if ranks[i] < r:
                    ranks[i] += 1
            ranks[w] = 0

    def victim_way(self, s):
        """Frame a fill into set ``s`` would use: an invalid way, else LRU."""
        addrs = self.addr[s]
        for w in range(self.ways):
            if addrs[w] is None:
                return w
        return self.rank[s].index(self.ways - 1)

    def evict(self, s, w):
        """Invalidate a valid frame and return what it held."""
        self._valid(s, w)
        v = Victim(self.addr[s][w], self.data[s][w], self.dirty[s][w], s, w)
        self.invalidate(s, w)
        return v

    def invalidate(self, s, w):
        a = self.addr[s][w]
        if a is not None:
            del self._where[a]
            self.addr[s][w] = None
            self.dirty[s][w] = False

    def install(self, addr, data, dirty, way):
        """Place ``addr`` in an invalid frame of its set as MRU."""
        s = self.set_index(addr)
        if addr in self._where:
            raise UsageError(f"{self.name}: {addr:#x} is already resident")
        if addr % BLOCK_SIZE:
            raise UsageError(f"{self.name}: {addr:#x} is not block aligned")
        if self.addr[s][way] is not None:
            raise UsageError(f"{self.name}: frame ({s}, {way}) is occupied")
        self.addr[s][way] = addr
        self.data[s][way] = data
        self.dirty[s][way] = dirty
        if self.track_parity:
            self.parity[s][way] = parity_signature(data)
        self._where[addr] = way
        self._promote(self.rank[s], way)
        return s, way

    def fill(self, addr, data, dirty=False):
        """Install ``addr``, evicting the LRU line if the set is full.

        Returns the :class:`Victim` or ``None``.
        """
        if addr in self._where:
            raise UsageError(f"{self.name}: fill of resident address {addr:#x}")
        s = self.set_index(addr)
        w = self.victim_way(s)
        victim = self.evict(s, w) if self.addr[s][w] is not None else None
        self.install(addr, data, dirty, w)
        return victim

    def write_line(self, s, w, data, set_dirty=True):
        self._valid(s, w)
        self.data[s][w] = data
        if self.track_parity:
            self.parity[s][w] = parity_signature(data)
        if set_dirty:
            self.dirty[s][w] = True

    def read_line(self, s, w):
        self._valid(s, w)
        a = self.addr[s][w]
        meta = LineMeta(
            tag=self.tag(a),
            valid=True,
            dirty=self.dirty[s][w],
            lru_rank=self.rank[s][w],
            parity=self.parity[s][w],
        )
        return self.data[s][w], meta

    def lines(self):
        """Yield ``(set, way, addr)`` for every valid line."""
        for s in range(self.sets):
            for w, a in enumerate(self.addr[s]):
                if a is not None:
                    yield s, w, a

    def check_lru(self):
        for s in range(self.sets):
            if sorted(self.rank[s]) != list(range(self.ways)):
                return False
        return True


class SignatureCache:
    """One signature byte per L1 frame, initialised to zero."""

    def __init__(self, sets, ways):
        self.sets = sets
        self.ways = ways
        self._bytes = bytearray(sets * ways)

    def _index(self, s, w):
        if not (0 <= s < self.sets and 0 <= w < self.ways):
            raise UsageError(f"signature index ({s}, {w}) out of range")
        return s * self.ways + w

    def sig_read(self, s, w):
        return self._bytes[self._index(s, w)]

    def sig_write(self, s, w, value):
        if not 0 <= value <= 0xFF:
            raise UsageError("signature must fit in one byte")
        self._bytes[self._index(s, w)] = value

    def __len__(self):
        return len(self._bytes)
