"""L1/L2/memory stack with the three L2 protection schemes.

All schemes protect L2 lines with an interleaved parity byte stored next to
the line and a SEC-DED block-ECC that exists only for dirty lines. They
differ in where the block-ECC lives and what a write-back from L1 costs:

``conventional``
    ECC in a dedicated array beside the data; one L2 access per write-back.
``mmecc``
    ECC mapped to a reserved memory region and cached in L2 as ordinary
    data; every write-back also writes the ECC line (two or more accesses).
``tcc``
    ``mmecc`` plus a one-byte-per-L1-line signature cache that filters
    silent write-backs; a silent write-back skips the data write, the ECC
    computation and the ECC write.

The L2 is kept inclusive of the L1. When L2 evicts a line that the L1 still
holds, the L1 copy is invalidated and, if dirty, written back first.
"""

import enum

from .cache import Cache, SignatureCache
from .codec import BLOCK_SIZE, block_correct, block_ecc, parity_signature
from .errors import InvariantViolation, UsageError
from .memory import ZERO_BLOCK, MemoryImage, adjacent_sets, ecc_address
from .stats import StatsReport

_BLOCK_MASK = ~(BLOCK_SIZE - 1)


class WritebackClass(str, enum.Enum):
    SILENT = "silent"
    NONSILENT_FAST = "nonsilent_fast"
    NONSILENT_ALIASED = "nonsilent_aliased"
    # conventional/mmecc never filter; write-backs that differ land here
    NONSILENT = "nonsilent"


class Hierarchy:
    """Write-back, write-allocate L1 over an inclusive, protected L2."""

    scheme = None

    def __init__(self, config, record_writebacks=False):
        self.config = config
        self.l1 = Cache(config.l1, "L1", track_parity=False)
        self.l2 = Cache(config.l2, "L2")
        self.mem = MemoryImage()
        self.ecc_geom = config.ecc_geometry
        self.stats = StatsReport()
        self.poisoned = set()  # addresses left corrupt after a DUE
        self.writeback_log = [] if record_writebacks else None

    # -- word-level accesses -------------------------------------------------

    def _check_word(self, addr):
        if addr % 8 or addr < 0:
            raise UsageError(f"address {addr:#x} is not 8-byte aligned")
        if addr >= self.ecc_geom.ecc_region_base:
            raise UsageError(f"address {addr:#x} lies in the ECC region")

    def _l1_access(self, blk):
        l1 = self.l1
        s, w = l1.lookup(blk)
        if w is None:
            self.stats.l1_misses += 1
            w = self._l1_fill(blk)
        else:
            l1.touch(s, w)
        return s, w

    def read(self, addr):
        self._check_word(addr)
        self.stats.l1_reads += 1
        s, w = self._l1_access(addr & _BLOCK_MASK)
        off = addr % BLOCK_SIZE
        return int.from_bytes(self.l1.data[s][w][off:off + 8], "little")

    def write(self, addr, value):
        self._check_word(addr)
        self.stats.l1_writes += 1
        s, w = self._l1_access(addr & _BLOCK_MASK)
        off = addr % BLOCK_SIZE
        old = self.l1.data[s][w]
        new = old[:off] + (value & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little") + old[off + 8:]
        self.l1.write_line(s, w, new, True)

    def _l1_fill(self, blk):
        l1 = self.l1
        s = l1.set_index(blk)
        w = l1.victim_way(s)
        if l1.addr[s][w] is not None:
            victim = l1.evict(s, w)
            if victim.dirty:
                # drained before the fetch so nested L2 activity cannot displace
                # the incoming line; the signature slot still holds the victim's
                self.handle_writeback(victim.addr, victim.data, (s, w))
        data = self.handle_l1_fill(blk)
        if l1.addr[s][w] is not None:
            raise InvariantViolation(f"L1 frame ({s}, {w}) reoccupied during fill of {blk:#x}")
        l1.install(blk, data, False, w)
        self._after_l1_fill(s, w, data)
        return w

    def _after_l1_fill(self, s, w, data):
        pass

    # -- L2 read path --------------------------------------------------------

    def handle_l1_fill(self, blk):
        """Deliver ``blk`` from L2 to L1, fetching it from memory on an L2 miss."""
        st = self.stats
        st.l2_reads += 1
        s, w = self.l2.lookup(blk)
        if w is None:
            st.l2_misses += 1
            s, w, _ = self._l2_install(blk, lambda: self._memory_fetch(blk), dirty=False)
        data = self.l2_read_checked(s, w)
        self.l2.touch(s, w)
        return data

    def _memory_fetch(self, blk):
        self.stats.memory_reads += 1
        return self.mem.read_block(blk)

    def l2_read_checked(self, s, w):
        """Parity-check an L2 line and repair it if needed.

        The access itself is counted by the caller. Clean lines are refetched
        from memory; dirty lines are corrected with their block-ECC.
        """
        l2, st = self.l2, self.stats
        addr = l2.addr[s][w]
        if addr is None:
            raise UsageError(f"L2 frame ({s}, {w}) is not valid")
        data = l2.data[s][w]
        if self.ecc_geom.in_region(addr) or parity_signature(data) == l2.parity[s][w]:
            return data
        if not l2.dirty[s][w]:
            fresh = self._memory_fetch(addr)
            st.refetched_clean += 1
            l2.write_line(s, w, fresh, set_dirty=False)
            return fresh
        fixed = block_correct(data, self.fetch_block_ecc(s, w))
        if fixed is None:
            st.due_events += 1
            self.poisoned.add(addr)
            # re-seal so the same corruption is reported once
            l2.write_line(s, w, data, set_dirty=False)
            return data
        st.corrected_dirty += 1
        l2.write_line(s, w, fixed, set_dirty=False)
        return fixed

    def fetch_block_ecc(self, s, w):
        raise NotImplementedError

    # -- L2 allocation and eviction -------------------------------------------

    def _l2_install(self, addr, build, dirty):
        """Allocate an L2 frame for ``addr`` and fill it with ``build()``.

        Returns ``(set, way, installed)``. ``installed`` is False when nested
        write-backs triggered while making room already brought ``addr`` in.
        """
        l2 = self.l2
        s = l2.set_index(addr)
        while True:
            w = l2._where.get(addr)
            if w is not None:
                return s, w, False
            w = l2.victim_way(s)
            victim = l2.addr[s][w]
            if victim is None:
                break
            if victim in self.l1:
                self._back_invalidate(victim)
                continue
            self.handle_l2_eviction(s, w)
            break
        l2.install(addr, build(), dirty, w)
        return s, w, True

    def _back_invalidate(self, addr):
        self.stats.back_invalidations += 1
        l1 = self.l1
        s, w = l1.lookup(addr)
        data, dirty = l1.data[s][w], l1.dirty[s][w]
        l1.invalidate(s, w)
        if dirty:
            self.handle_writeback(addr, data, (s, w), touch=False)

    def handle_l2_eviction(self, s, w):
        """Drop an L2 line with no L1 copy, writing it to memory if dirty."""
        l2, st = self.l2, self.stats
        addr = l2.addr[s][w]
        if addr in self.l1:
            raise InvariantViolation(f"evicting {addr:#x} while L1 still holds it")
        st.l2_evictions += 1
        if l2.dirty[s][w]:
            data = self.l2_read_checked(s, w)
            self.mem.write_block(addr, data)
            st.memory_writes += 1
        l2.invalidate(s, w)

    # -- write-back path -----------------------------------------------------

    def handle_writeback(self, addr, data, l1_frame, touch=True):
        """Process a dirty L1 eviction of ``addr`` holding ``data``."""
        st = self.stats
        st.l1_writebacks += 1
        s, w = self.l2.lookup(addr)
        if w is None:
            raise InvariantViolation(f"write-back of {addr:#x} misses in inclusive L2")
        cls = self._writeback(s, w, data, l1_frame, touch)
        if self.writeback_log is not None:
            self.writeback_log.append((addr, cls))
        return cls

    def _observe_silence(self, s, w, data):
        # measurement only; no access or energy is charged
        if self.l2.data[s][w] == data:
            self.stats.silent += 1
            return WritebackClass.SILENT
        return WritebackClass.NONSILENT

    def _write_data(self, s, w, data, touch):
        self.stats.l2_writes += 1
        self.l2.write_line(s, w, data, set_dirty=True)
        if touch:
            self.l2.touch(s, w)

    def _writeback(self, s, w, data, l1_frame, touch):
        raise NotImplementedError

    # -- end of run ------------------------------------------------------------

    def flush(self):
        """Write every dirty line down to memory; lines stay resident, clean."""
        l1, l2 = self.l1, self.l2
        for s, w, a in list(l1.lines()):
            if l1.addr[s][w] == a and l1.dirty[s][w]:
                l1.dirty[s][w] = False
                self.handle_writeback(a, l1.data[s][w], (s, w))
        for s, w, a in list(l2.lines()):
            if l2.dirty[s][w]:
                data = self.l2_read_checked(s, w)
                self.mem.write_block(a, data)
                self.stats.memory_writes += 1
                l2.dirty[s][w] = False

    def data_image(self):
        """Non-zero blocks of the data region of memory."""
        return self.mem.region(0, self.ecc_geom.ecc_region_base)

    # -- consistency checks -----------------------------------------------------

    def inclusion_violations(self):
        return [a for _, _, a in self.l1.lines() if a not in self.l2]

    def stored_block_ecc(self, s, w):
        """Current block-ECC for frame ``(s, w)`` without charging any access."""
        raise NotImplementedError

    def dirty_ecc_violations(self):
        """Dirty data frames whose stored block-ECC does not match the line."""
        bad = []
        l2 = self.l2
        for s, w, a in l2.lines():
            if l2.dirty[s][w] and not self.ecc_geom.in_region(a):
                if self.stored_block_ecc(s, w) != block_ecc(l2.data[s][w]):
                    bad.append((s, w, a))
        return bad


class ConventionalHierarchy(Hierarchy):
    scheme = "conventional"

    def __init__(self, config, record_writebacks=False):
        super().__init__(config, record_writebacks)
        self.ecc_store = [None] * (self.l2.sets * self.l2.ways)

    def _writeback(self, s, w, data, l1_frame, touch):
        cls = self._observe_silence(s, w, data)
        self._write_data(s, w, data, touch)
        # ECC goes to the side array within the same access
        self.stats.ecc_computes += 1
        self.ecc_store[s * self.l2.ways + w] = block_ecc(data)
        return cls

    def fetch_block_ecc(self, s, w):
        ecc = self.ecc_store[s * self.l2.ways + w]
        return ecc if ecc is not None else bytes(8)

    stored_block_ecc = fetch_block_ecc


class MemoryMappedEccHierarchy(Hierarchy):
    scheme = "mmecc"

    def _writeback(self, s, w, data, l1_frame, touch):
        cls = self._observe_silence(s, w, data)
        self._write_data_and_ecc(s, w, data, touch)
        return cls

    def _write_data_and_ecc(self, s, w, data, touch):
        self._write_data(s, w, data, touch)
        self.stats.ecc_computes += 1
        self.store_block_ecc(s, w, block_ecc(data))

    def store_block_ecc(self, s, w, ecc):
        """Write the block-ECC of frame ``(s, w)`` into its ECC line in L2.

        Costs one L2 write. If the ECC line is absent it is allocated as a
        dirty line first; its prior contents come from memory only when an
        adjacent frame is dirty (and so has a live slot there).
        """
        l2, st = self.l2, self.stats
        eaddr, off = ecc_address(s, w, self.ecc_geom)

        def build():
            base = ZERO_BLOCK
            for adj in adjacent_sets(s):
                a = l2.addr[adj][w]
                if (adj != s and a is not None and l2.dirty[adj][w]
                        and not self.ecc_geom.in_region(a)):
                    base = self._memory_fetch(eaddr)
                    break
            return base[:off] + ecc + base[off + 8:]

        st.l2_writes += 1
        es, ew = l2.lookup(eaddr)
        if ew is None:
            es, ew, installed = self._l2_install(eaddr, build, dirty=True)
            if installed:
                st.ecc_line_installs += 1
                return
        st.ecc_line_extra_writes += 1
        line = l2.data[es][ew]
        l2.write_line(es, ew, line[:off] + ecc + line[off + 8:], set_dirty=True)
        l2.touch(es, ew)

    def fetch_block_ecc(self, s, w):
        eaddr, off = ecc_address(s, w, self.ecc_geom)
        es, ew = self.l2.lookup(eaddr)
        if ew is not None:
            self.stats.l2_reads += 1
            blk = self.l2.data[es][ew]
        else:
            blk = self._memory_fetch(eaddr)
        return blk[off:off + 8]

    def stored_block_ecc(self, s, w):
        eaddr, off = ecc_address(s, w, self.ecc_geom)
        es, ew = self.l2.lookup(eaddr)
        blk = self.l2.data[es][ew] if ew is not None else self.mem.read_block(eaddr)
        return blk[off:off + 8]


class TrafficAwareEccHierarchy(MemoryMappedEccHierarchy):
    scheme = "tcc"

    def __init__(self, config, record_writebacks=False):
        super().__init__(config, record_writebacks)
        self.sig = SignatureCache(self.l1.sets, self.l1.ways)

    def _after_l1_fill(self, s, w, data):
        self.stats.sig_writes += 1
        self.sig.sig_write(s, w, parity_signature(data))

    def classify_writeback(self, l1_frame, new_block, s, w):
        """Signature filter, then a full compare against the L2 copy if needed."""
        st = self.stats
        st.sig_reads += 1
        st.sig_compares += 1
        if parity_signature(new_block) != self.sig.sig_read(*l1_frame):
            return WritebackClass.NONSILENT_FAST
        st.l2_reads += 1
        st.block_compares += 1
        if self.l2.data[s][w] == new_block:
            return WritebackClass.SILENT
        return WritebackClass.NONSILENT_ALIASED

    def _writeback(self, s, w, data, l1_frame, touch):
        st = self.stats
        cls = self.classify_writeback(l1_frame, data, s, w)
        if cls is WritebackClass.SILENT:
            st.silent += 1
            if touch:
                self.l2.touch(s, w)
            return cls
        if cls is WritebackClass.NONSILENT_FAST:
            st.nonsilent_fast += 1
        else:
            st.nonsilent_aliased += 1
        self._write_data_and_ecc(s, w, data, touch)
        return cls


HIERARCHIES = {
    cls.scheme: cls
    for cls in (ConventionalHierarchy, MemoryMappedEccHierarchy, TrafficAwareEccHierarchy)
}


def make_hierarchy(config, record_writebacks=False):
    try:
        cls = HIERARCHIES[config.scheme]
    except KeyError:
        raise UsageError(f"unknown scheme {config.scheme!r}") from None
    return cls(config, record_writebacks=record_writebacks)
