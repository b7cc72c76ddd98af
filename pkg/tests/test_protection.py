import pytest

from tccsim.codec import block_ecc, parity_signature
from tccsim.config import SimConfig
from tccsim.errors import InvariantViolation
from tccsim.faults import InjectionSpec, inject
from tccsim.memory import ecc_address
from tccsim.protection import WritebackClass, make_hierarchy

SCHEMES = ("conventional", "mmecc", "tcc")


def writeback_cost(h):
    # fault-free: every L1 miss is one demand read; the rest is write-back traffic
    return h.stats.l2_accesses_total - h.stats.l1_misses


def frame(h, addr):
    s, w = h.l2.lookup(addr)
    assert w is not None
    return s, w


@pytest.mark.parametrize("scheme, cost", [("conventional", 1), ("mmecc", 2), ("tcc", 1)])
def test_silent_writeback_cost(tiny, scheme, cost):
    h = make_hierarchy(tiny.with_scheme(scheme))
    h.read(0)
    h.write(0, 0)  # same value: silent
    h.read(0x40)  # evicts block 0 from the one-frame L1
    assert h.stats.l1_writebacks == 1
    assert h.stats.silent == 1
    assert writeback_cost(h) == cost


@pytest.mark.parametrize("scheme, cost", [("conventional", 1), ("mmecc", 2), ("tcc", 2)])
def test_nonsilent_writeback_cost(tiny, scheme, cost):
    h = make_hierarchy(tiny.with_scheme(scheme))
    h.write(0, 0xDEADBEEF)
    h.read(0x40)
    assert writeback_cost(h) == cost
    assert h.stats.silent == 0


def test_tcc_aliased_costs_three(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"), record_writebacks=True)
    h.write(0, 0x0101)  # bit 0 of bytes 0 and 1: same parity lane
    h.read(0x40)
    assert h.writeback_log == [(0, WritebackClass.NONSILENT_ALIASED)]
    assert h.stats.nonsilent_aliased == 1
    assert writeback_cost(h) == 3


def test_tcc_single_bit_change_is_fast(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"), record_writebacks=True)
    h.write(0, 1 << 17)
    h.read(0x40)
    assert h.writeback_log[0][1] is WritebackClass.NONSILENT_FAST
    assert h.stats.block_compares == 0


def test_classify_direct(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"))
    h.read(0)
    s, w = frame(h, 0)
    old = h.l2.data[s][w]
    assert h.classify_writeback((0, 0), old, s, w) is WritebackClass.SILENT
    one = bytes([1]) + old[1:]
    assert h.classify_writeback((0, 0), one, s, w) is WritebackClass.NONSILENT_FAST
    two = bytes([1, 1]) + old[2:]
    assert h.classify_writeback((0, 0), two, s, w) is WritebackClass.NONSILENT_ALIASED


def test_tcc_silent_keeps_clean_line_clean(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"))
    h.read(8)
    h.write(8, 0)
    h.read(0x40)
    s, w = frame(h, 0)
    assert not h.l2.dirty[s][w]
    assert h.stats.ecc_line_installs == 0 and h.stats.ecc_computes == 0


def test_mmecc_silent_dirties_and_installs_ecc(tiny):
    h = make_hierarchy(tiny.with_scheme("mmecc"))
    h.read(8)
    h.write(8, 0)
    h.read(0x40)
    s, w = frame(h, 0)
    assert h.l2.dirty[s][w]
    assert h.stats.ecc_line_installs == 1


def test_tcc_silent_on_dirty_line_keeps_dirty(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"))
    h.write(0, 5)
    h.read(0x40)
    h.write(0, 5)  # refill then rewrite the same value
    h.read(0x40)
    s, w = frame(h, 0)
    assert h.l2.dirty[s][w]
    assert h.stats.silent == 1
    assert h.dirty_ecc_violations() == []


def test_cold_fill_path(tiny):
    h = make_hierarchy(tiny.with_scheme("tcc"))
    h.mem.write_block(0x80, bytes(range(64)))
    assert h.read(0x80) == int.from_bytes(bytes(range(8)), "little")
    st = h.stats
    assert (st.memory_reads, st.l2_misses, st.l2_reads, st.sig_writes) == (1, 1, 1, 1)
    s, w = frame(h, 0x80)
    assert h.sig.sig_read(0, 0) == h.l2.parity[s][w] == parity_signature(bytes(range(64)))


def test_l2_hit_has_no_memory_traffic(tiny):
    h = make_hierarchy(tiny)
    h.read(0)
    h.read(0x40)
    before = h.stats.memory_reads
    h.read(0)
    assert h.stats.memory_reads == before
    assert h.stats.l2_misses == 2


class TestStoreBlockEcc:
    def test_install_extra_write_and_memory_refetch(self, tiny):
        h = make_hierarchy(tiny.with_scheme("mmecc"))
        h.write(0x00, 1)
        h.read(0x40)  # write-back of block 0, frame (0, 0)
        st = h.stats
        assert st.ecc_line_installs == 1 and st.ecc_line_extra_writes == 0
        mem_reads = st.memory_reads

        h.write(0x40, 2)
        h.read(0x80)  # write-back of block 1, frame (1, 0): same ECC block
        assert st.ecc_line_installs == 1 and st.ecc_line_extra_writes == 1
        assert st.memory_reads == mem_reads + 1  # only block 2's demand fetch

        eaddr, _ = ecc_address(0, 0, h.ecc_geom)
        es, ew = frame(h, eaddr)
        h.handle_l2_eviction(es, ew)
        assert eaddr in h.mem and eaddr not in h.l2

        mem_reads = st.memory_reads
        h.write(0x80, 3)
        h.read(0xC0)  # frame (2, 0): ECC line absent, adjacent frames dirty
        assert st.ecc_line_installs == 2
        assert st.memory_reads == mem_reads + 2  # demand fetch + ECC block
        assert h.dirty_ecc_violations() == []

    def test_cold_install_starts_from_zero(self, tiny):
        h = make_hierarchy(tiny.with_scheme("mmecc"))
        eaddr, _ = ecc_address(0, 0, h.ecc_geom)
        h.mem.write_block(eaddr, b"\xee" * 64)  # stale garbage; no adjacent dirty
        h.write(0, 1)
        reads = h.stats.memory_reads
        h.read(0x40)
        assert h.stats.memory_reads == reads + 1  # the demand fetch only
        es, ew = frame(h, eaddr)
        line = h.l2.data[es][ew]
        assert line[:8] == block_ecc(h.l2.data[0][0]) and line[8:] == bytes(56)


class TestReadCheck:
    def _dirty_line(self, cfg, addr=0, value=0x1234):
        h = make_hierarchy(cfg)
        h.write(addr, value)
        h.read(addr + 0x40)
        return h, frame(h, addr)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_fault_free_dirty(self, tiny, scheme):
        h, _ = self._dirty_line(tiny.with_scheme(scheme))
        assert h.read(0) == 0x1234
        assert h.stats.corrected_dirty == h.stats.refetched_clean == h.stats.due_events == 0

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_dirty_single_flip_corrected(self, tiny, scheme):
        h, (s, w) = self._dirty_line(tiny.with_scheme(scheme))
        inject(h, InjectionSpec(s, w, data_bits=(3,)))
        assert h.read(0) == 0x1234
        assert h.stats.corrected_dirty == 1
        assert h.l2.parity[s][w] == parity_signature(h.l2.data[s][w])

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_clean_single_flip_refetched(self, tiny, scheme):
        h = make_hierarchy(tiny.with_scheme(scheme))
        h.mem.write_block(0, bytes(range(64)))
        h.read(0)
        h.read(0x40)
        s, w = frame(h, 0)
        inject(h, InjectionSpec(s, w, data_bits=(100,)))
        mem_reads = h.stats.memory_reads
        assert h.read(0) == int.from_bytes(bytes(range(8)), "little")
        assert h.stats.refetched_clean == 1
        assert h.stats.memory_reads == mem_reads + 1

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_double_flip_different_lanes_is_due(self, tiny, scheme):
        h, (s, w) = self._dirty_line(tiny.with_scheme(scheme))
        inject(h, InjectionSpec(s, w, data_bits=(0, 1)))
        h.read(0)
        assert h.stats.due_events == 1
        assert 0 in h.poisoned

    def test_parity_byte_flip_leaves_data(self, tiny):
        h, (s, w) = self._dirty_line(tiny.with_scheme("tcc"))
        inject(h, InjectionSpec(s, w, parity_bits=(6,)))
        assert h.read(0) == 0x1234
        assert h.stats.corrected_dirty == 1

    def test_ecc_from_l2_or_memory(self, tiny):
        h, (s, w) = self._dirty_line(tiny.with_scheme("mmecc"))
        inject(h, InjectionSpec(s, w, data_bits=(9,)))
        l2_reads, mem_reads = h.stats.l2_reads, h.stats.memory_reads
        h.read(0)
        assert h.stats.l2_reads == l2_reads + 2  # demand read + cached ECC line
        assert h.stats.memory_reads == mem_reads

        eaddr, _ = ecc_address(s, w, h.ecc_geom)
        h.read(0x40)  # move block 0 out of L1 so its line can be checked again
        h.handle_l2_eviction(*frame(h, eaddr))
        inject(h, InjectionSpec(s, w, data_bits=(10,)))
        mem_reads = h.stats.memory_reads
        assert h.read(0) == 0x1234
        assert h.stats.memory_reads == mem_reads + 1  # ECC block from memory
        assert h.stats.corrected_dirty == 2


class TestEviction:
    def test_clean_victim_no_memory_write(self, tiny):
        h = make_hierarchy(tiny)
        for a in (0x000, 0x200, 0x400):  # all L2 set 0
            h.read(a)
        assert h.stats.l2_evictions == 1 and h.stats.memory_writes == 0

    def test_dirty_victim_one_write(self, tiny):
        h = make_hierarchy(tiny.with_scheme("conventional"))
        h.write(0, 7)
        for a in (0x200, 0x400, 0x600):  # write-back re-touches block 0
            h.read(a)
        assert 0 not in h.l2
        assert h.stats.memory_writes == 1
        assert h.mem.read_block(0)[:8] == (7).to_bytes(8, "little")

    def test_dirty_ecc_victim_written_to_region(self, tiny):
        h = make_hierarchy(tiny.with_scheme("mmecc"))
        h.write(0x40, 7)  # block 1, set 1
        h.read(0x80)
        eaddr, _ = ecc_address(1, 0, h.ecc_geom)
        assert eaddr in h.l2  # ECC line sits in L2 set 0
        for a in (0x200, 0x400, 0x600):
            h.read(a)
        assert eaddr not in h.l2
        assert h.mem.read_block(eaddr)[8:16] == block_ecc(h.l2.data[1][0])

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_back_invalidation_keeps_inclusion_and_data(self, scheme):
        cfg = SimConfig(l1_size=128, l1_ways=2, l2_size=1024, l2_ways=2, scheme=scheme)
        h = make_hierarchy(cfg)
        h.write(0x000, 0xAB)
        h.read(0x200)
        h.read(0x000)  # L1 hit: L2 recency untouched, block 0 is L2 LRU
        h.read(0x400)
        assert h.stats.back_invalidations >= 1
        assert h.inclusion_violations() == []
        h.flush()
        assert h.mem.read_block(0)[:8] == (0xAB).to_bytes(8, "little")

    def test_writeback_miss_is_invariant_violation(self, tiny):
        h = make_hierarchy(tiny)
        with pytest.raises(InvariantViolation):
            h.handle_writeback(0x1000, bytes(64), (0, 0))


@pytest.mark.parametrize("scheme", SCHEMES)
def test_flush_writes_dirty_state(tiny, scheme):
    h = make_hierarchy(tiny.with_scheme(scheme))
    h.write(0x10, 42)  # stays dirty in L1
    h.flush()
    assert h.mem.read_block(0)[16:24] == (42).to_bytes(8, "little")
    assert not any(h.l2.dirty[s][w] for s, w, _ in h.l2.lines())
