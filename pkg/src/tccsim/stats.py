"""Event counters collected by a simulation run."""

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Latencies:
    l1: int = 3
    l2: int = 12
    memory: int = 512


@dataclass
class StatsReport:
    l1_reads: int = 0
    l1_writes: int = 0
    l1_misses: int = 0
    l2_reads: int = 0
    l2_writes: int = 0
    l2_misses: int = 0
    l2_evictions: int = 0
    back_invalidations: int = 0
    l1_writebacks: int = 0
    silent: int = 0
    nonsilent_fast: int = 0
    nonsilent_aliased: int = 0
    ecc_line_installs: int = 0
    ecc_line_extra_writes: int = 0
    memory_reads: int = 0
    memory_writes: int = 0
    corrected_dirty: int = 0
    refetched_clean: int = 0
    due_events: int = 0
    sig_reads: int = 0
    sig_writes: int = 0
    sig_compares: int = 0
    block_compares: int = 0
    ecc_computes: int = 0

    @property
    def l2_accesses_total(self):
        return self.l2_reads + self.l2_writes

    @property
    def l1_accesses(self):
        return self.l1_reads + self.l1_writes

    @property
    def memory_accesses(self):
        return self.memory_reads + self.memory_writes

    @property
    def silent_fraction(self):
        return self.silent / self.l1_writebacks if self.l1_writebacks else 0.0

    @property
    def l2_miss_rate(self):
        # every L1 miss is exactly one demand read to L2
        return self.l2_misses / self.l1_misses if self.l1_misses else 0.0

    def counters(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def copy(self):
        return StatsReport(**self.counters())

    def __add__(self, other):
        if not isinstance(other, StatsReport):
            return NotImplemented
        a, b = self.counters(), other.counters()
        return StatsReport(**{k: a[k] + b[k] for k in a})

    def __sub__(self, other):
        if not isinstance(other, StatsReport):
            return NotImplemented
        a, b = self.counters(), other.counters()
        return StatsReport(**{k: a[k] - b[k] for k in a})

    def as_dict(self, latencies=None):
        d = self.counters()
        d["l2_accesses_total"] = self.l2_accesses_total
        d["silent_fraction"] = self.silent_fraction
        d["l2_miss_rate"] = self.l2_miss_rate
        if latencies is not None:
            d["amat_cycles"] = amat_cycles(self, latencies)
        return d


def amat_cycles(stats, latencies):
    """Latency proxy: every access at every level charged its access latency."""
    return (
        stats.l1_accesses * latencies.l1
        + stats.l2_accesses_total * latencies.l2
        + stats.memory_accesses * latencies.memory
    )
