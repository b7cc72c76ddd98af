"""Trace-driven driver over a protected cache hierarchy."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .memory import MemoryImage
from .protection import make_hierarchy
from .stats import StatsReport


class TraceRecord(NamedTuple):
    op: str  # "R" or "W"
    addr: int
    value: Optional[int] = None


@dataclass
class RunResult:
    """Outcome of :func:`run`.

    ``stats`` is the steady-state snapshot taken before the final flush;
    ``flushed_stats`` includes the flush traffic. ``image`` holds the data
    region of memory after the flush.
    """

    scheme: str
    stats: StatsReport
    flushed_stats: StatsReport
    image: MemoryImage
    hierarchy: object

    def report(self, config):
        d = self.stats.as_dict(config.latencies)
        d["scheme"] = self.scheme
        return d


def step(h, rec):
    if rec.op == "R":
        h.read(rec.addr)
    else:
        h.write(rec.addr, rec.value)


def run(trace, config, scheme=None, on_event=None, record_writebacks=False, flush=True):
    """Apply ``trace`` to a fresh hierarchy.

    ``on_event(hierarchy, index)`` is called after every record.
    """
    if scheme is not None:
        config = config.with_scheme(scheme)
    h = make_hierarchy(config, record_writebacks=record_writebacks)
    read, write = h.read, h.write
    if on_event is None:
        for rec in trace:
            if rec.op == "R":
                read(rec.addr)
            else:
                write(rec.addr, rec.value)
    else:
        for i, rec in enumerate(trace):
            step(h, rec)
            on_event(h, i)
    return finish(h, flush)


def finish(h, flush=True):
    stats = h.stats.copy()
    if flush:
        h.flush()
    image = MemoryImage(h.data_image())
    return RunResult(h.scheme, stats, h.stats.copy(), image, h)
