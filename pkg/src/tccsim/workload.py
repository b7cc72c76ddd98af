"""Synthetic traces with a controlled silent write-back fraction, and the
line-oriented trace text format.

Text format, one record per line::

    R <hex-addr>
    W <hex-addr> <16-hex-digit value>
    # comment

Addresses are byte addresses aligned to 8.
"""

import random
from dataclasses import dataclass, field

from .cache import CacheGeometry
from .codec import BLOCK_SIZE
from .engine import TraceRecord
from .errors import TraceFormatError, UsageError

_MASK64 = (1 << 64) - 1


def parse(text):
    """Parse trace text into a list of :class:`TraceRecord`."""
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0].upper()
        if op == "R" and len(parts) == 2:
            value = None
        elif op == "W" and len(parts) == 3:
            if len(parts[2]) != 16:
                raise TraceFormatError("write value must have 16 hex digits", lineno)
            try:
                value = int(parts[2], 16)
            except ValueError:
                raise TraceFormatError(f"bad value {parts[2]!r}", lineno) from None
        else:
            raise TraceFormatError(f"cannot parse {line!r}", lineno)
        try:
            addr = int(parts[1], 16)
        except ValueError:
            raise TraceFormatError(f"bad address {parts[1]!r}", lineno) from None
        if addr < 0 or addr % 8:
            raise TraceFormatError(f"address {addr:#x} is not 8-byte aligned", lineno)
        records.append(TraceRecord(op, addr, value))
    return records


def serialize(trace):
    out = []
    for rec in trace:
        if rec.op == "R":
            out.append(f"R {rec.addr:x}\n")
        else:
            out.append(f"W {rec.addr:x} {rec.value:016X}\n")
    return "".join(out)


def load_trace(path):
    with open(path) as fh:
        return parse(fh.read())


def save_trace(trace, path):
    with open(path, "w") as fh:
        fh.write(serialize(trace))


@dataclass
class GeneratedTrace:
    """A trace plus the generator's own bookkeeping.

    ``silent_truth[i]`` says whether the i-th L1 write-back the trace induces
    carries a block equal to the one already in L2.
    """

    records: list
    silent_truth: list = field(default_factory=list)

    @property
    def silent_fraction(self):
        t = self.silent_truth
        return sum(t) / len(t) if t else 0.0


def generate(n_ops, working_set_blocks, write_ratio, silent_fraction, seed,
             l1=None, base_addr=0, max_burst=8):
    """Generate ``n_ops`` records in episodes.

    Each episode picks a working-set block, performs 1..``max_burst`` word
    accesses to it (each a store with probability ``write_ratio``), then
    reads ``l1.ways`` private conflict blocks mapping to the same L1 set,
    which evicts the block from a true-LRU L1. An episode with any store
    therefore yields exactly one write-back at its end. With probability
    ``silent_fraction`` an episode's stores rewrite the current word values
    (silent); otherwise every store writes a value differing from the
    word's value at episode start, so the block is certain to differ.

    The working set plus conflict blocks should fit in L2; otherwise L2
    back-invalidations can split an episode's write-back in two and the
    truth list no longer lines up with the engine's write-backs.
    """
    if working_set_blocks <= 0:
        raise UsageError("working set must contain at least one block")
    if not (0.0 <= write_ratio <= 1.0 and 0.0 <= silent_fraction <= 1.0):
        raise UsageError("ratios must lie in [0, 1]")
    if n_ops < 0:
        raise UsageError("n_ops must be non-negative")
    if base_addr % BLOCK_SIZE:
        raise UsageError("base_addr must be block aligned")
    l1 = l1 or CacheGeometry(64 * 1024, 4)
    rng = random.Random(seed)
    sets, ways = l1.sets, l1.ways
    stride = BLOCK_SIZE * sets
    ws_bytes = working_set_blocks * BLOCK_SIZE
    # conflict region starts on an L1-set-aligned boundary past the working set
    conflict_base = base_addr + -(-ws_bytes // stride) * stride
    if conflict_base % stride:
        conflict_base += stride - conflict_base % stride

    shadow = {}  # word addr -> current value
    records = []
    truth = []
    episode_max = max_burst + ways

    while n_ops - len(records) >= episode_max:
        blk = base_addr + BLOCK_SIZE * rng.randrange(working_set_blocks)
        silent = rng.random() < silent_fraction
        start = {}
        stored = False
        for _ in range(rng.randint(1, max_burst)):
            addr = blk + 8 * rng.randrange(8)
            if rng.random() < write_ratio:
                cur = shadow.get(addr, 0)
                orig = start.setdefault(addr, cur)
                if silent:
                    value = cur
                else:
                    value = rng.getrandbits(64)
                    while value == orig:
                        value = rng.getrandbits(64)
                shadow[addr] = value
                records.append(TraceRecord("W", addr, value))
                stored = True
            else:
                records.append(TraceRecord("R", addr))
        s = (blk // BLOCK_SIZE) % sets
        for j in range(ways):
            records.append(TraceRecord("R", conflict_base + s * BLOCK_SIZE + j * stride))
        if stored:
            truth.append(silent)

    # pad with reads; every L1 line is clean between episodes
    while len(records) < n_ops:
        blk = base_addr + BLOCK_SIZE * rng.randrange(working_set_blocks)
        records.append(TraceRecord("R", blk + 8 * rng.randrange(8)))
    return GeneratedTrace(records, truth)


def random_trace(n_ops, n_blocks, write_ratio, seed, base_addr=0, value_bits=64,
                 reuse=0.5):
    """Unstructured random word accesses over ``n_blocks`` blocks.

    With probability ``reuse`` a store rewrites the value last written to
    its word, so silent stores occur naturally. ``value_bits`` limits fresh
    values to small integers when desired.
    """
    rng = random.Random(seed)
    shadow = {}
    out = []
    for _ in range(n_ops):
        addr = base_addr + BLOCK_SIZE * rng.randrange(n_blocks) + 8 * rng.randrange(8)
        if rng.random() < write_ratio:
            if rng.random() < reuse:
                value = shadow.get(addr, 0)
            else:
                value = rng.getrandbits(value_bits) & _MASK64
            shadow[addr] = value
            out.append(TraceRecord("W", addr, value))
        else:
            out.append(TraceRecord("R", addr))
    return out
