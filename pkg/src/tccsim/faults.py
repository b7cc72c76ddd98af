"""Soft-error injection into resident L2 lines.

A campaign advances one fault-free simulation through the trace. At each
chosen trace position it clones the state, flips bits in one L2 line, runs
the clone to the end, flushes it, and compares the flushed data image with
the fault-free (golden) image of the same scheme.
"""

import copy
import random
from dataclasses import asdict, dataclass, field

from .codec import BLOCK_SIZE
from .engine import step
from .errors import UsageError
from .protection import make_hierarchy

TARGETS = ("any", "dirty", "clean")
PATTERNS = ("single", "double_word", "parity")
OUTCOMES = ("corrected_dirty", "refetched_clean", "due", "masked", "sdc")


@dataclass(frozen=True)
class InjectionSpec:
    """Bits to invert in the L2 frame ``(set, way)``.

    ``data_bits`` index the 512 data bits (bit ``8*i + j`` is bit ``j`` of
    byte ``i``); ``parity_bits`` index the stored parity byte.
    """

    set: int
    way: int
    data_bits: tuple = ()
    parity_bits: tuple = ()

    def __post_init__(self):
        if any(not 0 <= b < 8 * BLOCK_SIZE for b in self.data_bits):
            raise UsageError("data bit positions must be < 512")
        if any(not 0 <= b < 8 for b in self.parity_bits):
            raise UsageError("parity bit positions must be < 8")


def inject(h, spec):
    """XOR the spec's bits into a valid L2 line without touching its metadata."""
    l2 = h.l2
    if not (0 <= spec.set < l2.sets and 0 <= spec.way < l2.ways):
        raise UsageError(f"frame ({spec.set}, {spec.way}) out of range")
    if l2.addr[spec.set][spec.way] is None:
        raise UsageError(f"frame ({spec.set}, {spec.way}) holds no line")
    mask = 0
    for b in spec.data_bits:
        mask ^= 1 << b
    if mask:
        data = int.from_bytes(l2.data[spec.set][spec.way], "little") ^ mask
        l2.data[spec.set][spec.way] = data.to_bytes(BLOCK_SIZE, "little")
    for b in spec.parity_bits:
        l2.parity[spec.set][spec.way] ^= 1 << b


@dataclass
class OutcomeTally:
    corrected_dirty: int = 0
    refetched_clean: int = 0
    due: int = 0
    masked: int = 0
    sdc: int = 0

    @property
    def total(self):
        return sum(asdict(self).values())

    def add(self, outcome):
        setattr(self, outcome, getattr(self, outcome) + 1)

    def as_dict(self):
        return asdict(self)


@dataclass
class InjectionRecord:
    index: int
    position: int
    addr: int
    dirty: bool
    spec: InjectionSpec
    outcome: str
    miscorrected: bool = False

    def as_dict(self):
        d = asdict(self)
        d["spec"] = {k: list(v) if isinstance(v, tuple) else v
                     for k, v in asdict(self.spec).items()}
        return d


@dataclass
class CampaignReport:
    scheme: str
    seed: int
    target: str
    pattern: str
    tally: OutcomeTally
    records: list = field(default_factory=list)

    @property
    def miscorrections(self):
        return sum(r.miscorrected for r in self.records)

    def as_dict(self):
        return {
            "scheme": self.scheme,
            "seed": self.seed,
            "target": self.target,
            "pattern": self.pattern,
            "tally": self.tally.as_dict(),
            "miscorrections": self.miscorrections,
            "injections": [r.as_dict() for r in self.records],
        }


def _candidates(h, target):
    l2 = h.l2
    out = []
    for s, w, a in l2.lines():
        if h.ecc_geom.in_region(a):
            continue
        d = l2.dirty[s][w]
        if target == "any" or (target == "dirty") == d:
            out.append((s, w))
    return out


def _pick_bits(rng, pattern):
    if pattern == "single":
        return (rng.randrange(8 * BLOCK_SIZE),), ()
    if pattern == "double_word":
        word = rng.randrange(8)
        a, b = rng.sample(range(64), 2)
        return (64 * word + a, 64 * word + b), ()
    if pattern == "parity":
        return (), (rng.randrange(8),)
    raise UsageError(f"unknown pattern {pattern!r}")


def classify(before, after, image, golden):
    """Outcome of one injection from the counter delta and final image."""
    delta = after - before
    wrong = image != golden
    if delta.due_events:
        return "due", False
    if wrong:
        return "sdc", bool(delta.corrected_dirty)
    if delta.corrected_dirty:
        return "corrected_dirty", False
    if delta.refetched_clean:
        return "refetched_clean", False
    return "masked", False


def campaign(trace, config, n_injections, seed, target="any", pattern="single"):
    """Run ``n_injections`` independent single-fault runs over ``trace``.

    Injection positions are drawn uniformly among trace positions where a
    line matching ``target`` is resident in L2.
    """
    if n_injections < 1:
        raise UsageError("n_injections must be at least 1")
    if target not in TARGETS:
        raise UsageError(f"target must be one of {TARGETS}")
    if pattern not in PATTERNS:
        raise UsageError(f"pattern must be one of {PATTERNS}")
    if not trace:
        raise UsageError("campaign needs a non-empty trace")

    golden_h = make_hierarchy(config)
    for rec in trace:
        step(golden_h, rec)
    golden_h.flush()
    golden = golden_h.data_image()

    rng = random.Random(seed)
    positions = sorted(rng.randrange(1, len(trace) + 1) for _ in range(n_injections))

    tally = OutcomeTally()
    report = CampaignReport(config.scheme, seed, target, pattern, tally)
    base = make_hierarchy(config)
    done = 0
    for idx, pos in enumerate(positions):
        while done < pos:
            step(base, trace[done])
            done += 1
        cands = _candidates(base, target)
        while not cands and done < len(trace):
            # nothing eligible yet: slide forward until something is
            step(base, trace[done])
            done += 1
            cands = _candidates(base, target)
        if not cands:
            raise UsageError(f"no {target} L2 line is ever resident for injection")
        s, w = cands[rng.randrange(len(cands))]
        data_bits, parity_bits = _pick_bits(rng, pattern)
        spec = InjectionSpec(s, w, data_bits, parity_bits)

        h = copy.deepcopy(base)
        addr, dirty = h.l2.addr[s][w], h.l2.dirty[s][w]
        before = h.stats.copy()
        inject(h, spec)
        for rec in trace[done:]:
            step(h, rec)
        h.flush()
        outcome, miscorrected = classify(before, h.stats, h.data_image(), golden)
        tally.add(outcome)
        report.records.append(
            InjectionRecord(idx, done, addr, dirty, spec, outcome, miscorrected)
        )
    return report
