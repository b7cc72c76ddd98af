"""Event-count energy accounting.

Dynamic energy is the dot product of event counters with per-event
coefficients; leakage is a per-cycle power times the latency proxy. The
coefficients are abstract units supplied by configuration; the defaults are
placeholders scaled by stored bits, not circuit-derived values.
"""

from dataclasses import asdict, dataclass, fields

from .errors import ConfigError
from .stats import amat_cycles

SCHEMES = ("conventional", "mmecc", "tcc")


@dataclass(frozen=True)
class EnergyCoefficients:
    e_l2_access_conventional: float = 1.125
    e_l2_access_plain: float = 1.0
    e_mem_access: float = 20.0
    e_sig_read: float = 0.01
    e_sig_write: float = 0.01
    e_sig_compare: float = 0.001
    e_block_compare: float = 0.008
    e_ecc_compute: float = 0.032
    p_leak_conventional: float = 0.5625
    p_leak_plain: float = 0.5
    p_leak_sigcache: float = 0.5 * (1024 * 8) / (16384 * 512)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or v < 0:
                raise ConfigError(f"{f.name} must be a non-negative number, got {v!r}")
        if self.e_l2_access_conventional < self.e_l2_access_plain:
            raise ConfigError(
                "e_l2_access_conventional must be >= e_l2_access_plain "
                "(conventional lines also carry the ECC)"
            )

    @classmethod
    def storage_proportional(cls, l1, l2, e_plain=1.0, p_plain=0.5, **overrides):
        """Coefficients scaled by stored bits for the given geometries.

        A conventional L2 line stores 72 bytes per 64 data bytes; the
        signature cache stores one byte per L1 line.
        """
        sig_ratio = l1.lines / (l2.lines * l2.block_size)
        values = dict(
            e_l2_access_plain=e_plain,
            e_l2_access_conventional=e_plain * 72 / 64,
            p_leak_plain=p_plain,
            p_leak_conventional=p_plain * 72 / 64,
            p_leak_sigcache=p_plain * sig_ratio,
        )
        values.update(overrides)
        return cls(**values)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EnergyReport:
    scheme: str
    dynamic: float
    leakage: float
    breakdown: dict

    @property
    def total(self):
        return self.dynamic + self.leakage

    def as_dict(self):
        return {
            "scheme": self.scheme,
            "dynamic": self.dynamic,
            "leakage": self.leakage,
            "total": self.total,
            "breakdown": dict(self.breakdown),
        }


def leakage_power(coef, scheme):
    if scheme == "conventional":
        return coef.p_leak_conventional
    if scheme == "mmecc":
        return coef.p_leak_plain
    if scheme == "tcc":
        return coef.p_leak_plain + coef.p_leak_sigcache
    raise ConfigError(f"unknown scheme {scheme!r}")


def account(stats, coef, scheme, latencies, cycles=None):
    """Energy of a completed run.

    ``cycles`` overrides the latency proxy when accounting summed stats from
    runs with separately measured cycle counts.
    """
    p_leak = leakage_power(coef, scheme)
    e_l2 = (
        coef.e_l2_access_conventional if scheme == "conventional" else coef.e_l2_access_plain
    )
    breakdown = {
        "l2_access": stats.l2_accesses_total * e_l2,
        "memory_access": stats.memory_accesses * coef.e_mem_access,
        "sig_read": stats.sig_reads * coef.e_sig_read,
        "sig_write": stats.sig_writes * coef.e_sig_write,
        "sig_compare": stats.sig_compares * coef.e_sig_compare,
        "block_compare": stats.block_compares * coef.e_block_compare,
        "ecc_compute": stats.ecc_computes * coef.e_ecc_compute,
    }
    if cycles is None:
        cycles = amat_cycles(stats, latencies)
    return EnergyReport(
        scheme=scheme,
        dynamic=sum(breakdown.values()),
        leakage=p_leak * cycles,
        breakdown=breakdown,
    )
