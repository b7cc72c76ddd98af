"""Simulation configuration and its flat ``key = value`` file format.

Example file::

    # geometry (bytes / ways / cycles)
    scheme = tcc
    l1_size = 65536
    l2_size = 1048576
    # energy coefficients, abstract energy units per event
    e_l2_access_plain = 1.0
    # leakage powers, abstract energy units per cycle
    p_leak_plain = 0.5
"""

import configparser
from dataclasses import asdict, dataclass, field, fields, replace

from .cache import CacheGeometry
from .energy import SCHEMES, EnergyCoefficients
from .errors import ConfigError, UsageError
from .memory import DEFAULT_ECC_REGION_BASE, EccGeometry
from .stats import Latencies

_SECTION = "config"


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "tcc"
    l1_size: int = 64 * 1024
    l1_ways: int = 4
    l1_latency: int = 3
    l2_size: int = 1024 * 1024
    l2_ways: int = 8
    l2_latency: int = 12
    mem_latency: int = 512
    ecc_region_base: int = DEFAULT_ECC_REGION_BASE
    energy: EnergyCoefficients = field(default_factory=EnergyCoefficients)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        try:
            self.l1, self.l2
            EccGeometry(self.l2.sets, self.l2.ways, self.ecc_region_base)
        except UsageError as e:
            raise ConfigError(str(e)) from None
        for name in ("l1_latency", "l2_latency", "mem_latency"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")

    @property
    def l1(self):
        return CacheGeometry(self.l1_size, self.l1_ways, self.l1_latency)

    @property
    def l2(self):
        return CacheGeometry(self.l2_size, self.l2_ways, self.l2_latency)

    @property
    def ecc_geometry(self):
        return EccGeometry(self.l2.sets, self.l2.ways, self.ecc_region_base)

    @property
    def latencies(self):
        return Latencies(self.l1_latency, self.l2_latency, self.mem_latency)

    def with_scheme(self, scheme):
        return replace(self, scheme=scheme)

    def as_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "energy"}
        d.update(asdict(self.energy))
        return d

    def to_text(self):
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())


_SIM_KEYS = {f.name: f.type for f in fields(SimConfig) if f.name != "energy"}
_ENERGY_KEYS = {f.name for f in fields(EnergyCoefficients)}


def _convert(key, raw):
    if key == "scheme":
        return raw.strip()
    try:
        if key in _ENERGY_KEYS:
            return float(raw)
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def config_from_mapping(values, base=None):
    """Build a config from ``{key: str|number}``, starting from ``base``."""
    base = base or SimConfig()
    sim, energy = {}, {}
    for key, raw in values.items():
        if key not in _SIM_KEYS and key not in _ENERGY_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        v = _convert(key, raw) if isinstance(raw, str) else raw
        (energy if key in _ENERGY_KEYS else sim)[key] = v
    coef = replace(base.energy, **energy) if energy else base.energy
    return replace(base, energy=coef, **sim)


def parse_config(text):
    cp = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None,
    )
    try:
        cp.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as e:
        raise ConfigError(f"cannot parse config: {e}") from None
    return config_from_mapping(dict(cp[_SECTION]))


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
