"""Trace-driven two-level cache simulator with three L2 protection schemes:
conventional in-line ECC, memory-mapped ECC, and traffic-aware ECC, which
skips ECC work for silent write-backs.

.. autosummary::
   :nosignatures:

   ~codec.parity_signature
   ~codec.block_ecc
   ~engine.run
   ~energy.account
   ~faults.campaign
   ~workload.generate
"""

from .codec import block_correct, block_ecc, parity_signature, secded_decode, secded_encode
from .config import SimConfig, load_config, parse_config
from .energy import SCHEMES, EnergyCoefficients, account
from .engine import TraceRecord, run
from .faults import campaign, inject
from .memory import MemoryImage, ecc_address
from .protection import make_hierarchy
from .stats import Latencies, StatsReport, amat_cycles
from .workload import generate, parse, serialize

__version__ = "0.1.0"
