"""Dynamic and leakage energy per scheme with storage-proportional coefficients."""

from tccsim import EnergyCoefficients, SimConfig, account, amat_cycles, generate, run

base = SimConfig()
coef = EnergyCoefficients.storage_proportional(base.l1, base.l2)
cfg = SimConfig(energy=coef)
g = generate(80_000, 4096, 0.8, 0.37, seed=2, l1=cfg.l1)

stats = {s: run(g.records, cfg, s).stats for s in ("conventional", "mmecc", "tcc")}
common = amat_cycles(stats["conventional"], cfg.latencies)

print(f"{'scheme':<13}{'dynamic':>11}{'leak(own)':>12}{'leak(common)':>14}{'cycles':>12}")
for s, st in stats.items():
    own = account(st, coef, s, cfg.latencies)
    shared = account(st, coef, s, cfg.latencies, cycles=common)
    print(f"{s:<13}{own.dynamic:>11.0f}{own.leakage:>12.0f}{shared.leakage:>14.0f}"
          f"{amat_cycles(st, cfg.latencies):>12}")

tcc = account(stats["tcc"], coef, "tcc", cfg.latencies)
print("\ntcc dynamic breakdown:")
for k, v in sorted(tcc.breakdown.items(), key=lambda kv: -kv[1]):
    print(f"  {k:<14}{v:>12.1f}")
