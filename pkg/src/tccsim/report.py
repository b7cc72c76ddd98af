"""Report assembly and serialisation (canonical JSON, CSV)."""

import csv
import io
import json

from .energy import SCHEMES, account
from .engine import run

COMPARE_METRICS = (
    "l2_accesses_total",
    "l2_miss_rate",
    "dynamic_energy",
    "total_energy",
    "amat_cycles",
)


def simulate_report(result, config):
    energy = account(result.stats, config.energy, result.scheme, config.latencies)
    return {
        "config": config.as_dict(),
        "stats": result.stats.as_dict(config.latencies),
        "energy": energy.as_dict(),
    }


def compare(trace, config):
    """Run every scheme on the same trace; metrics normalised to conventional."""
    results = {s: run(trace, config, scheme=s) for s in SCHEMES}
    raw = {}
    for s, r in results.items():
        e = account(r.stats, config.energy, s, config.latencies)
        st = r.stats.as_dict(config.latencies)
        raw[s] = {
            "l2_accesses_total": st["l2_accesses_total"],
            "l2_miss_rate": st["l2_miss_rate"],
            "dynamic_energy": e.dynamic,
            "total_energy": e.total,
            "amat_cycles": st["amat_cycles"],
            "silent_fraction": st["silent_fraction"],
            "l1_writebacks": st["l1_writebacks"],
        }
    base = raw["conventional"]
    relative = {
        s: {m: (raw[s][m] / base[m] if base[m] else None) for m in COMPARE_METRICS}
        for s in SCHEMES
    }
    images = [results[s].image.items() for s in SCHEMES]
    return {
        "config": config.as_dict(),
        "raw": raw,
        "relative": relative,
        "images_equal": all(img == images[0] for img in images[1:]),
    }


def to_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _flatten(d, prefix=""):
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report):
        w.writerow([k, v])
    return buf.getvalue()


def compare_csv(report):
    """Plot-ready table: one row per scheme, relative metrics."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", *COMPARE_METRICS])
    for s in SCHEMES:
        w.writerow([s, *(report["relative"][s][m] for m in COMPARE_METRICS)])
    return buf.getvalue()


def compare_table(report):
    rows = [f"{'metric':<20}" + "".join(f"{s:>14}" for s in SCHEMES)]
    for m in COMPARE_METRICS:
        cells = []
        for s in SCHEMES:
            v = report["relative"][s][m]
            cells.append(f"{'n/a':>14}" if v is None else f"{v:>14.4f}")
        rows.append(f"{m:<20}" + "".join(cells))
    rows.append(f"images_equal: {report['images_equal']}")
    return "\n".join(rows) + "\n"
