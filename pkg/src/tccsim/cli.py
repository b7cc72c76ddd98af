"""Command-line entry point.

Exit codes: 0 success, 1 internal invariant violation (including a
cross-scheme data mismatch in ``compare``), 2 usage or input error.
"""

import argparse
import json
import sys

from . import faults, report, workload
from .config import SimConfig, config_from_mapping, load_config
from .energy import SCHEMES
from .engine import run
from .errors import ConfigError, InvariantViolation, TraceFormatError, UsageError


def _key_value(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def _resolve_config(args):
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = dict(args.set or [])
    if getattr(args, "scheme", None):
        overrides["scheme"] = args.scheme
    return config_from_mapping(overrides, base=cfg) if overrides else cfg


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args):
    cfg = _resolve_config(args)
    trace = workload.load_trace(args.trace)
    rep = report.simulate_report(run(trace, cfg), cfg)
    _emit(report.to_json(rep) if args.out == "json" else report.to_csv(rep), args.output)
    return 0


def cmd_compare(args):
    cfg = _resolve_config(args)
    trace = workload.load_trace(args.trace)
    rep = report.compare(trace, cfg)
    if args.out == "json":
        text = report.to_json(rep)
    elif args.out == "csv":
        text = report.compare_csv(rep)
    else:
        text = report.compare_table(rep)
    _emit(text, args.output)
    if not rep["images_equal"]:
        print("error: final memory images differ across schemes", file=sys.stderr)
        return 1
    return 0


def cmd_inject(args):
    cfg = _resolve_config(args)
    trace = workload.load_trace(args.trace)
    rep = faults.campaign(trace, cfg, args.n, args.seed, args.target, args.pattern)
    out = rep.as_dict()
    out["config"] = cfg.as_dict()
    _emit(report.to_json(out), args.output)
    return 0


def cmd_gen_trace(args):
    cfg = _resolve_config(args)
    gen = workload.generate(
        args.n_ops, args.working_set, args.write_ratio, args.silent_fraction,
        args.seed, l1=cfg.l1,
    )
    header = (
        f"# n_ops={args.n_ops} working_set={args.working_set} "
        f"write_ratio={args.write_ratio} silent_fraction={args.silent_fraction} "
        f"seed={args.seed} l1_size={cfg.l1_size} l1_ways={cfg.l1_ways}\n"
    )
    _emit(header + workload.serialize(gen.records), args.output)
    if args.truth:
        with open(args.truth, "w") as fh:
            json.dump({"silent_truth": gen.silent_truth}, fh)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="tccsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scheme=False):
        sp.add_argument("--config", help="key=value configuration file")
        sp.add_argument("--set", action="append", type=_key_value, metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
        sp.add_argument("-o", "--output", help="write to file instead of stdout")
        if scheme:
            sp.add_argument("--scheme", choices=SCHEMES)

    sp = sub.add_parser("simulate", help="run one scheme over a trace")
    sp.add_argument("trace")
    common(sp, scheme=True)
    sp.add_argument("--out", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="run all schemes and compare")
    sp.add_argument("trace")
    common(sp)
    sp.add_argument("--out", choices=("table", "json", "csv"), default="table")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("inject", help="seeded fault-injection campaign")
    sp.add_argument("trace")
    common(sp, scheme=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--target", choices=faults.TARGETS, default="any")
    sp.add_argument("--pattern", choices=faults.PATTERNS, default="single")
    sp.set_defaults(func=cmd_inject)

    sp = sub.add_parser("gen-trace", help="generate a synthetic trace")
    common(sp)
    sp.add_argument("--n-ops", type=int, required=True)
    sp.add_argument("--working-set", type=int, default=4096, help="blocks")
    sp.add_argument("--write-ratio", type=float, default=0.5)
    sp.add_argument("--silent-fraction", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--truth", help="also write the per-write-back silence truth (JSON)")
    sp.set_defaults(func=cmd_gen_trace)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 1
    except (UsageError, ConfigError, TraceFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
