"""Command line entry point: ``scmaidd sweep | oracle-check | ops-report``."""
from __future__ import annotations

import argparse
import logging
import sys

from .channel import es_n0_db_to_n0
from .receiver import MODES


def _sweep(args) -> int:
    from .sim.config import load_config
    from .sim.report import emit_results
    from .sim.sweep import run_sweep

    cfg = load_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.output is not None:
        cfg.output = args.output
    if args.plot:
        cfg.plot = True
    table = run_sweep(cfg)
    files = emit_results(table, cfg.output, render=cfg.plot)
    for r in table.rows:
        print(f"{r.channel:<9}{r.mode:<8}{r.es_n0_db:>6.2f} dB  frames {r.frames:>5}  BER {r.ber:.3e}  FER {r.fer:.3e}")
    for name, path in files.items():
        print(f"wrote {name}: {path}")
    return 0


def _oracle_check(args) -> int:
    from .sim import checks

    results = [checks.check_tree_exact(), checks.check_domains(instances=args.instances),
               checks.check_factor_messages(), checks.check_bridge()]
    if not args.skip_ser:
        results.append(checks.check_uncoded_ser(es_n0_db=args.es_n0, slots=args.slots))
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def _ops_report(args) -> int:
    from .sim.complexity import format_report, leading_mul, ops_report
    from .sim.config import SimConfig
    from .sim.sweep import resolve_components

    cfg = SimConfig(es_n0_db=[args.es_n0], modes=[MODES[m] for m in args.modes], code=args.code,
                    codebook=args.codebook)
    comp = resolve_components(cfg)
    for sched in cfg.modes:
        rep = ops_report(sched, comp, n0=es_n0_db_to_n0(args.es_n0), seed=args.seed)
        print(format_report(sched, rep))
        tot = rep.total("measured")
        print(f"total mul {tot['mul']:.1f} vs leading term {leading_mul(sched, comp.cb, comp.fg):.1f}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scmaidd", description="LDPC-coded SCMA with joint iterative detection and decoding")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress per sweep point")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="run a BER sweep from a YAML config")
    s.add_argument("config")
    s.add_argument("--workers", type=int, help="override the configured worker count")
    s.add_argument("--output", help="override the output directory")
    s.add_argument("--plot", action="store_true", help="also render BER figures (PNG)")
    s.set_defaults(func=_sweep)

    o = sub.add_parser("oracle-check", help="check the detector and bridge against brute-force references")
    o.add_argument("--es-n0", type=float, default=11.0, help="Es/N0 (dB) for the uncoded SER comparison")
    o.add_argument("--slots", type=int, default=10_000, help="SCMA slots for the SER comparison")
    o.add_argument("--instances", type=int, default=100, help="random instances for the domain check")
    o.add_argument("--skip-ser", action="store_true", help="skip the Monte Carlo SER comparison")
    o.set_defaults(func=_oracle_check)

    r = sub.add_parser("ops-report", help="predicted vs measured operation counts per user-symbol")
    r.add_argument("--modes", nargs="+", default=["mode2", "mode4"], choices=sorted(MODES))
    r.add_argument("--code", default="bundled:1024")
    r.add_argument("--codebook", default="default")
    r.add_argument("--es-n0", type=float, default=3.0)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=_ops_report)
    return p


def main(argv=None) -> int:
    from .sim.config import ConfigError

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
