"""Command line entry point.

    spaddcr run <config> [--out DIR]
    spaddcr validate <config>
    spaddcr fidelity --source-rate 1e7 --loss-db 30 --gate-ns 1 --dcr 110000
    spaddcr tables --list

Exit codes: 0 success, 1 config error, 2 data error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from . import link, scenario
from .errors import ConfigError, DataError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


def _cmd_run(args):
    config = scenario.read_config(args.config)
    report = scenario.run_scenario(config)
    out = args.out or (config.output.directory if config.output else "out")
    for path in scenario.render_outputs(report, config, out):
        print(path)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args):
    config = scenario.read_config(args.config)
    # loading every table is part of validation
    scenario._Tables(config)
    n_env = 4 if config.hane else 1
    rows = len(config.orbits) * len(config.shield.thicknesses) * len(config.detector.temperatures) * n_env
    print(f"ok: {len(config.orbits)} orbit(s), {len(config.shield.thicknesses)} shield(s), "
          f"{len(config.detector.temperatures)} temperature(s), {n_env} environment(s) -> {rows} rows")
    return EXIT_OK


def _cmd_fidelity(args):
    budget = link.LinkBudget(
        source_rate=args.source_rate,
        loss_db=args.loss_db,
        gate_width=args.gate_ns * 1e-9,
        gate_rate=args.gate_rate,
        dcr_free_running=args.dcr,
    )
    p = link.link_fidelity(budget, args.efficiency, args.convention)
    print(f"signal_rate={p.signal_rate:.6g} noise_rate={p.noise_rate_in_gates:.6g} "
          f"fidelity={p.fidelity:.6g} qber={p.qber:.6g}")
    for proto in link.Protocol:
        r = link.protocol_threshold_check(p, proto)
        print(f"{proto.value}: {r.status} (margin {r.margin:+.4g})")
    return EXIT_OK


def _cmd_tables(args):
    for name, kind, particle, label in scenario.list_bundled_tables():
        print(f"{name}\t{kind}\t{particle}\t{label}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="spaddcr", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run a scenario config and write report files")
    r.add_argument("config")
    r.add_argument("--out", default=None, help="output directory (overrides [output].directory)")
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("validate", help="check a config and every table it references")
    v.add_argument("config")
    v.set_defaults(func=_cmd_validate)

    f = sub.add_parser("fidelity", help="fidelity and QBER of a single link budget")
    f.add_argument("--source-rate", type=float, default=1e7, help="photon pulses per second")
    f.add_argument("--loss-db", type=float, required=True)
    f.add_argument("--gate-ns", type=float, default=1.0)
    f.add_argument("--gate-rate", type=float, default=None, help="gates per second (default: source rate)")
    f.add_argument("--dcr", type=float, required=True, help="free-running dark count rate (1/s)")
    f.add_argument("--efficiency", type=float, default=1.0)
    f.add_argument("--convention", choices=[c.value for c in link.Convention], default="signal_fraction")
    f.set_defaults(func=_cmd_fidelity)

    t = sub.add_parser("tables", help="bundled physics tables")
    t.add_argument("--list", action="store_true", required=True)
    t.set_defaults(func=_cmd_tables)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
