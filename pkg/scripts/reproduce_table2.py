#!/usr/bin/env python3
"""Run the bundled table2.toml scenario and compare it with the published DCR table.

Absolute cells are not expected to match: the bundled orbit spectra are
synthetic and the transport is a 1D CSDA model.  The temperature ratios
within each column are reproduced exactly.

    python scripts/reproduce_table2.py [--out DIR]
"""
import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from test_acceptance import COLUMNS, PUBLISHED_DCR, TEMPS  # noqa: E402

from spaddcr.scenario import ENVIRONMENTS, bundled_path, read_config, render_outputs, run_scenario  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="table2_out", help="directory for report files")
    args = ap.parse_args(argv)

    config = read_config(bundled_path("table2.toml"))
    report = run_scenario(config)
    for p in render_outputs(report, config, args.out):
        print(f"wrote {p}")

    print(f"\n{'environment':<22}{'T':>5}  " + "  ".join(f"{c:>22}" for c in COLUMNS))
    for env_name in ENVIRONMENTS:
        for i, t in enumerate(TEMPS):
            cells = []
            for (orbit, _, thk), published in zip(report.columns, PUBLISHED_DCR[env_name][i]):
                ours = report.row(orbit, env_name, thk, float(t)).total
                cells.append(f"{ours:9.3g} /{published:9.3g} ({math.log10(ours / published):+.1f})")
            print(f"{env_name:<22}{t:>5}  " + "  ".join(cells))
    print("\ncells: model / published (log10 ratio)")
    for w in report.warnings:
        print(f"warning: {w}")


if __name__ == "__main__":
    main()
