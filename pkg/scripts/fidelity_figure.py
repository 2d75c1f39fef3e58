#!/usr/bin/env python3
"""Fidelity against link attenuation for a set of free-running dark count rates.

Writes a CSV of the curves and an SVG plot, and prints the attenuation at
which each curve crosses fidelity 0.9.

    python scripts/fidelity_figure.py --dcr 1e2 1e3 1e4 1e5 1e6 --out fidelity_out
"""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from spaddcr import link  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dcr", type=float, nargs="+", default=[1e2, 1e3, 1e4, 1e5, 1e6])
    ap.add_argument("--source-rate", type=float, default=1e7)
    ap.add_argument("--gate-ns", type=float, default=1.0)
    ap.add_argument("--max-loss", type=float, default=60.0)
    ap.add_argument("--convention", choices=[c.value for c in link.Convention], default="signal_fraction")
    ap.add_argument("--out", default="fidelity_out")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    template = link.LinkBudget(source_rate=args.source_rate, gate_width=args.gate_ns * 1e-9)
    rows = link.fidelity_curve(args.dcr, (0.0, args.max_loss), 241, template, convention=args.convention)
    (out / "fidelity_curves.csv").write_text(link.curve_csv(rows), encoding="utf-8")

    fig, ax = plt.subplots(figsize=(6, 4))
    for dcr in args.dcr:
        pts = [(loss, p.fidelity) for loss, d, p in rows if d == dcr]
        ax.plot(*zip(*pts), label=f"DCR {dcr:.0e} /s")
        if dcr > 0:
            crossing = link.loss_at_fidelity(link.LinkBudget(args.source_rate, 0.0, template.gate_width, None, dcr), 0.9)
            print(f"DCR {dcr:9.3g} /s: fidelity 0.9 at {crossing:6.2f} dB")
    ax.axhline(link.GENERIC_MIN_FIDELITY, color="red", ls="--", lw=1)
    ax.set(xlabel="link attenuation (dB)", ylabel="fidelity", ylim=(0, 1.05))
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out / "fidelity_curves.svg", metadata={"Date": None})
    print(f"wrote {out / 'fidelity_curves.csv'} and {out / 'fidelity_curves.svg'}")


if __name__ == "__main__":
    main()
