"""Curve data for the conditional-quantile and FWER/power-versus-c plots.

Writes quantile.csv and one fwer_power_snr{S}.csv per signal strength into
the output directory, then prints the oracle thresholds found for each.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from screenmin.cli import main as cli_main


def markers(path):
    with open(path) as fh:
        return {k: float(v) for k, _, v in (line[2:].partition(": ") for line in fh if line.startswith("# "))}


def power_peak(path):
    with open(path) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    c = np.array([float(r["c"]) for r in rows])
    return c[np.argmax([float(r["power"]) for r in rows])]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="curves")
    ap.add_argument("--m", type=int, default=100)
    ap.add_argument("--mix", default="0.70,0.25,0.05")
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    cli_main(["curves", "--kind", "quantile", "--c", "1e-4,1e-3,1e-2", "--grid", "101",
              "--out", str(out / "quantile.csv")])
    for snr in ("1.5", "2", "3"):
        path = out / f"fwer_power_snr{snr}.csv"
        cli_main(["curves", "--mix", args.mix, "--snr", snr, "--m", str(args.m),
                  "--grid", str(args.grid), "--out", str(path)])
        mk = markers(path)
        print(f"snr {snr}: constraint {mk['c_star_constraint']:.4g}, first order {mk['c_star_first_order']:.4g}, "
              f"product {mk['c_star_product']:.4g}, unconstrained power peak {power_peak(path):.4g}")


if __name__ == "__main__":
    main()
