"""Plot |f| over the disk from the CSV written by ``dbrinterp eval``.

    python3 -m dbrinterp eval problems/blaschke_tangential.json --grid 40,160 --out f.csv
    python3 scripts/plot_interpolant.py f.csv --nodes problems/blaschke_tangential.json -o f.png
"""
import argparse
import json

import numpy as np
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("--nodes", help="problem file whose node points are marked")
    ap.add_argument("-o", "--out", default="interpolant.png")
    args = ap.parse_args()

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    sc = ax.tricontourf(df["re"], df["im"], df["abs_f"], levels=30, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="|f(z)|")
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), "k-", lw=0.8)
    if args.nodes:
        with open(args.nodes) as fh:
            nodes = json.load(fh).get("nodes", [])
        ax.plot([n["point"][0] for n in nodes], [n["point"][1] for n in nodes], "r+", ms=10, label="nodes")
        ax.legend(loc="upper right")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
