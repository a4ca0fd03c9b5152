#!/usr/bin/env python3
"""Plot solver traces: relative gradient norm (log scale) against iteration.

Usage: plot_trace.py TRACE.csv [TRACE2.csv ...] [-o OUT.png]
Each input is a CSV with columns iter,rho,relgrad,alpha,millis.
"""
import argparse
import csv
import sys


def read_trace(path):
    iters, relgrads = [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            iters.append(int(row["iter"]))
            relgrads.append(float(row["relgrad"]))
    return iters, relgrads


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("traces", nargs="+", help="trace CSV files")
    parser.add_argument("-o", "--out", default="trace.png", help="output image")
    args = parser.parse_args()

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required: pip install matplotlib")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.traces:
        iters, relgrads = read_trace(path)
        label = path.rsplit("/", 1)[-1].removesuffix(".csv")
        ax.semilogy(iters, [max(g, 1e-300) for g in relgrads], marker=".", label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative gradient norm")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
