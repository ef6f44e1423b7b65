#!/usr/bin/env python3
"""Plot a liereg-sim trajectory.csv: group error and velocity error over time."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="trajectory.csv written by `liereg-sim run`")
    ap.add_argument("-o", "--output", default="trajectory.png")
    ap.add_argument("--log", action="store_true", help="logarithmic y axes")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    err_col = "tr_I_minus_Re" if "tr_I_minus_Re" in df else "Er_minus_I_fro"
    vel_col = "omega_tilde_norm" if "omega_tilde_norm" in df else "w_tilde_norm"

    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax1.plot(df["t"], df[err_col].abs())
    ax1.set_ylabel(err_col)
    ax2.plot(df["t"], df[vel_col])
    ax2.set_ylabel(vel_col)
    ax2.set_xlabel("t [s]")
    if args.log:
        ax1.set_yscale("log")
        ax2.set_yscale("log")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
