#!/usr/bin/env python3
"""Render the confusion CSVs written by `wateruse evaluate --confusion-dir`
(or an experiment cell directory) as heatmaps."""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

FIXTURES = ["toilet", "shower", "faucet", "clothes_washer", "dishwasher"]


def heatmap(ax, frame, title, normalize):
    values = frame.to_numpy(dtype=float)
    if normalize:
        totals = values.sum(axis=1, keepdims=True)
        totals[totals == 0] = 1.0
        values = values / totals
    ax.imshow(values, cmap="Blues", vmin=0.0, vmax=values.max() or 1.0)
    ax.set_xticks(range(frame.shape[1]), frame.columns, rotation=45, ha="right")
    ax.set_yticks(range(frame.shape[0]), frame.index)
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    ax.set_title(title)
    for r in range(frame.shape[0]):
        for c in range(frame.shape[1]):
            text = f"{values[r, c]:.2f}" if normalize else f"{int(frame.iat[r, c])}"
            ax.text(c, r, text, ha="center", va="center", fontsize=8)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directory", type=Path)
    parser.add_argument("--out", type=Path, default=None, help="PNG path (default: <directory>/confusions.png)")
    parser.add_argument("--normalize", action="store_true", help="divide each row by its total")
    args = parser.parse_args()

    fig, axes = plt.subplots(2, 3, figsize=(13, 8))
    for ax, name in zip(axes.flat, FIXTURES):
        frame = pd.read_csv(args.directory / f"confusion_{name}.csv", index_col=0)
        frame.columns = [c.removeprefix("predicted_") for c in frame.columns]
        heatmap(ax, frame, name, args.normalize)
    heatmap(axes.flat[5], pd.read_csv(args.directory / "confusion_dominant.csv", index_col=0),
            "dominant label", args.normalize)
    fig.tight_layout()
    out = args.out or args.directory / "confusions.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
