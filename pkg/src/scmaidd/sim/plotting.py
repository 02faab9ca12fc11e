"""Semilog BER curves from a results CSV.

This module imports nothing from the package: its source is copied verbatim
into the standalone ``plot_ber.py`` written next to every results CSV.
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path


def read_curves(csv_path):
    """{channel: {mode: [(es_n0_db, ber, bit_errors), ...]}} sorted by Es/N0."""
    curves = defaultdict(lambda: defaultdict(list))
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            curves[row["channel"]][row["mode"]].append(
                (float(row["es_n0_db"]), float(row["ber"]), int(row["bit_errors"])))
    for ch in curves.values():
        for pts in ch.values():
            pts.sort()
    return curves


def plot_csv(csv_path, out_dir=None, fmt="png"):
    """One figure per channel; zero-error points are left off the log axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = Path(csv_path)
    out_dir = Path(out_dir) if out_dir else csv_path.parent
    written = []
    markers = "osd^vx*+"
    for channel, modes in sorted(read_curves(csv_path).items()):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for i, (mode, pts) in enumerate(sorted(modes.items())):
            pts = [p for p in pts if p[2] > 0]
            if not pts:
                continue
            ax.semilogy([p[0] for p in pts], [p[1] for p in pts], marker=markers[i % len(markers)], label=mode)
        ax.set_xlabel("Es/N0 per user (dB)")
        ax.set_ylabel("BER")
        ax.set_title(f"{channel.upper()} channel")
        ax.grid(True, which="both", alpha=0.3)
        if ax.lines:
            ax.legend()
        else:
            ax.text(0.5, 0.5, "no bit errors observed", ha="center", transform=ax.transAxes)
        fig.tight_layout()
        path = out_dir / f"ber_{channel}.{fmt}"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


if __name__ == "__main__":
    here = Path(__file__).resolve().parent
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else here / "results.csv"
    for p in plot_csv(target):
        print(p)
