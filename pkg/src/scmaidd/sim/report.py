"""Result files: CSV table, standalone plot script, optional figures."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from . import plotting
from .sweep import ResultTable

COLUMNS = ("channel", "mode", "es_n0_db", "frames", "bits", "bit_errors", "ber", "fer",
           "ops_mul", "ops_div", "ops_exp", "ops_log", "seconds")


def _fmt(x: float) -> str:
    return f"{x:.6e}"


def write_csv(table: ResultTable, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in table.rows:
            ops = r.ops_per_symbol
            w.writerow([r.channel, r.mode, f"{r.es_n0_db:g}", r.frames, r.bits, r.bit_errors, _fmt(r.ber),
                        _fmt(r.fer), _fmt(ops["mul"]), _fmt(ops["div"]), _fmt(ops["exp"]), _fmt(ops["log"]),
                        f"{r.seconds:.3f}"])
    return path


def write_plot_script(path) -> Path:
    path = Path(path)
    path.write_text(Path(plotting.__file__).read_text())
    return path


def emit_results(table: ResultTable, out_dir, render: bool = False) -> dict[str, Path]:
    """Write ``results.csv``, ``plot_ber.py`` and ``config.json`` into ``out_dir``;
    with ``render`` also the per-channel BER figures."""
    if not table.rows:
        raise ValueError("result table is empty")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out}: {e}") from None
    files = {"csv": write_csv(table, out / "results.csv"), "plot_script": write_plot_script(out / "plot_ber.py")}
    if table.config is not None:
        files["config"] = out / "config.json"
        files["config"].write_text(json.dumps(table.config.to_dict(), indent=2) + "\n")
    if render:
        for p in plotting.plot_csv(files["csv"], out):
            files[p.stem] = p
    return files
