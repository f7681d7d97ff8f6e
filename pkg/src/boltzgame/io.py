"""Plain-text CSV writers and readers for run outputs.

Floats are written with 17 significant digits so values round-trip exactly.

* time series: ``t,m_F,m_L1..m_LM,E_F,E_L1..E_LM``
* histogram:   ``bin_center,density``
* grid:        first row ``knowledge\\opinion`` followed by the opinion bin
  centres; every further row starts with a knowledge bin centre followed by
  the densities of that row.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

FMT = "%.17g"


def _fmt(x) -> str:
    return FMT % x


def timeseries_header(M: int) -> list:
    return ["t", "m_F", *[f"m_L{k + 1}" for k in range(M)], "E_F", *[f"E_L{k + 1}" for k in range(M)]]


def write_timeseries(rows, path, M: int) -> None:
    rows = np.asarray(rows, dtype=float)
    lines = [",".join(timeseries_header(M))]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_timeseries(path):
    """Returns ``(header, rows)``."""
    text = Path(path).read_text().splitlines()
    header = text[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, rows


def write_histogram(hist, path) -> None:
    lines = ["bin_center,density"]
    lines += [f"{_fmt(c)},{_fmt(d)}" for c, d in zip(hist.centers, hist.density)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_histogram(path):
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return rows[:, 0], rows[:, 1]


def write_grid(grid, path) -> None:
    xc = 0.5 * (grid.x_edges[1:] + grid.x_edges[:-1])
    wc = 0.5 * (grid.w_edges[1:] + grid.w_edges[:-1])
    lines = ["knowledge\\opinion," + ",".join(_fmt(v) for v in wc)]
    for x, row in zip(xc, grid.density):
        lines.append(_fmt(x) + "," + ",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_grid(path):
    """Returns ``(knowledge_centers, opinion_centers, density)``."""
    text = Path(path).read_text().splitlines()
    wc = np.array([float(v) for v in text[0].split(",")[1:]])
    body = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return body[:, 0], wc, body[:, 1:]


def write_table(path, header, columns) -> None:
    """Generic column table (used for analytic density grids)."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in vals) for vals in zip(*cols)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_run(record, out_dir) -> list:
    """Write every output file of a run; returns the written paths."""
    from .scenario import dump_scenario

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    M = record.scenario.M
    written = []

    def put(name):
        p = out / name
        written.append(p)
        return p

    dump_scenario(record.scenario, put("scenario.yaml"))
    write_timeseries(record.moments, put("timeseries.csv"), M)
    for snap in record.snapshots:
        tag = f"{snap.t:g}"
        write_histogram(snap.followers, put(f"followers_t{tag}.csv"))
        for k, h in enumerate(snap.leaders):
            write_histogram(h, put(f"leaders{k + 1}_t{tag}.csv"))
        if snap.grid is not None:
            write_grid(snap.grid, put(f"grid_t{tag}.csv"))
        if snap.quartiles is not None:
            q = snap.quartiles
            write_table(put(f"quartiles_t{tag}.csv"), ["quartile", "knowledge_mean", "opinion_mean"],
                        [np.arange(4), q["knowledge_mean"], q["opinion_mean"]])
    return written
