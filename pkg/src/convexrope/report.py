"""Run reports: JSON + CSV tables, a deterministic SVG, and matplotlib figures."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .geometry import Polyline

_FMT = "{:.12g}"


@dataclass
class RunReport:
    input_digest: str
    config: dict
    table: List[dict]
    status: str
    final_path: List[List[float]]
    final_length: float
    wall_time: float
    iterations: int
    oracle: Optional[dict] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def build_report(result, config, digest: str, seed=None, oracle=None, notes=None) -> RunReport:
    table = [
        {"j": r.j, "length": r.length, "max_shift": r.max_shift, "violated": r.violated}
        for r in result.history
    ]
    cfg = {
        "n_cuts": config.n_cuts,
        "epsilon": config.epsilon,
        "max_iterations": config.max_iterations,
        "seed": seed,
    }
    return RunReport(
        input_digest=digest,
        config=cfg,
        table=table,
        status=result.status,
        final_path=[list(p) for p in result.path.vertices],
        final_length=result.length,
        wall_time=result.wall_time,
        iterations=result.iterations,
        oracle=oracle,
        notes=list(notes or []),
    )


def format_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    cells = [[str(c) for c in columns]]
    for r in rows:
        cells.append([_cell(r[c]) for c in columns])
    widths = [max(len(row[k]) for row in cells) for k in range(len(columns))]
    return "\n".join("  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells)


def _cell(v) -> str:
    if isinstance(v, float):
        return _FMT.format(v)
    return str(v)


def write_csv(rows: Sequence[dict], columns: Sequence[str], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])


def write_report(rep: RunReport, path) -> List[Path]:
    """JSON at ``path``, the iteration table as CSV and a convergence PNG next to it."""
    path = Path(path)
    path.write_text(rep.to_json())
    csv_path = path.with_suffix(".csv")
    write_csv(rep.table, ("j", "length", "max_shift", "violated"), csv_path)
    png = path.with_name(path.stem + "_convergence.png")
    plot_convergence(rep.table, png)
    return [path, csv_path, png]


# ---------------------------------------------------------------------------
# figures


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_convergence(table: Sequence[dict], out) -> None:
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    js = [r["j"] for r in table]
    L = [r["length"] for r in table]
    final = L[-1] if L else 0.0
    ax1.plot(js, [max(x - final, 1e-16) for x in L], lw=1)
    ax1.set_yscale("log")
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("length - final length")
    ax2.plot(js, [max(r["max_shift"], 1e-18) for r in table], lw=1, color="tab:red")
    ax2.set_yscale("log")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("max shift")
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)


def plot_sweep(rows: Sequence[dict], out) -> None:
    plt = _pyplot()
    fig, ax1 = plt.subplots(figsize=(6, 3.8))
    eps = [r["epsilon"] for r in rows]
    ax1.plot(eps, [r["runtime"] for r in rows], "o-", color="tab:blue")
    ax1.set_xscale("log")
    ax1.invert_xaxis()
    ax1.set_xlabel("tolerance")
    ax1.set_ylabel("runtime (s)", color="tab:blue")
    ax2 = ax1.twinx()
    ax2.plot(eps, [r["length"] for r in rows], "s--", color="tab:green")
    ax2.set_ylabel("length", color="tab:green")
    ax2.ticklabel_format(axis="y", useOffset=False)
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)


# ---------------------------------------------------------------------------
# svg


def _pts(seq) -> str:
    return " ".join(f"{x:.9g},{y:.9g}" for x, y in seq)


def render_svg(d, part, state, path: Polyline, out, width: int = 800) -> str:
    """Deterministic SVG of the domain, cuts, shooting points and rope.

    Element ids: ``domain``, ``polygon``, ``rect``, ``slit``, ``cut-<i>``,
    ``shoot-<i>``, ``rope``. The y axis is flipped so up is up.
    """
    (x0, y0), _, (x1, y1), _ = d.rect
    w, h = x1 - x0, y1 - y0
    height = max(1, int(round(width * h / w)))
    scale = width / w
    stroke = 1.5 / scale
    r = 3.0 / scale
    out_lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{x0:.9g} {-y1:.9g} {w:.9g} {h:.9g}">',
        f'<g transform="scale(1,-1)" stroke-width="{stroke:.6g}" fill="none">',
        f'<polygon id="domain" points="{_pts(d.boundary.vertices)}" fill="#f4f4f4" stroke="none"/>',
        f'<polygon id="rect" points="{_pts(d.rect)}" stroke="#888"/>',
        f'<polygon id="polygon" points="{_pts(d.polygon.vertices)}" fill="#cfd8e6" stroke="#345"/>',
        f'<line id="slit" x1="{d.b[0]:.9g}" y1="{d.b[1]:.9g}" x2="{d.c[0]:.9g}" y2="{d.c[1]:.9g}" stroke="#a33"/>',
    ]
    for seg in part.segments:
        out_lines.append(
            f'<line id="cut-{seg.index}" x1="{seg.u[0]:.9g}" y1="{seg.u[1]:.9g}" '
            f'x2="{seg.v[0]:.9g}" y2="{seg.v[1]:.9g}" stroke="#999" stroke-dasharray="{4 * stroke:.6g}"/>'
        )
    out_lines.append(f'<polyline id="rope" points="{_pts(path.vertices)}" stroke="#c60"/>')
    for k, p in enumerate(state.points[1:-1], start=1):
        out_lines.append(f'<circle id="shoot-{k}" cx="{p[0]:.9g}" cy="{p[1]:.9g}" r="{r:.6g}" fill="#063"/>')
    out_lines += ["</g>", "</svg>", ""]
    text = "\n".join(out_lines)
    if out is not None:
        Path(out).write_text(text)
    return text


def parse_svg_rope(text: str):
    """Rope vertices back from an SVG written by :func:`render_svg`."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(text)
    for el in root.iter():
        if el.get("id") == "rope":
            return [tuple(float(c) for c in tok.split(",")) for tok in el.get("points").split()]
    return None
