"""CSV/JSON persistence and minimal SVG line charts."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import EngagementTrace, SummaryStats

NA = "NA"


def fmt(x: float) -> str:
    """17 significant digits: round-trips any double exactly."""
    x = float(x)
    if math.isnan(x):
        return NA
    return format(x, ".17g")


def csv_columns(d: int) -> list[str]:
    cols = ["k"]
    for prefix in ("alpha", "beta", "theta_hat"):
        cols += [f"{prefix}_{i}" for i in range(1, d + 1)]
    cols += ["est_error", "jammer_utility", "radar_utility", "margin", "feasible", "tracking_rmse"]
    return cols


def trace_to_csv(trace: EngagementTrace, d: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_columns(d))
    for i in range(trace.K):
        row = [str(i + 1)]
        row += [fmt(v) for v in trace.alpha[i]]
        row += [fmt(v) for v in trace.beta[i]]
        row += [fmt(v) for v in trace.theta_hat[i]]
        row += [
            fmt(trace.est_error[i]),
            fmt(trace.jammer_utility[i]),
            fmt(trace.radar_utility[i]),
            fmt(trace.margin[i]),
            "true" if trace.feasible[i] else "false",
            fmt(trace.tracking_rmse[i]),
        ]
        writer.writerow(row)
    return buf.getvalue()


def read_run_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summary_payload(stats: SummaryStats, checks: dict, traces: Sequence[EngagementTrace]) -> dict:
    per_step = []
    for i in range(stats.K):
        entry = {"k": i + 1}
        for name in stats.median:
            entry[name] = {
                "median": float(stats.median[name][i]),
                "q25": float(stats.q25[name][i]),
                "q75": float(stats.q75[name][i]),
                "iqr": float(stats.iqr(name)[i]),
            }
        per_step.append(entry)
    return {
        "n_seeds": stats.n_traces,
        "K": stats.K,
        "seeds": [t.seed for t in traces],
        "est_error0_median": stats.est_error0_median,
        "per_step": per_step,
        "acceptance": checks,
        "theta_true": {str(t.seed): t.theta_true.tolist() for t in traces},
        "final_theta_hat": {str(t.seed): t.final_theta_hat.tolist() for t in traces},
    }


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --- SVG ---------------------------------------------------------------------

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        if t >= lo - 1e-12 * step:
            ticks.append(round(t, 12))
        t += step
    return ticks


def line_chart_svg(
    title: str,
    ylabel: str,
    median: Sequence[float],
    q25: Sequence[float] | None = None,
    q75: Sequence[float] | None = None,
    x0: int = 1,
) -> str:
    """Median line over ``k`` with an optional interquartile band. Output is deterministic."""
    y = np.asarray(median, dtype=float)
    n = y.size
    xs = np.arange(x0, x0 + n, dtype=float)
    lows = np.asarray(q25 if q25 is not None else y, dtype=float)
    highs = np.asarray(q75 if q75 is not None else y, dtype=float)
    if n == 0:
        ymin, ymax = 0.0, 1.0
    else:
        ymin, ymax = float(np.min(lows)), float(np.max(highs))
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    xmin, xmax = float(x0), float(max(x0 + n - 1, x0 + 1))

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - xmin) / (xmax - xmin) * pw

    def py(v):
        return MARGIN_T + (ymax - v) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{title}</text>',
    ]
    # axes
    x_axis_y = MARGIN_T + ph
    out.append(
        f'<polyline points="{MARGIN_L},{MARGIN_T} {MARGIN_L},{x_axis_y} {MARGIN_L + pw},{x_axis_y}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in _nice_ticks(ymin, ymax):
        yy = py(t)
        out.append(f'<line x1="{MARGIN_L - 4}" y1="{yy:.2f}" x2="{MARGIN_L}" y2="{yy:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{MARGIN_L - 7}" y="{yy + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{t:g}</text>'
        )
    for t in _nice_ticks(xmin, xmax):
        if abs(t - round(t)) > 1e-9:
            continue
        xx = px(t)
        out.append(f'<line x1="{xx:.2f}" y1="{x_axis_y}" x2="{xx:.2f}" y2="{x_axis_y + 4}" stroke="black"/>')
        out.append(
            f'<text x="{xx:.2f}" y="{x_axis_y + 17}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{int(round(t))}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">interaction k</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{ylabel}</text>'
    )
    if n and q25 is not None and q75 is not None:
        upper = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, highs))
        lower = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs[::-1], lows[::-1]))
        out.append(f'<polygon points="{upper} {lower}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>')
    if n:
        pts = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#08519c" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
