"""Self-contained SVG line plots for the experiment tables.

No plotting dependency: the renderer emits polylines, shaded error bands
and tick labels directly, with fixed decimal formatting so identical data
produces identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .csvio import read_csv
from .errors import InvalidInputError

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 40, 55
PALETTE = ["#2e7d32", "#6a1b9a", "#1565c0", "#ef6c00", "#c62828", "#00838f", "#5d4037"]

PLOT_KINDS = ("fig3", "sweep", "moments")


@dataclass
class Series:
    name: str
    xs: list[float]
    ys: list[float]
    errs: list[float] = field(default_factory=list)


def _fmt(x: float) -> str:
    return format(x, ".6g")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def render_line_svg(
    series: list[Series], title: str, xlabel: str, ylabel: str
) -> str:
    xs_all = [x for s in series for x in s.xs]
    ys_all = [y for s in series for y in s.ys]
    errs_all = [e for s in series for e in (s.errs or [0.0] * len(s.xs))]
    if xs_all:
        x_lo, x_hi = min(xs_all), max(xs_all)
        y_lo = min(y - e for y, e in zip(ys_all, errs_all))
        y_hi = max(y + e for y, e in zip(ys_all, errs_all))
        if x_hi == x_lo:
            x_hi = x_lo + 1.0
        if y_hi == y_lo:
            y_hi = y_lo + 1.0
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0

    inner_w = WIDTH - MARGIN_L - MARGIN_R
    inner_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * inner_w

    def py(y: float) -> float:
        return MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * inner_h

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    parts.append(
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{title}</text>'
    )
    # axes
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    parts.append(
        f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{WIDTH - MARGIN_R}" y2="{y0}" stroke="black" stroke-width="1"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{_fmt(px(tx))}" y1="{y0}" x2="{_fmt(px(tx))}" y2="{y0 + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px(tx))}" y="{y0 + 20}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(py(ty))}" x2="{x0}" y2="{_fmt(py(ty))}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 9}" y="{_fmt(py(ty) + 4)}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{_fmt(ty)}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + inner_w / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_T + inner_h / 2}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {MARGIN_T + inner_h / 2})">{ylabel}</text>'
    )
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if s.errs and any(e > 0 for e in s.errs):
            upper = [(px(x), py(y + e)) for x, y, e in zip(s.xs, s.ys, s.errs)]
            lower = [(px(x), py(y - e)) for x, y, e in zip(s.xs, s.ys, s.errs)]
            path = "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in upper + lower[::-1]) + " Z"
            parts.append(f'<path d="{path}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.xs, s.ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for x, y in zip(s.xs, s.ys):
            parts.append(
                f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="2.6" fill="{color}"/>'
            )
        ly = MARGIN_T + 14 + 16 * i
        lx = WIDTH - MARGIN_R + 10
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 23}" y="{ly}" font-size="11" font-family="sans-serif">{s.name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _column(header: list[str], name: str) -> int:
    try:
        return header.index(name)
    except ValueError:
        raise InvalidInputError(f"CSV lacks required column {name!r}", module="cli")


def _to_float(text: str) -> float:
    return float(text)


def series_from_csv(path: str | Path, kind: str, metric: str = "mu1") -> tuple[list[Series], str, str, str]:
    """Map a known CSV schema onto plot series (one per group)."""
    header, rows = read_csv(path)
    if kind == "fig3":
        if rows:
            it, ik, iv, ie = (_column(header, c) for c in ("t", "perm_count", "A_t_normalized", "std_error"))
        groups: dict[str, Series] = {}
        for row in rows:
            if row[iv] == "nan":
                continue
            key = row[ik]
            s = groups.setdefault(key, Series(f"{key} transpositions", [], [], []))
            s.xs.append(_to_float(row[it]))
            s.ys.append(_to_float(row[iv]))
            s.errs.append(_to_float(row[ie]))
        return (
            list(groups.values()),
            "anti-randomness vs permuted observables",
            "moment order t",
            "normalized deviation",
        )
    if kind == "sweep":
        if metric not in ("mu1", "var"):
            raise InvalidInputError("sweep metric must be mu1 or var", module="cli")
        vcol, ecol = ("mu1_minus_half", "mu1_stderr") if metric == "mu1" else ("var", "var_stderr")
        if rows:
            im, inn, il, ir, iv, ie = (
                _column(header, c) for c in ("model", "n", "L", "regime", vcol, ecol)
            )
        groups = {}
        for row in rows:
            key = f"{row[im]} n={row[inn]} {row[ir]}"
            s = groups.setdefault(key, Series(key, [], [], []))
            s.xs.append(_to_float(row[il]))
            s.ys.append(_to_float(row[iv]))
            s.errs.append(_to_float(row[ie]))
        label = "mean margin - 1/2" if metric == "mu1" else "margin variance"
        return list(groups.values()), "margin moments vs depth", "layers", label
    if kind == "moments":
        if rows:
            it, ik, iv, ie = (_column(header, c) for c in ("t", "kind", "value", "std_error"))
        groups = {}
        for row in rows:
            s = groups.setdefault(row[ik], Series(row[ik], [], [], []))
            s.xs.append(_to_float(row[it]))
            s.ys.append(_to_float(row[iv]))
            s.errs.append(_to_float(row[ie]))
        return list(groups.values()), "moments", "order t", "moment value"
    raise InvalidInputError(f"unknown plot kind {kind!r}", module="cli")


def plot_csv(csv_path: str | Path, kind: str, out_path: str | Path, metric: str = "mu1") -> Path:
    series, title, xlabel, ylabel = series_from_csv(csv_path, kind, metric)
    series.sort(key=lambda s: s.name)
    svg = render_line_svg(series, title, xlabel, ylabel)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg, encoding="utf-8")
    return out_path
