"""Minimal self-contained SVG plots.

Hand-rolled on purpose: output bytes are a pure function of the data (no
timestamps, no generator metadata, no external assets), which keeps CLI runs
byte-identical across reruns and thread counts.
"""

from __future__ import annotations

W, H = 860, 620
ML, MR, MT, MB = 70, 24, 24, 50  # margins


def _fmt(x: float) -> str:
    return format(float(x), ".2f")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _axes(x_lo, x_hi, y_lo, y_hi, xlabel, ylabel) -> list[str]:
    px = lambda x: ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR)
    py = lambda y: H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB)
    parts = [
        f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    ]
    for t in _ticks(x_lo, x_hi):
        x = _fmt(px(t))
        parts.append(
            f'<line x1="{x}" y1="{H - MB}" x2="{x}" y2="{H - MB + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x}" y="{H - MB + 20}" font-size="12" text-anchor="middle">'
            f"{format(t, '.4g')}</text>"
        )
    for t in _ticks(y_lo, y_hi):
        y = _fmt(py(t))
        parts.append(f'<line x1="{ML - 5}" y1="{y}" x2="{ML}" y2="{y}" stroke="black"/>')
        parts.append(
            f'<text x="{ML - 8}" y="{y}" font-size="12" text-anchor="end" '
            f'dominant-baseline="middle">{format(t, ".4g")}</text>'
        )
    parts.append(
        f'<text x="{(ML + W - MR) // 2}" y="{H - 12}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(MT + H - MB) // 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(MT + H - MB) // 2})">{ylabel}</text>'
    )
    return parts


def region_svg(
    p_vals: list[float],
    gamma_vals: list[float],
    admissible: list[list[bool]],
    invalid: list[list[bool]],
    xlabel: str = "gamma",
    ylabel: str = "p",
) -> str:
    """Shaded-cell raster: rows index p, columns index gamma."""
    x_lo, x_hi = gamma_vals[0], gamma_vals[-1]
    y_lo, y_hi = p_vals[0], p_vals[-1]
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    nx, ny = len(gamma_vals), len(p_vals)
    cw = (W - ML - MR) / nx
    ch = (H - MT - MB) / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    for i in range(ny):
        for j in range(nx):
            if admissible[i][j]:
                fill = "#2c5f9e"
            elif invalid[i][j]:
                fill = "#d8d8d8"
            else:
                continue
            x = _fmt(ML + j * cw)
            y = _fmt(H - MB - (i + 1) * ch)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
                f'fill="{fill}"/>'
            )
    parts.extend(_axes(x_lo, x_hi, y_lo, y_hi, xlabel, ylabel))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curve_svg(
    xs: list[float],
    ys: list[float],
    yerr: list[float] | None = None,
    hline: float | None = None,
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Polyline with optional error whiskers and a horizontal reference line."""
    x_lo, x_hi = min(xs), max(xs)
    y_all = list(ys) + ([hline] if hline is not None else [])
    if yerr is not None:
        y_all += [y - 3 * e for y, e in zip(ys, yerr)]
        y_all += [y + 3 * e for y, e in zip(ys, yerr)]
    y_lo, y_hi = min(y_all), max(y_all)
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo -= pad
    y_hi += pad
    px = lambda x: ML + (x - x_lo) / (x_hi - x_lo or 1.0) * (W - ML - MR)
    py = lambda y: H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    if hline is not None:
        y = _fmt(py(hline))
        parts.append(
            f'<line x1="{ML}" y1="{y}" x2="{W - MR}" y2="{y}" stroke="#c0392b" '
            'stroke-width="1.5" stroke-dasharray="6 4"/>'
        )
    if yerr is not None:
        for x, y, e in zip(xs, ys, yerr):
            xp = _fmt(px(x))
            parts.append(
                f'<line x1="{xp}" y1="{_fmt(py(y - 3 * e))}" x2="{xp}" '
                f'y2="{_fmt(py(y + 3 * e))}" stroke="#7f8c8d" stroke-width="0.8"/>'
            )
    pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#2c5f9e" stroke-width="1.2"/>'
    )
    parts.extend(_axes(x_lo, x_hi, y_lo, y_hi, xlabel, ylabel))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
