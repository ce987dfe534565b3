"""Self-contained SVG overlay plots of rate regions."""

from __future__ import annotations

import math
from typing import Mapping

from .geometry import RateRegion

SIZE = 600
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _nice_limit(x: float) -> float:
    if x <= 0:
        return 1.0
    step = 10 ** math.floor(math.log10(x)) / 4
    return math.ceil(x * 1.05 / step) * step


def _ticks(limit: float) -> list[float]:
    raw = limit / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    k = int(limit / step + 1e-9)
    return [i * step for i in range(k + 1)]


def _f(x: float) -> str:
    return f"{x:.2f}"


def regions_svg(regions: Mapping[str, RateRegion], title: str | None = None) -> str:
    """Overlay of named regions, colored by sorted name, with a legend."""
    names = sorted(regions)
    limit = _nice_limit(max((max(regions[k].bounds()) for k in names), default=1.0))
    span = SIZE - 2 * MARGIN

    def px(r1, r2):
        return MARGIN + span * r1 / limit, SIZE - MARGIN - span * r2 / limit

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{SIZE / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>')
    # axes and ticks
    x0, y0 = px(0, 0)
    x1, _ = px(limit, 0)
    _, y1 = px(0, limit)
    out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y0)}" stroke="black"/>')
    out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y1)}" stroke="black"/>')
    for t in _ticks(limit):
        tx, _ = px(t, 0)
        _, ty = px(0, t)
        lab = f"{t:g}"
        out.append(f'<line x1="{_f(tx)}" y1="{_f(y0)}" x2="{_f(tx)}" y2="{_f(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_f(tx)}" y="{_f(y0 + 20)}" text-anchor="middle" font-family="sans-serif" font-size="12">{lab}</text>')
        out.append(f'<line x1="{_f(x0 - 5)}" y1="{_f(ty)}" x2="{_f(x0)}" y2="{_f(ty)}" stroke="black"/>')
        out.append(f'<text x="{_f(x0 - 8)}" y="{_f(ty + 4)}" text-anchor="end" font-family="sans-serif" font-size="12">{lab}</text>')
    out.append(f'<text x="{SIZE / 2}" y="{SIZE - 15}" text-anchor="middle" font-family="sans-serif" font-size="13">R1 (bits)</text>')
    out.append(f'<text x="18" y="{SIZE / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" '
               f'transform="rotate(-90 18 {SIZE / 2})">R2 (bits)</text>')
    for i, name in enumerate(names):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in (px(r1, r2) for r1, r2 in regions[name].vertices))
        out.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="0.3" stroke="{color}" stroke-width="1.5">'
                   f'<title>{name}</title></polygon>')
    # legend
    lx, ly = SIZE - MARGIN - 130, MARGIN
    for i, name in enumerate(names):
        color = PALETTE[i % len(PALETTE)]
        y = ly + 20 * i
        out.append(f'<rect x="{lx}" y="{y}" width="14" height="14" fill="{color}" fill-opacity="0.3" stroke="{color}"/>')
        out.append(f'<text x="{lx + 20}" y="{y + 11}" font-family="sans-serif" font-size="12">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
