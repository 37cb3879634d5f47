"""Minimal deterministic SVG for the bipartite fee band."""
from __future__ import annotations

from fractions import Fraction

from .analytic import BoundsReport

WIDTH, HEIGHT, MARGIN = 640, 420, 60


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def band_svg(reports: list[BoundsReport], title: str = "") -> str:
    """Active lower (blue) and active upper (red) bound against c."""
    xs = [r.family.c for r in reports]
    lows = [r.lower for r in reports]
    ups = [r.upper for r in reports]
    x0, x1 = min(xs), max(xs)
    y1 = max(ups) * Fraction(21, 20)
    span_x = max(x1 - x0, 1)

    def px(c):
        return MARGIN + (WIDTH - 2 * MARGIN) * (c - x0) / span_x

    def py(v):
        return HEIGHT - MARGIN - (HEIGHT - 2 * MARGIN) * float(v / y1)

    def line(values):
        return " ".join(f"{_fmt(px(c))},{_fmt(py(v))}" for c, v in zip(xs, values))

    band = line(ups) + " " + " ".join(
        f"{_fmt(px(c))},{_fmt(py(v))}" for c, v in reversed(list(zip(xs, lows))))
    bottom, left = HEIGHT - MARGIN, MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{WIDTH - MARGIN}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{MARGIN}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 20}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">c (centers)</text>',
        f'<text x="{left - 8}" y="{bottom}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">0</text>',
        f'<text x="{left - 8}" y="{MARGIN + 4}" text-anchor="end" font-family="sans-serif" '
        f'font-size="10">{float(y1):.4g}</text>',
        f'<text x="{left}" y="{bottom + 14}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="10">{x0}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{bottom + 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="10">{x1}</text>',
        f'<polygon points="{band}" fill="#cccccc" stroke="none"/>',
        f'<polyline points="{line(lows)}" fill="none" stroke="blue" stroke-width="1"/>',
        f'<polyline points="{line(ups)}" fill="none" stroke="red" stroke-width="1"/>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
