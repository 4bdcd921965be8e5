"""Minimal deterministic SVG line/point charts.

Output depends only on the numbers passed in, so a chart regenerated from
the same CSV is byte-identical.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["line_chart"]

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H = 640, 420
ML, MR, MT, MB = 70, 20, 40, 55


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * abs(hi):
        out.append(round(t, 12))
        t += step
    return out


def line_chart(series, title="", xlabel="", ylabel="", logx=False, hline=None) -> str:
    """Render ``series`` = ``{name: (xs, ys[, yerr])}`` as an SVG string."""
    def tx(v):
        return math.log10(v) if logx else v

    pts = [(tx(x), y) for s in series.values() for x, y in zip(s[0], s[1])
           if math.isfinite(y) and (not logx or x > 0)]
    errs = [e for s in series.values() if len(s) > 2 for e in s[2] if math.isfinite(e)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    pad_err = max(errs) if errs else 0.0
    y0 = min(p[1] for p in pts) - pad_err
    y1 = max(p[1] for p in pts) + pad_err
    if hline is not None:
        y0, y1 = min(y0, hline), max(y1, hline)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = W - ML - MR, H - MT - MB

    def px(v):
        return ML + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MT + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        label = f"{10 ** t:.4g}" if logx else f"{t:.4g}"
        out.append(f'<line x1="{px(t):.2f}" y1="{MT + ph}" x2="{px(t):.2f}" y2="{MT + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{MT + ph + 18}" text-anchor="middle">{label}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ML - 5}" y1="{py(t):.2f}" x2="{ML}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{ML - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    if hline is not None:
        out.append(f'<line x1="{ML}" y1="{py(hline):.2f}" x2="{ML + pw}" y2="{py(hline):.2f}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{ML + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MT + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MT + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (name, s) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        errs_s = s[2] if len(s) > 2 else [float("nan")] * len(s[0])
        kept = [(px(tx(x)), py(y), y, e) for x, y, e in zip(s[0], s[1], errs_s)
                if math.isfinite(y) and (not logx or x > 0)]
        if len(kept) > 1:
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b, _, _ in kept)
            out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        for a, b, y, e in kept:
            out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{colour}"/>')
            if math.isfinite(e):
                out.append(f'<line x1="{a:.2f}" y1="{py(y - e):.2f}" x2="{a:.2f}" y2="{py(y + e):.2f}" '
                           f'stroke="{colour}"/>')
        ly = MT + 14 + 16 * i
        out.append(f'<rect x="{ML + pw - 150}" y="{ly - 9}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{ML + pw - 135}" y="{ly}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
