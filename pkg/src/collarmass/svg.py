"""Minimal deterministic SVG line plots (fixed canvas, fixed number formatting)."""

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)
COLORS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98")


def _fmt(x):
    return f"{x:.2f}"


def _tick(x):
    return f"{x:.4g}"


def line_plot(series, title, xlabel, ylabel, log_y=False):
    """``series`` is a list of (label, xs, ys); returns the SVG document as text."""
    if not series or not any(len(xs) for _, xs, _ in series):
        raise ValueError("nothing to plot")
    tf = (lambda y: math.log10(y)) if log_y else (lambda y: y)
    pts = [(x, tf(y)) for _, xs, ys in series for x, y in zip(xs, ys)
           if math.isfinite(x) and math.isfinite(y) and (y > 0 or not log_y)]
    if not pts:
        raise ValueError("no finite points to plot")
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black"/>']
    for i in range(5):
        fx, fy = x0 + i * (x1 - x0) / 4, y0 + i * (y1 - y0) / 4
        label_y = _tick(10**fy) if log_y else _tick(fy)
        out.append(f'<text x="{_fmt(px(fx))}" y="{HEIGHT - MARGIN["bottom"] + 18}" '
                   f'text-anchor="middle" font-size="11">{_tick(fx)}</text>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{_fmt(py(fy) + 4)}" '
                   f'text-anchor="end" font-size="11">{label_y}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle" '
               f'font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(tf(y)))}" for x, y in zip(xs, ys)
                          if math.isfinite(x) and math.isfinite(y) and (y > 0 or not log_y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{WIDTH - MARGIN["right"] - 8}" y="{MARGIN["top"] + 16 + 14 * k}" '
                   f'text-anchor="end" font-size="11" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_profiles(report):
    """SVG figures for a report produced by the command-line tool, keyed by file stem."""
    if not report:
        raise ValueError("empty report")
    figures = {}
    if "collar" in report:
        leaves = report["collar"].get("leaves")
        if not leaves:
            raise ValueError("collar report has no leaf records")
        s = [leaf["s"] for leaf in leaves]
        figures["collar_profile"] = line_plot(
            [("v_m(ks)", s, [leaf["v"] for leaf in leaves])], "Schwarzschild profile along the collar",
            "s", "v")
        if "min_R_per_leaf" in report:
            figures["collar_min_R"] = line_plot(
                [("min R per leaf", s, report["min_R_per_leaf"])], "Scalar curvature by leaf", "s", "min R")
    if "continuity" in report:
        rows = [r for r in report["continuity"]["rows"] if r["delta"] > 0]
        if not rows:
            raise ValueError("continuity report has no positive-delta rows")
        figures["continuity"] = line_plot(
            [("max |U - U0|", [r["delta"] for r in rows], [r["max_deviation"] for r in rows])],
            "Bound deviation against neighbourhood radius", "delta", "max deviation", log_y=True)
    if "pieces" in report:
        series = [(p.get("name") or f"piece {i}", p["s"], p["rho"]) for i, p in enumerate(report["pieces"])]
        figures["warped_profile"] = line_plot(series, "Areal radius", "s", "rho", log_y=True)
    if not figures:
        raise ValueError("report has no plottable fields")
    return figures
