"""Deterministic SVG plots for correlation-series files.

Every coordinate is formatted with a fixed "%.6g" so identical input
bytes produce identical output bytes; no timestamps, no randomness, no
external assets.  The layout is two panels: |c_N| on a log axis and the
running quadratic average A_N = (1/N) sum |c_n|^2 on a linear axis.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

CSV_HEADER = "N,re,im,abs,err_estimate"
LOG_FLOOR = 1e-16

_W, _H = 840, 320
_PANEL_W, _PANEL_H = 330, 220
_LEFT1, _LEFT2, _TOP = 60, 475, 50


def parse_series_csv(text: str) -> tuple[list[int], list[complex],
                                         list[float]]:
    """Parse a series file back into (N, complex values, error estimates).

    Rejects a missing/foreign header, malformed rows, and an empty series.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ConfigError(f"series file must start with header {CSV_HEADER!r}")
    rows = lines[1:]
    if not rows:
        raise ConfigError("series file has no data rows")
    ns, values, errs = [], [], []
    for ln in rows:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ConfigError(f"malformed series row: {ln!r}")
        try:
            ns.append(int(parts[0]))
            re, im, _mag, err = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise ConfigError(f"malformed series row: {ln!r}") from exc
        values.append(complex(re, im))
        errs.append(err)
    return ns, values, errs


def _fmt(v: float) -> str:
    out = f"{float(v):.6g}"
    return "0" if out == "-0" else out


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _panel(x0: float, title: str, xs, ys, y_lo: float, y_hi: float,
           x_max: float, marker_class: str, tick_fmt) -> list[str]:
    out = [f'<g font-family="monospace" font-size="11">']
    out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(_TOP)}" width="{_fmt(_PANEL_W)}" '
               f'height="{_fmt(_PANEL_H)}" fill="none" stroke="#444"/>')
    out.append(f'<text x="{_fmt(x0 + _PANEL_W / 2)}" y="{_fmt(_TOP - 14)}" '
               f'text-anchor="middle" font-size="13">{title}</text>')

    def px(n):
        return x0 + _PANEL_W * (n / x_max if x_max > 0 else 0.5)

    def py(v):
        return _TOP + _PANEL_H * (1.0 - (v - y_lo) / (y_hi - y_lo))

    for tv in _ticks(y_lo, y_hi):
        y = py(tv)
        out.append(f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(x0)}" '
                   f'y2="{_fmt(y)}" stroke="#444"/>')
        out.append(f'<text x="{_fmt(x0 - 8)}" y="{_fmt(y + 4)}" '
                   f'text-anchor="end">{tick_fmt(tv)}</text>')
    for tn in _ticks(0.0, x_max):
        x = px(tn)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(_TOP + _PANEL_H)}" x2="{_fmt(x)}" '
                   f'y2="{_fmt(_TOP + _PANEL_H + 4)}" stroke="#444"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(_TOP + _PANEL_H + 18)}" '
                   f'text-anchor="middle">{_fmt(round(tn))}</text>')
    out.append(f'<text x="{_fmt(x0 + _PANEL_W / 2)}" y="{_fmt(_TOP + _PANEL_H + 36)}" '
               f'text-anchor="middle">N</text>')

    if len(xs):
        pts = " ".join(f"{_fmt(px(n))},{_fmt(py(v))}" for n, v in zip(xs, ys))
        if len(xs) > 1:
            out.append(f'<polyline points="{pts}" fill="none" stroke="#1f6feb" '
                       f'stroke-width="1.2"/>')
        for n, v in zip(xs, ys):
            out.append(f'<circle class="{marker_class}" cx="{_fmt(px(n))}" '
                       f'cy="{_fmt(py(v))}" r="2.6" fill="#1f6feb"/>')
    else:
        out.append(f'<text x="{_fmt(x0 + _PANEL_W / 2)}" '
                   f'y="{_fmt(_TOP + _PANEL_H / 2)}" text-anchor="middle" '
                   f'fill="#888">no entries</text>')
    out.append("</g>")
    return out


def render_series_svg(csv_text: str, title: str = "") -> str:
    """Two-panel SVG (log10 |c_N|, linear A_N) for a series file."""
    parsed_ns, parsed_values, _errs = parse_series_csv(csv_text)
    ns = np.array(parsed_ns)
    mags = np.abs(np.array(parsed_values))
    x_max = float(max(np.max(ns), 1))

    logs = np.log10(np.maximum(mags, LOG_FLOOR))
    lo = float(np.floor(np.min(logs)))
    hi = float(np.ceil(np.max(logs)))
    if hi <= lo:
        hi = lo + 1.0

    pos = ns >= 1
    a_ns = ns[pos]
    if a_ns.size:
        order = np.argsort(a_ns)
        a_ns = a_ns[order]
        avg = np.cumsum(mags[pos][order] ** 2) / np.arange(1, a_ns.size + 1)
        a_hi = max(float(np.max(avg)) * 1.1, 1e-12)
    else:
        avg = np.zeros(0)
        a_hi = 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{_escape(title)}</text>',
    ]
    parts += _panel(_LEFT1, "log10 |c_N|", ns, logs, lo, hi, x_max,
                    "pt-mag", lambda v: _fmt(v))
    parts += _panel(_LEFT2, "running average A_N", a_ns, avg, 0.0, a_hi, x_max,
                    "pt-avg", lambda v: _fmt(v))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def emit_plot(csv_path, svg_path, title: str = "") -> None:
    """Render the series file at csv_path to a self-contained SVG."""
    with open(csv_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    svg = render_series_svg(text, title=title or str(csv_path).rsplit("/", 1)[-1])
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
