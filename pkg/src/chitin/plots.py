"""Dependency-free SVG rendering for the two plot shapes the CLI emits:
accuracy boxplots and average-accuracy bar charts. Data-first: callers
always get CSVs; SVG is an optional convenience."""

W, H = 640, 400
MARGIN = 60


def _scale(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return (out_lo + out_hi) / 2
    return out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo)


def _frame(title, y_label):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'font-family="sans-serif" font-size="12">',
        f'<text x="{W / 2}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>',
        f'<line x1="{MARGIN}" y1="{H - MARGIN}" x2="{W - 20}" '
        f'y2="{H - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="30" x2="{MARGIN}" y2="{H - MARGIN}" '
        f'stroke="black"/>',
        f'<text x="15" y="{H / 2}" transform="rotate(-90 15 {H / 2})" '
        f'text-anchor="middle">{y_label}</text>',
    ]
    return parts


def _y_axis(parts, lo, hi):
    for i in range(6):
        v = lo + i * (hi - lo) / 5
        y = _scale(v, lo, hi, H - MARGIN, 30)
        parts.append(f'<line x1="{MARGIN - 4}" y1="{y:.1f}" x2="{MARGIN}" '
                     f'y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN - 8}" y="{y + 4:.1f}" '
                     f'text-anchor="end">{v:.2f}</text>')


def _quartiles(values):
    s = sorted(values)
    n = len(s)

    def q(p):
        pos = p * (n - 1)
        i = int(pos)
        frac = pos - i
        return s[i] if i + 1 >= n else s[i] * (1 - frac) + s[i + 1] * frac

    return min(s), q(0.25), q(0.5), q(0.75), max(s)


def boxplot_svg(groups, title="Accuracy distribution", y_label="accuracy"):
    """groups: ordered (label, values) pairs."""
    all_vals = [v for _, vals in groups for v in vals]
    lo, hi = min(all_vals), max(all_vals)
    pad = 0.05 * (hi - lo) if hi > lo else 0.05
    lo, hi = lo - pad, hi + pad
    parts = _frame(title, y_label)
    _y_axis(parts, lo, hi)
    slot = (W - 20 - MARGIN) / len(groups)
    for i, (label, vals) in enumerate(groups):
        cx = MARGIN + (i + 0.5) * slot
        half = min(30.0, slot * 0.3)
        vmin, q1, med, q3, vmax = _quartiles(vals)
        y = {v: _scale(v, lo, hi, H - MARGIN, 30)
             for v in (vmin, q1, med, q3, vmax)}
        parts.append(f'<line x1="{cx}" y1="{y[vmin]:.1f}" x2="{cx}" '
                     f'y2="{y[vmax]:.1f}" stroke="black"/>')
        parts.append(f'<rect x="{cx - half:.1f}" y="{y[q3]:.1f}" '
                     f'width="{2 * half:.1f}" '
                     f'height="{max(y[q1] - y[q3], 0.5):.1f}" '
                     f'fill="#9ecae1" stroke="black"/>')
        parts.append(f'<line x1="{cx - half:.1f}" y1="{y[med]:.1f}" '
                     f'x2="{cx + half:.1f}" y2="{y[med]:.1f}" '
                     f'stroke="black" stroke-width="2"/>')
        parts.append(f'<text x="{cx}" y="{H - MARGIN + 16}" '
                     f'text-anchor="middle">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def bar_svg(bars, title="Average accuracy", y_label="accuracy"):
    """bars: ordered (label, value) pairs."""
    values = [v for _, v in bars]
    lo, hi = 0.0, max(values) * 1.1 if max(values) > 0 else 1.0
    parts = _frame(title, y_label)
    _y_axis(parts, lo, hi)
    slot = (W - 20 - MARGIN) / len(bars)
    for i, (label, v) in enumerate(bars):
        cx = MARGIN + (i + 0.5) * slot
        half = min(35.0, slot * 0.35)
        top = _scale(v, lo, hi, H - MARGIN, 30)
        parts.append(f'<rect x="{cx - half:.1f}" y="{top:.1f}" '
                     f'width="{2 * half:.1f}" '
                     f'height="{H - MARGIN - top:.1f}" '
                     f'fill="#74c476" stroke="black"/>')
        parts.append(f'<text x="{cx}" y="{top - 5:.1f}" '
                     f'text-anchor="middle">{v:.3f}</text>')
        parts.append(f'<text x="{cx}" y="{H - MARGIN + 16}" '
                     f'text-anchor="middle">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
