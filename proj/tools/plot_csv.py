#!/usr/bin/env python3
"""Render a conetrap CSV table as an SVG scatter plot.

This script only draws numbers that are already in the file; it computes
nothing. Pick the columns to place on the axes, e.g.:

    conetrap sweep-delta --config tools/configs/sweep.toml --out sweep.csv
    python3 tools/plot_csv.py sweep.csv --x re_lambda --y im_lambda -o sweep.svg

    conetrap scan-contrast --config tools/configs/scan.toml --out scan.csv
    python3 tools/plot_csv.py scan.csv --x kappa --y eta_or_empty -o scan.svg
"""

import argparse
import csv
import sys


def read_table(path):
    header = []
    rows = []
    columns = None
    with open(path, newline="") as f:
        for record in csv.reader(f):
            if not record:
                continue
            if record[0].startswith("#"):
                header.append(record[0])
                continue
            if columns is None:
                columns = record
            else:
                rows.append(record)
    if columns is None:
        sys.exit(f"{path}: no column line found")
    return header, columns, rows


def pick(columns, rows, name):
    if name not in columns:
        sys.exit(f"column '{name}' not in {columns}")
    k = columns.index(name)
    out = []
    for i, row in enumerate(rows):
        cell = row[k] if k < len(row) else ""
        if cell == "":
            out.append(None)  # empty cells (e.g. eta where no pair exists)
        else:
            try:
                out.append(float(cell))
            except ValueError:
                sys.exit(f"row {i + 1}: cell '{cell}' in '{name}' is not a number")
    return out


def svg_scatter(xs, ys, x_name, y_name, title):
    pts = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
    if not pts:
        sys.exit("no plottable (x, y) pairs after dropping empty cells")
    w, h, m = 640, 440, 60
    x_lo, x_hi = min(p[0] for p in pts), max(p[0] for p in pts)
    y_lo, y_hi = min(p[1] for p in pts), max(p[1] for p in pts)
    x_pad = (x_hi - x_lo) * 0.06 or abs(x_lo) * 0.06 or 1.0
    y_pad = (y_hi - y_lo) * 0.06 or abs(y_lo) * 0.06 or 1.0
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def sx(x):
        return m + (x - x_lo) / (x_hi - x_lo) * (w - 2 * m)

    def sy(y):
        return h - m - (y - y_lo) / (y_hi - y_lo) * (h - 2 * m)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="monospace" font-size="12">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2}" y="24" text-anchor="middle">{title}</text>',
        f'<rect x="{m}" y="{m}" width="{w - 2 * m}" height="{h - 2 * m}" '
        'fill="none" stroke="black"/>',
    ]
    for tick in range(5):
        tx = x_lo + (x_hi - x_lo) * tick / 4
        ty = y_lo + (y_hi - y_lo) * tick / 4
        parts.append(
            f'<text x="{sx(tx):.1f}" y="{h - m + 18}" text-anchor="middle">{tx:.4g}</text>'
        )
        parts.append(
            f'<text x="{m - 6}" y="{sy(ty):.1f}" text-anchor="end" '
            f'dominant-baseline="middle">{ty:.4g}</text>'
        )
        parts.append(
            f'<line x1="{sx(tx):.1f}" y1="{m}" x2="{sx(tx):.1f}" y2="{h - m}" '
            'stroke="#ddd"/>'
        )
        parts.append(
            f'<line x1="{m}" y1="{sy(ty):.1f}" x2="{w - m}" y2="{sy(ty):.1f}" '
            'stroke="#ddd"/>'
        )
    parts.append(
        f'<text x="{w / 2}" y="{h - 14}" text-anchor="middle">{x_name}</text>'
    )
    parts.append(
        f'<text x="16" y="{h / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {h / 2})">{y_name}</text>'
    )
    poly = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#888"/>')
    for x, y in pts:
        parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3.5" fill="#1f4e99"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv_path")
    ap.add_argument("--x", required=True, help="column for the horizontal axis")
    ap.add_argument("--y", required=True, help="column for the vertical axis")
    ap.add_argument("-o", "--out", required=True, help="output .svg path")
    ap.add_argument("--title", default=None)
    args = ap.parse_args()

    header, columns, rows = read_table(args.csv_path)
    xs = pick(columns, rows, args.x)
    ys = pick(columns, rows, args.y)
    title = args.title if args.title is not None else f"{args.y} vs {args.x}"
    with open(args.out, "w") as f:
        f.write(svg_scatter(xs, ys, args.x, args.y, title))
    print(f"wrote {args.out} ({sum(1 for p in zip(xs, ys) if None not in p)} points)")


if __name__ == "__main__":
    main()
