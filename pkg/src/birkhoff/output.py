"""Tabular and vector-graphics output.

CSV files carry provenance as leading ``# key: value`` lines, then a header
row, then rows of floats written with ``repr`` so that parsing and re-emitting
a file reproduces it byte for byte.  JSON output mirrors the same table.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["Table", "format_csv", "parse_csv", "format_json", "svg_document", "write_text"]


@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]]
    meta: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_columns(cls, columns: dict, meta: dict | None = None) -> "Table":
        names = list(columns)
        data = np.column_stack([np.asarray(columns[n], dtype=float).ravel() for n in names])
        return cls(names, [[float(v) for v in row] for row in data], dict(meta or {}))

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows])


def format_csv(table: Table) -> str:
    buf = io.StringIO()
    for key, value in table.meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def parse_csv(text: str) -> Table:
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#") and not body:
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        else:
            body.append(line)
    reader = csv.reader(body)
    try:
        columns = next(reader)
    except StopIteration:
        raise ValueError("CSV has no header row") from None
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(columns):
            raise ValueError(f"CSV row {lineno} has {len(rec)} fields, expected {len(columns)}")
        rows.append([float(v) for v in rec])
    return Table(columns, rows, meta)


def format_json(table: Table) -> str:
    payload = {
        "meta": table.meta,
        "columns": table.columns,
        "rows": [dict(zip(table.columns, row)) for row in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def svg_document(
    paths: list,
    markers: list | None = None,
    caption: str = "",
    size: int = 800,
    margin: int = 40,
) -> str:
    """Standalone SVG 1.1 with every path scaled into a square viewBox.

    ``paths`` holds (points, style) pairs with points as complex numbers and
    style a dict of SVG attributes; two-point paths become ``<line>``.
    ``markers`` holds (point, label, colour) triples drawn as small circles.
    The y axis points up, as in the plane.
    """
    markers = markers or []
    allpts = [np.asarray(p, dtype=complex).ravel() for p, _ in paths]
    allpts += [np.array([complex(m[0])]) for m in markers]
    if not allpts or sum(a.size for a in allpts) < 2:
        raise ValueError("an SVG plot needs at least two points")
    pts = np.concatenate(allpts)
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-300)
    scale = (size - 2 * margin) / span
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)

    def xy(z):
        z = np.asarray(z, dtype=complex)
        return size / 2 + (z.real - cx) * scale, size / 2 - (z.imag - cy) * scale

    def attrs(style):
        return " ".join(f'{k}="{escape(str(v))}"' for k, v in style.items())

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    for points, style in paths:
        style = {"fill": "none", "stroke": "black", "stroke-width": 1.5, **style}
        x, y = xy(points)
        if x.size == 2:
            out.append(
                f'<line x1="{x[0]:.3f}" y1="{y[0]:.3f}" x2="{x[1]:.3f}" y2="{y[1]:.3f}" {attrs(style)}/>'
            )
        else:
            coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{coords}" {attrs(style)}/>')
    for point, label, colour in markers:
        x, y = xy(point)
        out.append(f'<circle cx="{float(x):.3f}" cy="{float(y):.3f}" r="5" fill="{escape(colour)}"/>')
        if label:
            out.append(
                f'<text x="{float(x) + 8:.3f}" y="{float(y) - 8:.3f}" font-size="14" '
                f'font-family="sans-serif">{escape(label)}</text>'
            )
    if caption:
        out.append(
            f'<text x="{margin}" y="{size - 12}" font-size="16" font-family="sans-serif">'
            f"{escape(caption)}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
