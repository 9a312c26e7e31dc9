import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birkhoff.output import Table, format_csv, format_json, parse_csv, svg_document

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
SVG = "{http://www.w3.org/2000/svg}"


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda ncol: st.lists(st.lists(finite, min_size=ncol, max_size=ncol), min_size=0, max_size=12)
    )
)
def test_csv_round_trip_is_byte_identical(rows):
    ncol = len(rows[0]) if rows else 2
    table = Table([f"c{j}" for j in range(ncol)], rows, {"generator": "test", "domain": "disc{r=1}"})
    text = format_csv(table)
    back = parse_csv(text)
    assert back.columns == table.columns
    assert back.meta == table.meta
    assert back.rows == table.rows
    assert format_csv(back) == text


def test_json_mirrors_csv():
    table = Table.from_columns({"s": [0.0, 0.5], "X1": [1e-3, -2.5e-17]}, {"C_L": "0.159"})
    payload = json.loads(format_json(table))
    assert payload["meta"] == {"C_L": "0.159"}
    assert payload["columns"] == ["s", "X1"]
    assert payload["rows"][1] == {"s": 0.5, "X1": -2.5e-17}
    assert np.array_equal(parse_csv(format_csv(table)).column("X1"), table.column("X1"))


def test_malformed_csv_row_raises():
    with pytest.raises(ValueError, match="row 3"):
        parse_csv("a,b\n1.0,2.0\n3.0\n")
    with pytest.raises(ValueError):
        parse_csv("# only: metadata\n")


def test_two_point_path_is_a_line():
    doc = svg_document([(np.array([0, 1 + 1j]), {"stroke": "red"})], caption="a < b & c")
    root = ET.fromstring(doc.encode())
    assert len(root.findall(f"{SVG}line")) == 1
    assert not root.findall(f"{SVG}polyline")


def test_polyline_and_markers_are_valid_xml():
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 50))
    doc = svg_document([(z, {})], [(z[0], "start", "#1f77b4")])
    root = ET.fromstring(doc.encode())
    assert len(root.findall(f"{SVG}polyline")) == 1
    assert len(root.findall(f"{SVG}circle")) == 1


def test_y_axis_points_up():
    doc = svg_document([(np.array([0, 1j]), {})])
    line = ET.fromstring(doc.encode()).find(f"{SVG}line")
    assert float(line.get("y2")) < float(line.get("y1"))


def test_fewer_than_two_points_raises():
    with pytest.raises(ValueError):
        svg_document([(np.array([1.0 + 0j]), {})])
    with pytest.raises(ValueError):
        svg_document([])
