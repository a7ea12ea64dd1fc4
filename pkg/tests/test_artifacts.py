import csv
import json
from fractions import Fraction

import pytest

from i4mirror import __version__
from i4mirror.artifacts import (
    ReportEntry,
    provenance,
    series_document,
    write_json,
    write_series_csv,
)
from i4mirror.exceptions import I4MirrorError
from i4mirror.mirror import enumerate_pairs
from i4mirror.qseries import ExponentLattice, QSeries
from i4mirror.svg import render_base, render_broken_lines

Z = ExponentLattice.uniform("z")
XY = ExponentLattice.uniform("x", "y")


def test_provenance():
    block = provenance("derived", order=3)
    assert block == {"provenance": "derived", "i4mirror_version": __version__, "order": 3}
    with pytest.raises(ValueError):
        provenance("guessed")


def test_write_series_document(tmp_path, schemas):
    series = {"bl": QSeries(Z, {(0,): 1, (1,): 12}, 1)}
    document = series_document(series, "published", order=1)
    (path,) = write_json(tmp_path / "bl.json", document, schemas.series_document)
    data = json.loads(path.read_text())
    assert data["metadata"]["provenance"] == "published"
    assert data["series"]["bl"]["terms"][1] == {"exp": [1], "coeff": "12"}


def test_write_json_refuses_invalid_documents(tmp_path, schemas):
    with pytest.raises(I4MirrorError):
        list(write_json(tmp_path / "bad.json", {"series": {}}, schemas.series_document))
    assert not (tmp_path / "bad.json").exists()


def test_report_entry(tmp_path, schemas):
    entry = ReportEntry("t(v)", "v - 2v^5", "v - 2v^5", provenance="published", passed=False)
    assert entry.status == "FAILED"
    report = {"metadata": provenance("derived"), "passed": False, "checks": [entry.to_json()]}
    (path,) = write_json(tmp_path / "verify.json", report, schemas.report)
    assert json.loads(path.read_text())["checks"][0]["identity"] == "t(v)"


def test_write_series_csv(tmp_path):
    series = {
        "b": QSeries(Z, {(2,): -3}, 2),
        "a": QSeries(XY, {(1, 0): Fraction(1, 2)}, 2),
    }
    (path,) = write_series_csv(tmp_path / "series.csv", series)
    with path.open() as handle:
        rows = list(csv.reader(handle))
    assert rows == [
        ["name", "x", "y", "numerator", "denominator"],
        ["a", "1", "0", "1", "2"],
        ["b", "2", "", "-3", "1"],
    ]


def test_render_base(tmp_path):
    (path,) = render_base(tmp_path / "figures" / "base.svg", radius=3)
    text = path.read_text()
    assert "<svg" in text
    assert "D1" in text


def test_render_broken_lines(tmp_path, empty_walls):
    pairs = enumerate_pairs((0, 1), (2, 1), (2, 2), empty_walls, 9)
    (path,) = render_broken_lines(tmp_path / "lines.svg", pairs, (0, 1), (2, 1))
    text = path.read_text()
    assert "<svg" in text
    assert "2D2" in text
