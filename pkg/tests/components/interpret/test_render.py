import re

import numpy as np
import pytest

from src.components.interpret.render import (
    ansi_report,
    html_report,
    render_feature_subscripts,
    render_heatmap,
    render_highlight,
)
from src.components.interpret.support import WordSupport
from src.core.errors import DimensionError

ANSI_ESCAPE = re.compile(r"\x1b\[[0-9;]*m")
CATEGORIES = ["NEG", "POS"]


@pytest.fixture
def ws():
    return WordSupport(
        tokens=["not", "<good>", "film"],
        p=np.array([[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]]),
        q=np.array([[1.0, 0.0], [0.25, 0.75], [0.5, 0.5]]),
        features=np.array([0, 1, 0]),
        predicted=1,
        r=np.array([1.0, 1.0]),
    )


class TestHighlight:
    def test_intensity_endpoints(self, ws):
        out = render_highlight(ws, CATEGORIES, category=1)
        assert "rgba(31, 119, 180, 0.000)" in out
        assert "rgba(31, 119, 180, 0.750)" in out
        assert render_highlight(ws, CATEGORIES, category=0).count("1.000)") == 1

    def test_one_span_per_word(self, ws):
        out = render_highlight(ws, CATEGORIES)
        rows = out.splitlines()
        assert len(rows) == 2
        for row in rows:
            assert row.count('<span class="w"') == 3

    def test_rows_are_labelled_in_all_categories_mode(self, ws):
        rows = render_highlight(ws, CATEGORIES).splitlines()
        assert '<b class="label">NEG</b>' in rows[0]
        assert '<b class="label">POS</b>' in rows[1]
        assert "label" not in render_highlight(ws, CATEGORIES, category=0).replace('class="w"', "")

    def test_tokens_are_escaped(self, ws):
        assert "&lt;good&gt;" in render_highlight(ws, CATEGORIES, category=1)

    def test_ansi_strips_back_to_the_text(self, ws):
        out = render_highlight(ws, CATEGORIES, category=1, format="ansi")
        assert ANSI_ESCAPE.sub("", out) == "not <good> film"
        assert out.startswith("not ")

    def test_full_support_gets_the_full_colour(self, ws):
        assert "\x1b[48;2;214;39;40m" in render_highlight(ws, CATEGORIES, category=0, format="ansi")

    def test_label_count_mismatch(self, ws):
        with pytest.raises(DimensionError):
            render_highlight(ws, ["only"])

    def test_category_out_of_range(self, ws):
        with pytest.raises(ValueError):
            render_highlight(ws, CATEGORIES, category=2)

    def test_unknown_format(self, ws):
        with pytest.raises(ValueError):
            render_highlight(ws, CATEGORIES, format="pdf")


class TestHeatmap:
    def test_single_cell(self):
        out = render_heatmap(np.array([[1.0]]), ["f0"], ["A"])
        assert ">100</td>" in out
        assert "rgba(31, 119, 180, 1.000)" in out

    def test_ansi_single_cell(self):
        assert "100" in ANSI_ESCAPE.sub("", render_heatmap(np.array([[1.0]]), ["f0"], ["A"], format="ansi"))

    def test_cells_read_back(self):
        matrix = np.array([[0.1, 0.9], [0.56, 0.44], [0.0, 1.0]])
        out = render_heatmap(matrix, ["f0", "f1", "f2"], CATEGORIES)
        values = [int(v) for v in re.findall(r">(\d+)</td>", out)]
        assert values == [10, 90, 56, 44, 0, 100]
        assert out.count("<tr>") == 4

    def test_ansi_rows(self):
        out = ANSI_ESCAPE.sub("", render_heatmap(np.array([[0.25, 0.75]]), ["f0"], CATEGORIES, format="ansi"))
        header, row = out.splitlines()
        assert header.split() == CATEGORIES
        assert row.split() == ["f0", "25", "75"]

    def test_label_mismatch(self):
        with pytest.raises(DimensionError):
            render_heatmap(np.full((2, 2), 0.5), ["f0"], CATEGORIES)

    def test_values_outside_unit_interval(self):
        with pytest.raises(ValueError):
            render_heatmap(np.array([[1.5]]), ["f0"], ["A"])


class TestFeatureSubscripts:
    def test_html(self, ws):
        out = render_feature_subscripts([(ws, "NEG", "POS")])
        assert out.startswith('<div class="row"><b class="label">NEG-POS</b>')
        assert [int(j) for j in re.findall(r"<sub>(\d+)</sub>", out)] == [0, 1, 0]
        assert "rgba(31, 119, 180, 0.900)" in out

    def test_ansi(self, ws):
        out = render_feature_subscripts([(ws, "POS", "POS"), (ws, "NEG", "POS")], format="ansi")
        lines = [ANSI_ESCAPE.sub("", line) for line in out.splitlines()]
        assert lines == ["POS-POS not_0 <good>_1 film_0", "NEG-POS not_0 <good>_1 film_0"]


def test_html_report_is_standalone(ws):
    page = html_report("trec & co", [("Words", render_highlight(ws, CATEGORIES))])
    assert page.startswith("<!DOCTYPE html>")
    assert "<title>trec &amp; co</title>" in page
    assert "<style>" in page and "<h2>Words</h2>" in page
    assert page.rstrip().endswith("</html>")


def test_ansi_report():
    text = ansi_report("run", [("A", "x"), ("B", "y")])
    assert text == "run\n\n== A ==\nx\n\n== B ==\ny\n"
