import xml.etree.ElementTree as ET

import pytest

from greengdp import InputError, PlotSeries, PlotSpec, render_category_bars, render_svg
from greengdp.svg import series_from_indicator
from greengdp.panel import IndicatorSeries

SVG_NS = "{http://www.w3.org/2000/svg}"


def line_spec(**overrides):
    defaults = dict(
        title="GDP vs GGDP",
        kind="line",
        series=(PlotSeries("GDP", (2000, 2001, 2002), (1.0, 2.0, 3.0)),),
        y_label="billions of current US$",
    )
    defaults.update(overrides)
    return PlotSpec(**defaults)


def polylines(svg_text):
    root = ET.fromstring(svg_text)
    return root.findall(f".//{SVG_NS}polyline")


class TestRenderSvg:
    def test_single_line_series(self):
        svg = render_svg(line_spec())
        lines = polylines(svg)
        assert len(lines) == 1
        points = lines[0].attrib["points"].split()
        assert len(points) == 3
        assert all("," in p for p in points)

    def test_well_formed_document(self):
        root = ET.fromstring(render_svg(line_spec()))
        assert root.tag == f"{SVG_NS}svg"
        assert root.attrib["viewBox"] == "0 0 720.00 405.00"

    def test_byte_identical_for_identical_specs(self):
        assert render_svg(line_spec()) == render_svg(line_spec())

    def test_data_series_groups_and_legend(self):
        spec = line_spec(
            series=(
                PlotSeries("GDP", (2000, 2001), (1.0, 2.0)),
                PlotSeries("GGDP", (2000, 2001), (0.5, 1.5)),
            )
        )
        svg = render_svg(spec)
        root = ET.fromstring(svg)
        groups = [g.attrib["data-series"] for g in root.findall(f".//{SVG_NS}g")]
        assert groups == ["GDP", "GGDP"]
        texts = [t.text for t in root.findall(f".//{SVG_NS}text")]
        assert "GDP" in texts and "GGDP" in texts  # legend labels

    def test_overlay_first_series_becomes_bars(self):
        spec = line_spec(
            kind="overlay",
            series=(
                PlotSeries("change", (2000, 2001), (1.0, -2.0)),
                PlotSeries("trend", (2000, 2001), (0.5, 1.5)),
            ),
        )
        root = ET.fromstring(render_svg(spec))
        assert len(root.findall(f".//{SVG_NS}g/{SVG_NS}rect")) == 2
        assert len(root.findall(f".//{SVG_NS}g/{SVG_NS}polyline")) == 1

    def test_bar_requires_identical_year_axes(self):
        with pytest.raises(InputError, match="identical year axes"):
            line_spec(
                kind="bar",
                series=(
                    PlotSeries("a", (2000, 2001), (1.0, 2.0)),
                    PlotSeries("b", (2000, 2002), (1.0, 2.0)),
                ),
            )

    def test_marker_year_renders_dashed_rule(self):
        svg = render_svg(line_spec(marker_years=(2001,)))
        assert 'stroke-dasharray="4 3"' in svg
        without = render_svg(line_spec())
        assert "stroke-dasharray" not in without

    def test_label_escaping(self):
        spec = line_spec(series=(PlotSeries("A&B <GDP>", (2000, 2001), (1.0, 2.0)),))
        svg = render_svg(spec)
        assert "A&amp;B &lt;GDP&gt;" in svg
        root = ET.fromstring(svg)  # still parses
        assert root.find(f".//{SVG_NS}g").attrib["data-series"] == "A&B <GDP>"

    def test_unknown_kind_rejected(self):
        with pytest.raises(InputError, match="kind"):
            line_spec(kind="pie")

    def test_empty_plot_rejected(self):
        with pytest.raises(InputError, match="no series"):
            line_spec(series=())

    def test_series_validation(self):
        with pytest.raises(InputError, match="non-finite"):
            PlotSeries("x", (2000,), (float("nan"),))
        with pytest.raises(InputError, match="ascending"):
            PlotSeries("x", (2001, 2000), (1.0, 2.0))
        with pytest.raises(InputError, match="2 years but 1 values"):
            PlotSeries("x", (2000, 2001), (1.0,))
        with pytest.raises(InputError, match="empty"):
            PlotSeries("x", (), ())

    def test_constant_series_renders(self):
        svg = render_svg(line_spec(series=(PlotSeries("flat", (2000, 2001), (5.0, 5.0)),)))
        assert len(polylines(svg)) == 1


class TestCategoryBars:
    def test_bars_annotated_with_values(self):
        svg = render_category_bars("grades", ["GDP", "RDM"], [0.91, 0.79], y_label="grade")
        root = ET.fromstring(svg)
        rects = root.findall(f".//{SVG_NS}g/{SVG_NS}rect")
        assert len(rects) == 2
        texts = [t.text for t in root.findall(f".//{SVG_NS}text")]
        assert "0.91" in texts and "0.79" in texts
        assert "GDP" in texts and "RDM" in texts

    def test_deterministic(self):
        a = render_category_bars("t", ["x"], [1.0])
        assert a == render_category_bars("t", ["x"], [1.0])

    def test_mismatched_lengths(self):
        with pytest.raises(InputError, match="one value per label"):
            render_category_bars("t", ["x", "y"], [1.0])
        with pytest.raises(InputError, match="one value per label"):
            render_category_bars("t", [], [])

    def test_non_finite_rejected(self):
        with pytest.raises(InputError, match="finite"):
            render_category_bars("t", ["x"], [float("inf")])


class TestSeriesAdapter:
    def test_label_country_slash_indicator(self):
        s = IndicatorSeries("CHN", "GGDP", "bn USD", {2000: 1.0, 2001: 2.0})
        plot = series_from_indicator(s)
        assert plot.label == "CHN/GGDP"
        assert plot.years == (2000, 2001)
        assert plot.values == (1.0, 2.0)
