import json

import pytest
import requests

from greengdp import FetchError, InputError, fetch_indicator, fetch_panel, load_indicator_map
from greengdp.fetch import BACKOFF_SECONDS, IndicatorMapping

from conftest import FakeResponse, FakeSession, wb_page


def fetch(session, sleeps=None, **kwargs):
    options = dict(
        country="CHN",
        code="NY.GDP.MKTP.CD",
        start=2000,
        end=2001,
        session=session,
        sleep=(sleeps.append if sleeps is not None else lambda s: None),
    )
    options.update(kwargs)
    return fetch_indicator(**options)


class TestFetchIndicator:
    def test_two_pages_merge_in_year_order(self):
        session = FakeSession(
            [
                wb_page(1, 2, [(2001, 200.0)]),
                wb_page(2, 2, [(2000, 100.0)]),
            ]
        )
        series = fetch(session)
        assert series.years == (2000, 2001)
        assert series.values == (100.0, 200.0)
        assert [params["page"] for _, params in session.calls] == [1, 2]
        assert all(params["format"] == "json" for _, params in session.calls)
        assert all(params["date"] == "2000:2001" for _, params in session.calls)

    def test_null_values_skipped(self):
        session = FakeSession([wb_page(1, 1, [(2000, None), (2001, 150.0)])])
        series = fetch(session)
        assert series.years == (2001,)

    def test_404_is_immediate_typed_error(self):
        session = FakeSession([FakeResponse(404)])
        with pytest.raises(FetchError) as info:
            fetch(session)
        assert info.value.status == 404
        assert len(session.calls) == 1

    def test_500_retried_then_succeeds(self):
        sleeps = []
        session = FakeSession(
            [FakeResponse(500), FakeResponse(500), wb_page(1, 1, [(2000, 1.0)])]
        )
        series = fetch(session, sleeps=sleeps)
        assert series.values == (1.0,)
        assert len(session.calls) == 3
        assert sleeps == [BACKOFF_SECONDS, BACKOFF_SECONDS * 2]

    def test_500_exhausts_retries(self):
        session = FakeSession([FakeResponse(500)] * 3)
        with pytest.raises(FetchError) as info:
            fetch(session, sleeps=[])
        assert info.value.status == 500
        assert len(session.calls) == 3

    def test_connection_errors_exhaust_retries(self):
        session = FakeSession([requests.ConnectionError("down")] * 3)
        with pytest.raises(FetchError) as info:
            fetch(session, sleeps=[])
        assert info.value.status is None
        assert len(session.calls) == 3

    def test_zero_observations_rejected(self):
        session = FakeSession([wb_page(1, 1, [])])
        with pytest.raises(FetchError, match="no observations"):
            fetch(session)

    def test_all_null_rejected(self):
        session = FakeSession([wb_page(1, 1, [(2000, None)])])
        with pytest.raises(FetchError, match="no observations"):
            fetch(session)

    def test_unit_from_remote_name(self):
        session = FakeSession([wb_page(1, 1, [(2000, 1.0)], indicator_name="GDP (current US$)")])
        assert fetch(session).unit == "GDP (current US$)"

    def test_unit_override_and_scale(self):
        session = FakeSession([wb_page(1, 1, [(2000, 2.5e12)])])
        series = fetch(session, indicator="GDP", scale=1e-9, unit="billions of current US$")
        assert series.indicator == "GDP"
        assert series.unit == "billions of current US$"
        assert series.values == (2500.0,)

    def test_error_document_message_surfaces(self):
        doc = [{"message": [{"id": "120", "value": "Invalid indicator"}]}]
        session = FakeSession([FakeResponse(200, doc)])
        with pytest.raises(FetchError, match="Invalid indicator"):
            fetch(session)

    def test_non_json_body(self):
        session = FakeSession([FakeResponse(200)])  # .json() raises
        with pytest.raises(FetchError, match="not JSON"):
            fetch(session)

    def test_bad_year_range(self):
        with pytest.raises(InputError, match="after end"):
            fetch(FakeSession([]), start=2010, end=2000)

    def test_url_shape(self):
        session = FakeSession([wb_page(1, 1, [(2000, 1.0)])])
        fetch(session, base_url="https://example.test/v2/")
        url, _ = session.calls[0]
        assert url == "https://example.test/v2/country/CHN/indicator/NY.GDP.MKTP.CD"


class TestIndicatorMap:
    def test_packaged_default(self):
        mapping = load_indicator_map()
        assert mapping["GDP"].code == "NY.GDP.MKTP.CD"
        assert mapping["GDP"].scale == 1e-9
        assert mapping["GDP"].unit == "billions of current US$"
        assert mapping["NRD_PCT_GNI"].code == "NY.ADJ.DRES.GN.ZS"

    def test_custom_file(self, tmp_path):
        path = tmp_path / "map.json"
        path.write_text(json.dumps({"X": {"code": "A.B.C", "scale": 2.0}}), encoding="utf-8")
        mapping = load_indicator_map(str(path))
        assert mapping["X"] == IndicatorMapping(indicator="X", code="A.B.C", scale=2.0)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "map.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(InputError, match="not valid JSON"):
            load_indicator_map(str(path))

    def test_missing_code(self, tmp_path):
        path = tmp_path / "map.json"
        path.write_text(json.dumps({"X": {"scale": 1.0}}), encoding="utf-8")
        with pytest.raises(InputError, match="'code'"):
            load_indicator_map(str(path))


class TestFetchPanel:
    def test_unmapped_indicator_rejected_before_requests(self):
        session = FakeSession([])
        with pytest.raises(InputError, match="SURPRISE"):
            fetch_panel(
                ["CHN"],
                ["SURPRISE"],
                2000,
                2001,
                mapping={"GDP": IndicatorMapping("GDP", "NY.GDP.MKTP.CD")},
                session=session,
            )
        assert session.calls == []

    def test_assembles_panel_with_provenance(self):
        mapping = {
            "GDP": IndicatorMapping("GDP", "NY.GDP.MKTP.CD", scale=1e-9, unit="billions of current US$")
        }
        session = FakeSession([wb_page(1, 1, [(2000, 3e12), (2001, 4e12)])])
        panel = fetch_panel(
            ["CHN"], ["GDP"], 2000, 2001,
            mapping=mapping, base_url="https://example.test/v2", session=session,
            sleep=lambda s: None,
        )
        assert panel.keys() == (("CHN", "GDP"),)
        assert panel.get("CHN", "GDP").values == pytest.approx((3000.0, 4000.0), rel=1e-12)
        assert panel.provenance == "fetch:https://example.test/v2"
