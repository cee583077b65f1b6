"""Shared fixtures and a fake HTTP transport for offline fetch tests."""

import pytest

from greengdp import IndicatorSeries, Panel


class FakeResponse:
    def __init__(self, status_code, payload=None):
        self.status_code = status_code
        self._payload = payload

    def json(self):
        if self._payload is None:
            raise ValueError("no JSON body")
        return self._payload


class FakeSession:
    """Scripted stand-in for requests.Session; records every call."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, dict(params or {})))
        if not self.script:
            raise AssertionError("fake session ran out of scripted responses")
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def wb_page(page, pages, observations, indicator_name="GDP (current US$)"):
    """One World-Bank-format response page: [metadata, observation list]."""
    body = [
        {
            "indicator": {"id": "X", "value": indicator_name},
            "countryiso3code": "CHN",
            "date": str(year),
            "value": value,
        }
        for year, value in observations
    ]
    return FakeResponse(200, [{"page": page, "pages": pages, "per_page": 1000}, body])


@pytest.fixture
def small_panel():
    """Four-series panel: enough for one account via the estimate + bridges."""
    years = {y: float(v) for y, v in zip(range(2000, 2010), range(5000, 6000, 100))}
    return Panel(
        [
            IndicatorSeries("CHN", "GDP", "billions of current US$", years),
            IndicatorSeries(
                "CHN", "GNI", "billions of current US$", {y: v * 0.98 for y, v in years.items()}
            ),
            IndicatorSeries(
                "CHN", "NRD_PCT_GNI", "percent of GNI", {y: 2.0 for y in years}
            ),
            IndicatorSeries(
                "CHN", "CPI", "index 2010=100", {y: 80.0 + i for i, y in enumerate(years)}
            ),
        ],
        provenance="test",
    )
