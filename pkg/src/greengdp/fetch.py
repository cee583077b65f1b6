"""Client for World Bank style indicator APIs.

Wire format: ``GET {base}/country/{iso3}/indicator/{code}`` with
``format=json`` returns a two-element array ``[metadata, observations]``
where metadata carries ``page``/``pages`` and each observation has ``date``,
``value`` and the remote indicator name. Null values are skipped, pages are
walked in order, and transient failures (connection errors, 5xx) are retried
twice with backoff before giving up.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Mapping

import requests

from .errors import FetchError, InputError
from .panel import IndicatorSeries, Panel

DEFAULT_BASE_URL = "https://api.worldbank.org/v2"
DEFAULT_PER_PAGE = 1000
RETRIES = 2
BACKOFF_SECONDS = 0.5
TIMEOUT_SECONDS = 30.0


@dataclass(frozen=True)
class IndicatorMapping:
    """How a local indicator name maps onto a remote code.

    ``scale`` multiplies raw values (1e-9 turns current US$ into billions);
    ``unit`` overrides the unit derived from the remote indicator name.
    """

    indicator: str
    code: str
    scale: float = 1.0
    unit: str | None = None


def load_indicator_map(path: str | None = None) -> dict[str, IndicatorMapping]:
    """Read the indicator mapping file (packaged default when ``path`` is None)."""
    if path is None:
        text = resources.files("greengdp").joinpath("data/worldbank_indicators.json").read_text()
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"indicator map is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("indicator map must be a JSON object of indicator entries")
    mappings = {}
    for indicator, entry in doc.items():
        if not isinstance(entry, dict) or "code" not in entry:
            raise InputError(f"indicator map entry {indicator!r} needs a 'code' field")
        mappings[indicator] = IndicatorMapping(
            indicator=indicator,
            code=str(entry["code"]),
            scale=float(entry.get("scale", 1.0)),
            unit=entry.get("unit"),
        )
    return mappings


def _get_json(
    session: requests.Session,
    url: str,
    params: Mapping[str, object],
    sleep: Callable[[float], None],
) -> object:
    last_status = None
    for attempt in range(RETRIES + 1):
        if attempt:
            sleep(BACKOFF_SECONDS * (2 ** (attempt - 1)))
        try:
            response = session.get(url, params=params, timeout=TIMEOUT_SECONDS)
        except requests.RequestException as exc:
            last_status = None
            if attempt == RETRIES:
                raise FetchError(f"request to {url} failed: {exc}") from exc
            continue
        last_status = response.status_code
        if 500 <= response.status_code < 600:
            if attempt == RETRIES:
                raise FetchError(
                    f"server error {response.status_code} from {url}", status=response.status_code
                )
            continue
        if response.status_code != 200:
            raise FetchError(
                f"unexpected status {response.status_code} from {url}", status=response.status_code
            )
        try:
            return response.json()
        except ValueError as exc:
            raise FetchError(f"response from {url} is not JSON", status=response.status_code) from exc
    raise FetchError(f"request to {url} failed after retries", status=last_status)


def _observation_pages(
    session: requests.Session,
    base_url: str,
    country: str,
    code: str,
    start: int,
    end: int,
    per_page: int,
    sleep: Callable[[float], None],
):
    url = f"{base_url.rstrip('/')}/country/{country}/indicator/{code}"
    page = 1
    while True:
        doc = _get_json(
            session,
            url,
            {"format": "json", "date": f"{start}:{end}", "per_page": per_page, "page": page},
            sleep,
        )
        if not isinstance(doc, list) or not doc:
            raise FetchError(f"malformed payload from {url}")
        if len(doc) == 1 or not isinstance(doc[0], dict):
            # error documents come back as a one-element array with a message
            detail = ""
            if doc and isinstance(doc[0], dict):
                messages = doc[0].get("message", [])
                if messages and isinstance(messages, list):
                    detail = f": {messages[0].get('value', '')}"
            raise FetchError(f"API error for {country}/{code}{detail}")
        metadata, observations = doc[0], doc[1]
        yield observations or []
        pages = int(metadata.get("pages", 1) or 1)
        if page >= pages:
            return
        page += 1


def fetch_indicator(
    country: str,
    code: str,
    start: int,
    end: int,
    indicator: str | None = None,
    scale: float = 1.0,
    unit: str | None = None,
    base_url: str = DEFAULT_BASE_URL,
    session: requests.Session | None = None,
    per_page: int = DEFAULT_PER_PAGE,
    sleep: Callable[[float], None] = time.sleep,
) -> IndicatorSeries:
    """Fetch one country/indicator series over an inclusive year range.

    Null observations are dropped. The series unit is the ``unit`` override
    when given, otherwise the remote indicator name.
    """
    if start > end:
        raise InputError(f"start year {start} is after end year {end}")
    session = session or requests.Session()
    values: dict[int, float] = {}
    remote_name = None
    for observations in _observation_pages(session, base_url, country, code, start, end, per_page, sleep):
        for obs in observations:
            if not isinstance(obs, dict):
                raise FetchError(f"malformed observation for {country}/{code}")
            if remote_name is None:
                remote_name = (obs.get("indicator") or {}).get("value")
            if obs.get("value") is None:
                continue
            try:
                year = int(obs["date"])
            except (KeyError, TypeError, ValueError):
                raise FetchError(f"unparseable date {obs.get('date')!r} for {country}/{code}")
            values[year] = float(obs["value"]) * scale
    if not values:
        raise FetchError(f"no observations for {country}/{code} in {start}:{end}")
    return IndicatorSeries(
        country=country,
        indicator=indicator or code,
        unit=unit or remote_name or code,
        observations=values,
    )


def fetch_panel(
    countries: Iterable[str],
    indicators: Iterable[str],
    start: int,
    end: int,
    mapping: Mapping[str, IndicatorMapping] | None = None,
    base_url: str = DEFAULT_BASE_URL,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> Panel:
    """Fetch every (country, indicator) pair into one panel.

    Indicators are looked up in the mapping (packaged default when omitted);
    unmapped names are rejected before any request goes out.
    """
    mapping = mapping if mapping is not None else load_indicator_map()
    countries = list(countries)
    indicators = list(indicators)
    unknown = [name for name in indicators if name not in mapping]
    if unknown:
        raise InputError(f"indicators {unknown} are not in the indicator map")
    session = session or requests.Session()
    series = []
    for country in countries:
        for name in indicators:
            entry = mapping[name]
            series.append(
                fetch_indicator(
                    country,
                    entry.code,
                    start,
                    end,
                    indicator=name,
                    scale=entry.scale,
                    unit=entry.unit,
                    base_url=base_url,
                    session=session,
                    sleep=sleep,
                )
            )
    return Panel(series, provenance=f"fetch:{base_url}")
