"""Country/indicator time-series panels: load, validate, align, repair, persist.

A panel is an immutable collection of :class:`IndicatorSeries`, keyed by
``(country, indicator)``. Long-layout CSV (``country,indicator,unit,year,value``)
is the canonical interchange format; wide layout (one row per series, year
columns) is import-only. Panels round-trip losslessly through a versioned
JSON document (``schema_version`` 1).

Monetary series are stored in billions of current US dollars; ``validate``
enforces the convention through the unit tag for the indicators consumed by
the accounting layer.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import InputError

PANEL_SCHEMA_VERSION = 1

#: Indicator names the accounting layer treats as monetary (billions of US$).
MONETARY_INDICATORS = frozenset({"GDP", "GNI", "RDM", "EPCL", "EPDL", "GGDP"})

#: Prefixes marking secondary deduction components, also monetary.
MONETARY_PREFIXES = ("RDM:", "EPCL:", "EPDL:")

LONG_COLUMNS = ("country", "indicator", "unit", "year", "value")


def is_monetary_indicator(indicator: str) -> bool:
    return indicator in MONETARY_INDICATORS or indicator.startswith(MONETARY_PREFIXES)


def is_billions_usd_unit(unit: str) -> bool:
    """Accept common spellings of the billions-of-current-US$ convention."""
    u = unit.lower()
    return ("usd" in u or "us$" in u) and ("bn" in u or "billion" in u)


@dataclass(frozen=True)
class IndicatorSeries:
    """One (country, indicator) time series with a unit tag.

    Observations are normalized to ascending year order at construction;
    values must be finite and the unit tag non-empty.
    """

    country: str
    indicator: str
    unit: str
    observations: Mapping[int, float]

    def __post_init__(self):
        if not self.country:
            raise InputError("country must be non-empty")
        if not self.indicator:
            raise InputError("indicator must be non-empty")
        if not self.unit:
            raise InputError(f"unit tag must be non-empty for {self.key}")
        if not self.observations:
            raise InputError(f"series {self.key} has no observations")
        normalized: dict[int, float] = {}
        for year in sorted(self.observations):
            if not isinstance(year, int):
                raise InputError(f"series {self.key}: year {year!r} is not an integer")
            value = float(self.observations[year])
            if not math.isfinite(value):
                raise InputError(f"series {self.key}: non-finite value at year {year}")
            normalized[year] = value
        object.__setattr__(self, "observations", normalized)

    @property
    def key(self) -> tuple[str, str]:
        return (self.country, self.indicator)

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(self.observations)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self.observations.values())

    @property
    def first_year(self) -> int:
        return next(iter(self.observations))

    @property
    def last_year(self) -> int:
        return self.years[-1]

    def has_consecutive_years(self) -> bool:
        ys = self.years
        return ys[-1] - ys[0] + 1 == len(ys)

    def restrict(self, start: int, end: int) -> "IndicatorSeries":
        """Sub-series over the inclusive year range [start, end]."""
        kept = {y: v for y, v in self.observations.items() if start <= y <= end}
        if not kept:
            raise InputError(f"series {self.key} has no observations in {start}..{end}")
        return IndicatorSeries(self.country, self.indicator, self.unit, kept)


class Panel:
    """Immutable collection of series with at most one per (country, indicator)."""

    def __init__(self, series: Iterable[IndicatorSeries], provenance: str = ""):
        table: dict[tuple[str, str], IndicatorSeries] = {}
        for s in series:
            if s.key in table:
                raise InputError(f"duplicate series for key {s.key}")
            table[s.key] = s
        self._series = dict(sorted(table.items()))
        self.provenance = provenance

    def __len__(self) -> int:
        return len(self._series)

    def __iter__(self) -> Iterator[IndicatorSeries]:
        return iter(self._series.values())

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._series

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return self.provenance == other.provenance and self._series == other._series

    def keys(self) -> tuple[tuple[str, str], ...]:
        return tuple(self._series)

    def get(self, country: str, indicator: str) -> IndicatorSeries:
        try:
            return self._series[(country, indicator)]
        except KeyError:
            raise InputError(f"missing series ({country}, {indicator})") from None

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({c for c, _ in self._series}))

    def indicators_for(self, country: str) -> tuple[str, ...]:
        return tuple(i for c, i in self._series if c == country)

    @property
    def year_span(self) -> tuple[int, int] | None:
        if not self._series:
            return None
        years = [y for s in self for y in (s.first_year, s.last_year)]
        return (min(years), max(years))


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    key: tuple[str, str] | None
    year: int | None
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class AlignedMatrix:
    """Rectangular extraction: one row per year, one column per requested key."""

    values: tuple[tuple[float, ...], ...]
    years: tuple[int, ...]
    keys: tuple[tuple[str, str], ...]

    def column(self, index: int) -> tuple[float, ...]:
        return tuple(row[index] for row in self.values)


def load_csv(path: str | Path, layout: str = "long") -> Panel:
    """Parse a panel from CSV. ``layout`` is ``"long"`` or ``"wide"``.

    Long rows are ``country,indicator,unit,year,value``. Wide files carry one
    row per (country, indicator, unit) with one column per year; empty cells
    are treated as missing observations. Errors name the offending line.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    text = path.read_text(encoding="utf-8")
    if layout == "long":
        return _parse_long(text, str(path))
    if layout == "wide":
        return _parse_wide(text, str(path))
    raise InputError(f"unknown CSV layout {layout!r} (expected 'long' or 'wide')")


def _reader(text: str, source: str):
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(lineno, row) for lineno, row in enumerate(rows, start=1) if any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise InputError(f"{source}: empty CSV (need a header and at least one data row)")
    return rows[0][1], rows[1:]


def _parse_long(text: str, source: str) -> Panel:
    header, rows = _reader(text, source)
    names = [h.strip() for h in header]
    try:
        cols = {name: names.index(name) for name in LONG_COLUMNS}
    except ValueError:
        missing = [n for n in LONG_COLUMNS if n not in names]
        raise InputError(f"{source}: long layout is missing columns {missing}") from None

    units: dict[tuple[str, str], tuple[str, int]] = {}
    obs: dict[tuple[str, str], dict[int, float]] = {}
    for lineno, row in rows:
        if len(row) < len(names):
            raise InputError(f"{source}:{lineno}: expected {len(names)} fields, got {len(row)}")
        country = row[cols["country"]].strip()
        indicator = row[cols["indicator"]].strip()
        unit = row[cols["unit"]].strip()
        key = (country, indicator)
        try:
            year = int(row[cols["year"]].strip())
        except ValueError:
            raise InputError(f"{source}:{lineno}: unparseable year {row[cols['year']]!r}") from None
        try:
            value = float(row[cols["value"]].strip())
        except ValueError:
            raise InputError(f"{source}:{lineno}: unparseable number {row[cols['value']]!r}") from None
        if key in units and units[key][0] != unit:
            raise InputError(
                f"{source}:{lineno}: unit {unit!r} conflicts with {units[key][0]!r} "
                f"declared for {key} on line {units[key][1]}"
            )
        units.setdefault(key, (unit, lineno))
        series_obs = obs.setdefault(key, {})
        if year in series_obs:
            raise InputError(f"{source}:{lineno}: duplicate observation for {key} year {year}")
        series_obs[year] = value

    series = [
        IndicatorSeries(country, indicator, units[(country, indicator)][0], values)
        for (country, indicator), values in obs.items()
    ]
    return Panel(series, provenance=f"csv:{source}")


def _parse_wide(text: str, source: str) -> Panel:
    header, rows = _reader(text, source)
    names = [h.strip() for h in header]
    if names[:3] != ["country", "indicator", "unit"]:
        raise InputError(f"{source}: wide layout must start with country,indicator,unit columns")
    try:
        years = [int(h) for h in names[3:]]
    except ValueError:
        raise InputError(f"{source}: wide layout year columns must be integers") from None
    if not years:
        raise InputError(f"{source}: wide layout has no year columns")

    seen: dict[tuple[str, str], int] = {}
    series = []
    for lineno, row in rows:
        if len(row) != len(names):
            raise InputError(f"{source}:{lineno}: expected {len(names)} fields, got {len(row)}")
        country, indicator, unit = (cell.strip() for cell in row[:3])
        key = (country, indicator)
        if key in seen:
            raise InputError(f"{source}:{lineno}: duplicate series {key} (first on line {seen[key]})")
        seen[key] = lineno
        observations = {}
        for year, cell in zip(years, row[3:]):
            cell = cell.strip()
            if not cell:
                continue
            try:
                observations[year] = float(cell)
            except ValueError:
                raise InputError(f"{source}:{lineno}: unparseable number {cell!r} in column {year}") from None
        if not observations:
            raise InputError(f"{source}:{lineno}: series {key} has no observations")
        series.append(IndicatorSeries(country, indicator, unit, observations))
    return Panel(series, provenance=f"csv:{source}")


def dump_long_csv(panel: Panel) -> str:
    """Serialize a panel to the canonical long CSV layout."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LONG_COLUMNS)
    for series in panel:
        for year, value in series.observations.items():
            writer.writerow([series.country, series.indicator, series.unit, year, repr(value)])
    return out.getvalue()


def validate(panel: Panel) -> ValidationReport:
    """Check a panel against the data contract; never mutates the input.

    Errors: non-finite values, non-increasing years, unit-tag mismatch across
    series of the same indicator, and monetary series not tagged as billions
    of US$. Warnings: interior year gaps and series too short to forecast.
    """
    report = ValidationReport()
    unit_by_indicator: dict[str, tuple[str, tuple[str, str]]] = {}
    for series in panel:
        years = series.years
        if any(b <= a for a, b in zip(years, years[1:])):
            report.issues.append(Issue("error", series.key, None, "years are not strictly increasing"))
        for year, value in series.observations.items():
            if not math.isfinite(value):
                report.issues.append(Issue("error", series.key, year, "non-finite value"))
        if series.indicator in unit_by_indicator:
            first_unit, first_key = unit_by_indicator[series.indicator]
            if series.unit != first_unit:
                report.issues.append(
                    Issue(
                        "error",
                        series.key,
                        None,
                        f"unit mismatch for indicator {series.indicator}: "
                        f"{series.unit!r} here vs {first_unit!r} for {first_key}",
                    )
                )
        else:
            unit_by_indicator[series.indicator] = (series.unit, series.key)
        if is_monetary_indicator(series.indicator) and not is_billions_usd_unit(series.unit):
            report.issues.append(
                Issue(
                    "error",
                    series.key,
                    None,
                    f"monetary indicator must be tagged in billions of current US$, got {series.unit!r}",
                )
            )
        for a, b in zip(years, years[1:]):
            if b - a > 1:
                report.issues.append(
                    Issue("warning", series.key, a + 1, f"interior gap at {a + 1}..{b - 1}")
                )
        if len(years) < 4:
            report.issues.append(
                Issue("warning", series.key, None, f"only {len(years)} observations (forecasting needs 4)")
            )
    return report


def fill_gaps(series: IndicatorSeries, policy: str = "none") -> IndicatorSeries:
    """Repair interior year gaps. ``linear_interior`` interpolates linearly
    between observed neighbours; endpoints are never extrapolated. ``none``
    is the identity. Idempotent under repetition."""
    if policy == "none":
        return series
    if policy != "linear_interior":
        raise InputError(f"unknown gap policy {policy!r}")
    observations = dict(series.observations)
    years = series.years
    for y0, y1 in zip(years, years[1:]):
        if y1 - y0 <= 1:
            continue
        v0, v1 = series.observations[y0], series.observations[y1]
        for y in range(y0 + 1, y1):
            observations[y] = v0 + (v1 - v0) * (y - y0) / (y1 - y0)
    return IndicatorSeries(series.country, series.indicator, series.unit, observations)


def align(
    panel: Panel,
    keys: Iterable[tuple[str, str]],
    years: tuple[int, int],
    gap_policy: str = "none",
) -> AlignedMatrix:
    """Extract a rectangular matrix: rows are the inclusive year range, columns
    the requested keys in request order. Missing keys or cells are errors."""
    start, end = years
    if end < start:
        raise InputError(f"year range {start}..{end} is empty")
    keys = tuple(keys)
    if not keys:
        raise InputError("align requires at least one key")
    columns = []
    for country, indicator in keys:
        series = fill_gaps(panel.get(country, indicator), gap_policy)
        column = []
        for year in range(start, end + 1):
            if year not in series.observations:
                raise InputError(f"missing cell {year} for series ({country}, {indicator})")
            column.append(series.observations[year])
        columns.append(column)
    rows = tuple(tuple(col[i] for col in columns) for i in range(end - start + 1))
    return AlignedMatrix(values=rows, years=tuple(range(start, end + 1)), keys=keys)


def save_panel(panel: Panel) -> dict:
    """Serialize to the versioned JSON document (schema_version 1)."""
    return {
        "schema_version": PANEL_SCHEMA_VERSION,
        "provenance": panel.provenance,
        "series": [
            {
                "country": s.country,
                "indicator": s.indicator,
                "unit": s.unit,
                "observations": [[year, value] for year, value in s.observations.items()],
            }
            for s in panel
        ],
    }


def load_panel(doc: Mapping) -> Panel:
    """Inverse of :func:`save_panel`; raises ``InputError`` on schema violations."""
    if not isinstance(doc, Mapping):
        raise InputError("panel document must be a JSON object")
    version = doc.get("schema_version")
    if version != PANEL_SCHEMA_VERSION:
        raise InputError(f"unsupported panel schema_version {version!r}")
    if "series" not in doc or not isinstance(doc["series"], list):
        raise InputError("panel document must carry a 'series' list")
    series = []
    for i, entry in enumerate(doc["series"]):
        if not isinstance(entry, Mapping):
            raise InputError(f"series[{i}] must be an object")
        missing = [f for f in ("country", "indicator", "unit", "observations") if f not in entry]
        if missing:
            raise InputError(f"series[{i}] is missing fields {missing}")
        raw = entry["observations"]
        if not isinstance(raw, list) or not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in raw):
            raise InputError(f"series[{i}].observations must be a list of [year, value] pairs")
        observations = {}
        for year, value in raw:
            if not isinstance(year, int) or isinstance(year, bool):
                raise InputError(f"series[{i}]: year {year!r} is not an integer")
            if year in observations:
                raise InputError(f"series[{i}]: duplicate year {year}")
            observations[year] = value
        series.append(IndicatorSeries(entry["country"], entry["indicator"], entry["unit"], observations))
    return Panel(series, provenance=str(doc.get("provenance", "")))
