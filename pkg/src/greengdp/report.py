"""Machine-readable run reports.

A report is a single JSON document with a schema version, tool identity, a
generation timestamp, an echo of the effective configuration, collected
warnings, and one section per analysis that ran. The timestamp is the only
field that varies between identical runs: everything else serializes
deterministically (sorted keys, repr floats) so reports can be compared
byte-for-byte after dropping it. Documents are checked against the packaged
JSON schema before they are written.
"""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from importlib import resources
from importlib.metadata import PackageNotFoundError, version as _dist_version
from typing import Iterable, Mapping, Sequence

import jsonschema

from .accounting import GgdpAccount
from .errors import InputError, RunWarning
from .gm11 import ForecastResult
from .gra import GreyRelationalResult
from .stats import ImpactScore

REPORT_SCHEMA_VERSION = 1
TOOL_NAME = "greengdp"

try:
    TOOL_VERSION = _dist_version(TOOL_NAME)
except PackageNotFoundError:
    TOOL_VERSION = "0.0.0"


def _schema() -> dict:
    text = resources.files("greengdp").joinpath("data/report.schema.json").read_text()
    return json.loads(text)


def account_payload(account: GgdpAccount) -> dict:
    return {
        "country": account.country,
        "unit": account.unit,
        "rows": [
            {
                "year": row.year,
                "gdp": row.gdp,
                "rdm": row.rdm,
                "epcl": row.epcl,
                "epdl": row.epdl,
                "ggdp": row.ggdp,
                "methods": dict(row.methods),
            }
            for row in account.rows
        ],
    }


def gra_payload(
    result: GreyRelationalResult,
    years: Sequence[int] | None = None,
    full: bool = False,
) -> dict:
    payload = {
        "parent": result.parent_label,
        "children": list(result.child_labels),
        "rho": result.options.rho,
        "normalized": result.options.normalize,
        "a": result.a,
        "b": result.b,
        "grades": {
            label: float(grade) for label, grade in zip(result.child_labels, result.grades)
        },
        "ranking": [label for label, _ in result.ranking],
    }
    if full:
        payload["coefficients"] = {
            label: [float(row[j]) for row in result.coefficients]
            for j, label in enumerate(result.child_labels)
        }
    if years is not None:
        payload["years"] = [int(y) for y in years]
    return payload


def forecast_payload(result: ForecastResult) -> dict:
    model = result.model
    fitted_years = range(result.first_year, result.first_year + model.n_)
    return {
        "series": result.series_key,
        "model": {
            "a": model.a_,
            "u": model.u_,
            "shift": model.shift_,
            "mean_relative_residual": model.residual_q_,
            "accuracy_class": model.accuracy_class_,
        },
        "fitted": [[int(y), float(v)] for y, v in zip(fitted_years, model.fitted_)],
        "forecast": [[int(y), float(v)] for y, v in zip(result.years, result.values)],
    }


def impact_payload(score: ImpactScore) -> dict:
    return {
        "series": score.series_label,
        "mean_abs_pct_change": score.mean_abs_pct_change,
        "pct_changes": [[int(y), float(v)] for y, v in score.pct_changes],
    }


def correlation_payload(series_x: str, series_y: str, basis: str, r: float) -> dict:
    return {"series_x": series_x, "series_y": series_y, "basis": basis, "r": r}


def build_report(
    config: Mapping[str, object],
    warnings: Iterable[RunWarning] = (),
    accounts: Sequence[GgdpAccount] = (),
    gra: GreyRelationalResult | None = None,
    gra_years: Sequence[int] | None = None,
    full: bool = False,
    forecasts: Sequence[ForecastResult] = (),
    impacts: Sequence[ImpactScore] = (),
    correlations: Sequence[dict] = (),
    generated_at: str | None = None,
) -> dict:
    """Assemble and schema-check the report document.

    ``config`` is echoed verbatim except for ``out_dir``, which is dropped so
    the same analysis written to two directories yields identical content.
    ``generated_at`` defaults to the current UTC time and is injectable for
    reproducibility tests.
    """
    echoed = {key: value for key, value in config.items() if key != "out_dir"}
    if generated_at is None:
        generated_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generated_at": generated_at,
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "config": echoed,
        "warnings": [{"module": w.module, "message": w.message} for w in warnings],
    }
    if accounts:
        doc["accounts"] = [account_payload(a) for a in accounts]
    if gra is not None:
        doc["gra"] = gra_payload(gra, years=gra_years, full=full)
    if forecasts:
        doc["forecasts"] = [forecast_payload(f) for f in forecasts]
    if impacts:
        doc["impacts"] = [impact_payload(s) for s in impacts]
    if correlations:
        doc["correlations"] = list(correlations)
    validate_report(doc)
    return doc


def validate_report(doc: Mapping[str, object]) -> None:
    """Check a document against the packaged report schema."""
    try:
        jsonschema.validate(instance=doc, schema=_schema())
    except jsonschema.ValidationError as exc:
        raise InputError(f"report does not match schema: {exc.message}") from exc


def dump_report(doc: Mapping[str, object]) -> str:
    """Serialize deterministically: sorted keys, two-space indent, repr floats."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partial file and a failed write leaves any existing file untouched."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as stream:
            stream.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
