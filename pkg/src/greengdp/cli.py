"""Command line entry point.

Subcommands wire ingestion, accounting, grey relational analysis, forecasting
and impact metrics into reproducible runs. Configuration is a single JSON
document (``--config``) merged over built-in defaults; flags override the
file. Every run computes all results in memory first and only then writes its
output files (atomically), so a failed run leaves no partial outputs behind.

Exit codes: 0 success, 1 input or validation error, 2 computation error,
3 fetch or file I/O error. No network access happens unless ``fetch`` is
invoked; ``GREENGDP_API_BASE`` overrides the API base URL.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from typing import Mapping, Sequence

from . import report as report_mod
from .accounting import GgdpAccount, build_account, account_to_panel, refit_bridge
from .errors import ComputationError, FetchError, InputError, RunWarning
from .fetch import DEFAULT_BASE_URL, fetch_panel, load_indicator_map
from .gm11 import check_applicability, forecast_series
from .gra import GraOptions, gra
from .panel import (
    IndicatorSeries,
    Panel,
    dump_long_csv,
    fill_gaps,
    load_csv,
    load_panel,
    save_panel,
    validate,
)
from .stats import climate_impact_score, trend_correlation
from .svg import PlotSeries, PlotSpec, render_category_bars, render_svg

API_BASE_ENV = "GREENGDP_API_BASE"

DEFAULT_CONFIG: dict = {
    "input": None,  # CSV or panel-JSON path; None selects the packaged sample panel
    "layout": "long",
    "countries": None,  # None selects every country in the panel
    "years": None,  # [start, end] inclusive; None follows each country's GDP span
    "gap_policy": "none",
    "bridge": "builtin",
    "full": False,
    "gra": {
        "country": None,  # None selects the first country of the run
        "parent": "GGDP",
        "children": ["GDP", "RDM", "EPCL", "EPDL"],
        "rho": 0.5,
        "normalize": True,
    },
    "gm": {"horizon": 10, "allow_shift": False, "series": ["GGDP"]},
    "impact": {"indicators": ["SURFACE_TEMP", "CO2_EMISSIONS"], "basis": "levels"},
    "fetch": {"countries": [], "indicators": [], "years": [1990, 2020], "map": None},
    "out_dir": "out",
}


def _merge_section(name: str, base: Mapping, override) -> dict:
    if not isinstance(override, Mapping):
        raise InputError(f"config section {name!r} must be an object")
    unknown = sorted(set(override) - set(base))
    if unknown:
        raise InputError(f"unknown keys {unknown} in config section {name!r}")
    return {**base, **override}


def load_config(path: str | None) -> dict:
    """Defaults, overlaid with the JSON config file when given."""
    config = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULT_CONFIG.items()}
    if path is None:
        return config
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: config must be a JSON object")
    unknown = sorted(set(doc) - set(DEFAULT_CONFIG))
    if unknown:
        raise InputError(f"{path}: unknown config keys {unknown}")
    for key, value in doc.items():
        if isinstance(DEFAULT_CONFIG[key], dict):
            config[key] = _merge_section(key, DEFAULT_CONFIG[key], value)
        else:
            config[key] = value
    return config


def _apply_flags(config: dict, args: argparse.Namespace) -> dict:
    if getattr(args, "out", None) is not None:
        config["out_dir"] = args.out
    if getattr(args, "rho", None) is not None:
        config["gra"]["rho"] = args.rho
    if getattr(args, "no_normalize", False):
        config["gra"]["normalize"] = False
    if getattr(args, "horizon", None) is not None:
        config["gm"]["horizon"] = args.horizon
    if getattr(args, "bridge", None) is not None:
        config["bridge"] = args.bridge
    if getattr(args, "full", False):
        config["full"] = True
    return config


def _years_range(config: dict) -> tuple[int, int] | None:
    years = config["years"]
    if years is None:
        return None
    if (
        not isinstance(years, Sequence)
        or len(years) != 2
        or not all(isinstance(y, int) for y in years)
    ):
        raise InputError(f"config 'years' must be [start, end], got {years!r}")
    start, end = years
    if end < start:
        raise InputError(f"year range {start}..{end} is empty")
    return (start, end)


def _load_input_panel(config: dict, sink: list[RunWarning]) -> Panel:
    path = config["input"]
    if path is None:
        with resources.as_file(
            resources.files("greengdp").joinpath("data/sample_panel.csv")
        ) as sample:
            panel = load_csv(sample, layout="long")
    elif str(path).endswith(".json"):
        with open(path, encoding="utf-8") as handle:
            panel = load_panel(json.load(handle))
    else:
        panel = load_csv(path, layout=config["layout"])

    report = validate(panel)
    if not report.ok:
        first = report.errors[0]
        raise InputError(
            f"panel failed validation with {len(report.errors)} error(s); "
            f"first: {first.key} {first.message}"
        )
    for issue in report.warnings:
        sink.append(RunWarning(module="panel", message=f"{issue.key}: {issue.message}"))

    policy = config["gap_policy"]
    if policy != "none":
        filled = []
        for series in panel:
            repaired = fill_gaps(series, policy)
            if len(repaired.observations) != len(series.observations):
                added = len(repaired.observations) - len(series.observations)
                sink.append(
                    RunWarning(module="panel", message=f"{series.key}: filled {added} gap year(s)")
                )
            filled.append(repaired)
        panel = Panel(filled, provenance=panel.provenance)
    return panel


def _run_countries(panel: Panel, config: dict) -> tuple[str, ...]:
    if config["countries"] is None:
        return panel.countries()
    countries = tuple(config["countries"])
    if not countries:
        raise InputError("config 'countries' must not be empty")
    return countries


def _build_accounts(
    panel: Panel, config: dict, sink: list[RunWarning]
) -> tuple[list[GgdpAccount], Panel]:
    """Accounts for every run country, plus the panel merged with the derived
    GDP/RDM/EPCL/EPDL/GGDP series."""
    countries = _run_countries(panel, config)
    years = _years_range(config)
    bridge = config["bridge"]
    if bridge == "builtin":
        epcl_model = epdl_model = None
    elif bridge == "refit":
        epcl_model = refit_bridge(panel, countries, "epcl")
        epdl_model = refit_bridge(panel, countries, "epdl")
    else:
        raise InputError(f"unknown bridge choice {bridge!r} (expected 'builtin' or 'refit')")

    accounts = []
    merged: dict[tuple[str, str], IndicatorSeries] = {s.key: s for s in panel}
    for country in sorted(countries):
        account = build_account(
            panel,
            country,
            years=years,
            epcl_model=epcl_model,
            epdl_model=epdl_model,
            sink=sink,
        )
        accounts.append(account)
        for series in account_to_panel(account):
            merged[series.key] = series
    return accounts, Panel(merged.values(), provenance=panel.provenance)


#: Indicators materialized by account building rather than measured input.
ACCOUNT_DERIVED = {"RDM", "EPCL", "EPDL", "GGDP"}


def _panel_with_accounts_if_needed(
    panel: Panel, config: dict, indicators: set[str], sink: list[RunWarning]
) -> Panel:
    """Merge derived account series into the panel when any requested
    indicator needs them; otherwise pass the panel through untouched."""
    if indicators & ACCOUNT_DERIVED:
        _, merged = _build_accounts(panel, config, sink)
        return merged
    return panel


def _restrict_to_year_set(series: IndicatorSeries, years: set[int]) -> IndicatorSeries:
    kept = {y: v for y, v in series.observations.items() if y in years}
    if not kept:
        raise InputError(f"series {series.key} has no observations in the common year set")
    return IndicatorSeries(series.country, series.indicator, series.unit, kept)


def _common_years(series_list: Sequence[IndicatorSeries]) -> set[int]:
    common = set(series_list[0].years)
    for s in series_list[1:]:
        common &= set(s.years)
    if len(common) < 2:
        raise InputError("series share fewer than 2 common years")
    return common


def _write_outputs(out_dir: str, files: Mapping[str, str]) -> None:
    for name in sorted(files):
        path = os.path.join(out_dir, name)
        report_mod.write_text_atomic(path, files[name])
        print(f"wrote {path}")


def _gdp_vs_ggdp_svg(account: GgdpAccount) -> str:
    years = tuple(row.year for row in account.rows)
    spec = PlotSpec(
        title=f"{account.country}: GDP vs GGDP",
        kind="line",
        series=(
            PlotSeries("GDP", years, tuple(row.gdp for row in account.rows)),
            PlotSeries("GGDP", years, tuple(row.ggdp for row in account.rows)),
        ),
        y_label=account.unit,
    )
    return render_svg(spec)


def cmd_compute(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    warnings: list[RunWarning] = []
    panel = _load_input_panel(config, warnings)
    accounts, _ = _build_accounts(panel, config, warnings)

    doc = report_mod.build_report(config, warnings=warnings, accounts=accounts)
    account_series = [s for a in accounts for s in account_to_panel(a)]
    files = {
        "report.json": report_mod.dump_report(doc),
        "ggdp.csv": dump_long_csv(Panel(account_series, provenance="accounts")),
    }
    for account in accounts:
        files[f"ggdp_{account.country}.svg"] = _gdp_vs_ggdp_svg(account)

    _write_outputs(config["out_dir"], files)
    for account in accounts:
        last = account.rows[-1]
        print(f"{account.country}: GGDP {last.year} = {last.ggdp:.1f} ({account.unit})")
    return 0


def cmd_gra(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    warnings: list[RunWarning] = []
    panel = _load_input_panel(config, warnings)

    section = config["gra"]
    requested = {section["parent"], *section["children"]}
    merged = _panel_with_accounts_if_needed(panel, config, requested, warnings)
    country = section["country"] or sorted(_run_countries(panel, config))[0]
    parent = merged.get(country, section["parent"])
    children = [merged.get(country, name) for name in section["children"]]
    if not children:
        raise InputError("config 'gra.children' must not be empty")

    common = _common_years([parent] + children)
    parent = _restrict_to_year_set(parent, common)
    children = [_restrict_to_year_set(c, common) for c in children]
    options = GraOptions(rho=section["rho"], normalize=section["normalize"])
    result = gra(parent, children, options)

    doc = report_mod.build_report(
        config,
        warnings=warnings,
        gra=result,
        gra_years=sorted(common),
        full=config["full"],
    )
    ranked = result.ranking
    files = {
        "report.json": report_mod.dump_report(doc),
        "gra_grades.svg": render_category_bars(
            f"Grey relational grades vs {result.parent_label}",
            [label for label, _ in ranked],
            [grade for _, grade in ranked],
            y_label="grade",
        ),
    }
    _write_outputs(config["out_dir"], files)
    for rank, (label, grade) in enumerate(ranked, start=1):
        print(f"{rank}. {label}: {grade:.4f}")
    return 0


def cmd_forecast(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    warnings: list[RunWarning] = []
    panel = _load_input_panel(config, warnings)

    section = config["gm"]
    merged = _panel_with_accounts_if_needed(panel, config, set(section["series"]), warnings)
    horizon = section["horizon"]
    results = []
    for country in sorted(_run_countries(panel, config)):
        for indicator in section["series"]:
            series = merged.get(country, indicator)
            years = _years_range(config)
            if years is not None:
                series = series.restrict(*years)
            for diag in check_applicability(series.values):
                warnings.append(
                    RunWarning(module="gm11", message=f"{series.key}: {diag.message}")
                )
            results.append(forecast_series(series, horizon=horizon, allow_shift=section["allow_shift"]))

    doc = report_mod.build_report(config, warnings=warnings, forecasts=results)
    files = {"report.json": report_mod.dump_report(doc)}
    for result in results:
        model = result.model
        observed_years = tuple(range(result.first_year, result.first_year + model.n_))
        curve_years = observed_years + result.years
        curve_values = tuple(model.fitted_) + result.values
        country, indicator = result.series_key.split("/", 1)
        spec = PlotSpec(
            title=f"{result.series_key}: GM(1,1) forecast",
            kind="line",
            series=(
                PlotSeries("observed", observed_years, tuple(model.x0_)),
                PlotSeries("fitted + forecast", curve_years, curve_values),
            ),
            marker_years=(observed_years[-1],),
        )
        files[f"forecast_{country}_{indicator}.svg"] = render_svg(spec)

    _write_outputs(config["out_dir"], files)
    for result in results:
        model = result.model
        print(
            f"{result.series_key}: a = {model.a_:.6f}, u = {model.u_:.3f}, "
            f"Q = {model.residual_q_:.4f} ({model.accuracy_class_})"
        )
    return 0


def cmd_impact(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    warnings: list[RunWarning] = []
    panel = _load_input_panel(config, warnings)
    _, merged = _build_accounts(panel, config, warnings)

    section = config["impact"]
    indicators = list(section["indicators"])
    basis = section["basis"]
    scores = []
    correlations = []
    files: dict[str, str] = {}
    for country in sorted(_run_countries(panel, config)):
        ggdp = merged.get(country, "GGDP")
        all_series = [ggdp] + [merged.get(country, name) for name in indicators]
        common = _common_years(all_series)
        all_series = [_restrict_to_year_set(s, common) for s in all_series]
        plot_series = []
        for series in all_series:
            score = climate_impact_score(series)
            scores.append(score)
            plot_series.append(
                PlotSeries(
                    f"{series.indicator} % change",
                    tuple(y for y, _ in score.pct_changes),
                    tuple(v for _, v in score.pct_changes),
                )
            )
        for series in all_series[1:]:
            correlations.append(
                report_mod.correlation_payload(
                    f"{country}/GGDP",
                    f"{series.country}/{series.indicator}",
                    basis,
                    trend_correlation(all_series[0], series, basis=basis),
                )
            )
        spec = PlotSpec(
            title=f"{country}: year-over-year change, GGDP vs climate series",
            kind="overlay",
            series=tuple(plot_series),
            y_label="percent per year",
        )
        files[f"impact_{country}.svg"] = render_svg(spec)

    doc = report_mod.build_report(
        config, warnings=warnings, impacts=scores, correlations=correlations
    )
    files["report.json"] = report_mod.dump_report(doc)
    _write_outputs(config["out_dir"], files)
    for score in scores:
        print(f"{score.series_label}: mean |% change| = {score.mean_abs_pct_change:.4f}")
    return 0


def cmd_fetch(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    section = config["fetch"]
    if not section["countries"] or not section["indicators"]:
        raise InputError("fetch needs config 'fetch.countries' and 'fetch.indicators'")
    years = section["years"]
    if not (isinstance(years, Sequence) and len(years) == 2):
        raise InputError(f"config 'fetch.years' must be [start, end], got {years!r}")
    mapping = load_indicator_map(section["map"])
    base_url = os.environ.get(API_BASE_ENV, DEFAULT_BASE_URL)

    panel = fetch_panel(
        section["countries"],
        section["indicators"],
        int(years[0]),
        int(years[1]),
        mapping=mapping,
        base_url=base_url,
    )
    files = {
        "panel.csv": dump_long_csv(panel),
        "panel.json": json.dumps(save_panel(panel), indent=2, sort_keys=True) + "\n",
    }
    _write_outputs(config["out_dir"], files)
    print(f"fetched {len(panel)} series from {base_url}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = _apply_flags(load_config(args.config), args)
    path = args.input or config["input"]
    if path is None:
        with resources.as_file(
            resources.files("greengdp").joinpath("data/sample_panel.csv")
        ) as sample:
            panel = load_csv(sample, layout="long")
    elif str(path).endswith(".json"):
        with open(path, encoding="utf-8") as handle:
            panel = load_panel(json.load(handle))
    else:
        panel = load_csv(path, layout=args.layout or config["layout"])

    report = validate(panel)
    for issue in report.issues:
        where = f" {issue.key}" if issue.key else ""
        year = f" year {issue.year}" if issue.year is not None else ""
        print(f"{issue.severity}:{where}{year}: {issue.message}")
    if report.ok:
        print(f"OK: {len(panel)} series, {len(report.warnings)} warning(s)")
        return 0
    print(f"FAILED: {len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return 1


class _Parser(argparse.ArgumentParser):
    # exit code 1 for bad arguments, matching the input-error contract
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="greengdp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file merged over defaults")
        p.add_argument("--out", help="output directory (default from config)")

    p = sub.add_parser("compute", help="build GGDP accounts and write report, CSV and plots")
    common(p)
    p.add_argument("--bridge", choices=["builtin", "refit"], help="deduction bridge coefficients")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("gra", help="grey relational grades of child series against a parent")
    common(p)
    p.add_argument("--rho", type=float, help="resolution coefficient in (0, 1]")
    p.add_argument("--no-normalize", action="store_true", help="skip column-mean normalization")
    p.add_argument("--full", action="store_true", help="include the full coefficient matrix")
    p.set_defaults(func=cmd_gra)

    p = sub.add_parser("forecast", help="GM(1,1) forecasts for configured series")
    common(p)
    p.add_argument("--horizon", type=int, help="forecast steps beyond the sample")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("impact", help="year-over-year change metrics and trend correlations")
    common(p)
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("fetch", help="download indicator series into panel files")
    common(p)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("validate", help="check a panel file against the data contract")
    common(p)
    p.add_argument("input", nargs="?", help="panel CSV or JSON (default: configured input)")
    p.add_argument("--layout", choices=["long", "wide"], help="CSV layout")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2
    except FetchError as exc:
        print(f"fetch error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
