"""Green GDP accounting, grey relational analysis and GM(1,1) forecasting.

The package computes Green GDP (GGDP) accounts by deducting monetized
resource depletion and environmental losses from GDP, ranks indicator
influence with grey relational grades, bridges unmeasured deductions with
fitted lines, forecasts series with GM(1,1) grey models, and ships a CLI
producing deterministic JSON reports, CSV series and SVG plots.
"""

from .errors import (
    ComputationError,
    FetchError,
    GreenGdpError,
    InputError,
    RunWarning,
)
from .panel import (
    AlignedMatrix,
    IndicatorSeries,
    Issue,
    Panel,
    ValidationReport,
    align,
    dump_long_csv,
    fill_gaps,
    load_csv,
    load_panel,
    save_panel,
    validate,
)
from .gra import (
    GraOptions,
    GreyRelationalAnalysis,
    GreyRelationalResult,
    gra,
    grey_coefficients,
    grey_grades,
    normalize_columns,
    two_pole_extremes,
)
from .gm11 import (
    GM11,
    Diagnostic,
    ForecastResult,
    ago,
    check_applicability,
    classify_accuracy,
    forecast_series,
    iago,
    mean_relative_residual,
)
from .stats import (
    ImpactScore,
    LinearModel,
    apply_linear,
    climate_impact_score,
    ols_fit,
    pct_change,
    pearson,
    trend_correlation,
)
from .accounting import (
    BUILTIN_EPCL_BRIDGE,
    BUILTIN_EPDL_BRIDGE,
    AccountRow,
    GgdpAccount,
    SecondaryBundle,
    account_to_panel,
    build_account,
    compute_ggdp,
    epcl_bridge,
    epdl_bridge,
    rdm_from_gni,
    refit_bridge,
    rollup,
)
from .svg import PlotSeries, PlotSpec, render_category_bars, render_svg
from .fetch import IndicatorMapping, fetch_indicator, fetch_panel, load_indicator_map
from .report import TOOL_VERSION as __version__
from .report import build_report, dump_report, validate_report

__all__ = [
    "__version__",
    # errors
    "GreenGdpError",
    "InputError",
    "ComputationError",
    "FetchError",
    "RunWarning",
    # panels
    "IndicatorSeries",
    "Panel",
    "AlignedMatrix",
    "Issue",
    "ValidationReport",
    "load_csv",
    "dump_long_csv",
    "validate",
    "align",
    "fill_gaps",
    "save_panel",
    "load_panel",
    # grey relational analysis
    "GraOptions",
    "GreyRelationalAnalysis",
    "GreyRelationalResult",
    "gra",
    "normalize_columns",
    "two_pole_extremes",
    "grey_coefficients",
    "grey_grades",
    # GM(1,1)
    "GM11",
    "ForecastResult",
    "Diagnostic",
    "ago",
    "iago",
    "forecast_series",
    "check_applicability",
    "classify_accuracy",
    "mean_relative_residual",
    # statistics
    "LinearModel",
    "ImpactScore",
    "ols_fit",
    "apply_linear",
    "pearson",
    "pct_change",
    "climate_impact_score",
    "trend_correlation",
    # accounting
    "GgdpAccount",
    "AccountRow",
    "SecondaryBundle",
    "BUILTIN_EPCL_BRIDGE",
    "BUILTIN_EPDL_BRIDGE",
    "compute_ggdp",
    "build_account",
    "account_to_panel",
    "rollup",
    "rdm_from_gni",
    "epcl_bridge",
    "epdl_bridge",
    "refit_bridge",
    # plots
    "PlotSeries",
    "PlotSpec",
    "render_svg",
    "render_category_bars",
    # fetch
    "IndicatorMapping",
    "fetch_indicator",
    "fetch_panel",
    "load_indicator_map",
    # reports
    "build_report",
    "validate_report",
    "dump_report",
]
