"""Green GDP accounts: the deduction identity GGDP = GDP - RDM - EPCL - EPDL.

Each deduction can come from a measured series, a rollup of its secondary
component series, the depletion-fraction-of-GNI estimate (RDM only), or a
linear bridge driven by RDM (EPCL/EPDL only). Every account row records which
source satisfied each deduction in that year. All monetary values are in
billions of current US dollars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, MutableSequence

from .errors import InputError, RunWarning
from .panel import IndicatorSeries, Panel
from .stats import LinearModel, apply_linear, ols_fit

#: Closed component vocabulary for each deduction category.
COMPONENT_VOCABULARY: dict[str, tuple[str, ...]] = {
    "RDM": (
        "cultivated land depletion",
        "energy consumption reduction",
        "water consumption reduction",
        "freshwater fishing depletion",
        "live wood accumulation",
        "value of additional forest land",
    ),
    "EPCL": (
        "actual governance",
        "virtual governance",
    ),
    "EPDL": (
        "accelerated depreciation of fixed assets",
        "loss of human health",
        "natural disasters losses",
    ),
}

DEDUCTIONS = ("rdm", "epcl", "epdl")

#: Built-in bridge coefficients (EPCL and EPDL as linear functions of RDM).
BUILTIN_EPCL_BRIDGE = LinearModel(slope=0.1009, intercept=932.2)
BUILTIN_EPDL_BRIDGE = LinearModel(slope=0.07316, intercept=1179.0)

#: Default per-deduction source preference for :func:`build_account`.
DEFAULT_STRATEGY: dict[str, tuple[str, ...]] = {
    "rdm": ("measured", "rollup", "delta_gni"),
    "epcl": ("measured", "rollup", "bridge"),
    "epdl": ("measured", "rollup", "bridge"),
}

_VALID_SOURCES = {
    "rdm": ("measured", "rollup", "delta_gni"),
    "epcl": ("measured", "rollup", "bridge"),
    "epdl": ("measured", "rollup", "bridge"),
}

#: δ series indicator name consumed by the delta_gni source.
DELTA_INDICATOR = "NRD_PCT_GNI"

WarningSink = MutableSequence[RunWarning]


def _warn(sink: WarningSink | None, message: str) -> None:
    if sink is not None:
        sink.append(RunWarning(module="accounting", message=message))


@dataclass(frozen=True)
class SecondaryBundle:
    """Named component series for one deduction category; names are drawn
    from the closed vocabulary."""

    category: str
    components: Mapping[str, IndicatorSeries]

    def __post_init__(self):
        if self.category not in COMPONENT_VOCABULARY:
            raise InputError(f"unknown deduction category {self.category!r}")
        if not self.components:
            raise InputError(f"bundle for {self.category} has no components")
        allowed = COMPONENT_VOCABULARY[self.category]
        for name in self.components:
            if name not in allowed:
                raise InputError(f"unknown {self.category} component {name!r}")


def rollup(bundle: SecondaryBundle) -> IndicatorSeries:
    """Sum the bundle's components year by year into one deduction series."""
    components = list(bundle.components.items())
    _, first = components[0]
    years = first.years
    for name, series in components:
        if series.years != years:
            raise InputError(
                f"component {name!r} years do not match {components[0][0]!r} in {bundle.category} bundle"
            )
        if series.country != first.country:
            raise InputError(f"component {name!r} belongs to {series.country}, expected {first.country}")
        if series.unit != first.unit:
            raise InputError(
                f"component {name!r} unit {series.unit!r} does not match {first.unit!r}"
            )
        for year, value in series.observations.items():
            if value < 0.0:
                raise InputError(f"component {name!r} has negative value {value} in {year}")
    totals = {
        year: sum(series.observations[year] for _, series in components)
        for year in years
    }
    return IndicatorSeries(first.country, bundle.category, first.unit, totals)


def _delta_fraction(delta: IndicatorSeries, year: int) -> float:
    value = delta.observations[year]
    if "percent" in delta.unit.lower() or "%" in delta.unit:
        value = value / 100.0
    if not (0.0 <= value <= 1.0):
        raise InputError(
            f"depletion fraction {value} for {delta.key} in {year} is outside [0, 1]"
        )
    return value


def rdm_from_gni(gni: IndicatorSeries, delta: IndicatorSeries) -> IndicatorSeries:
    """Estimate resource depletion as fraction-of-GNI times GNI.

    Percent-tagged fractions are divided by 100; fraction-tagged values pass
    through. After conversion every fraction must lie in [0, 1].
    """
    if gni.years != delta.years:
        raise InputError(f"GNI {gni.key} and fraction {delta.key} year sets do not match")
    values = {
        year: _delta_fraction(delta, year) * gni.observations[year] for year in gni.years
    }
    return IndicatorSeries(gni.country, "RDM", gni.unit, values)


def _bridge(
    rdm: IndicatorSeries,
    model: LinearModel,
    indicator: str,
    sink: WarningSink | None,
) -> IndicatorSeries:
    values = {}
    for year, value in rdm.observations.items():
        estimate = apply_linear(model, value)
        if estimate < 0.0:
            _warn(sink, f"{indicator} bridge for {rdm.country} in {year} gave {estimate}; clamped to 0")
            estimate = 0.0
        values[year] = estimate
    return IndicatorSeries(rdm.country, indicator, rdm.unit, values)


def epcl_bridge(
    rdm: IndicatorSeries,
    model: LinearModel | None = None,
    sink: WarningSink | None = None,
) -> IndicatorSeries:
    """Pollution-control losses as a linear function of resource depletion.
    Negative estimates are clamped to 0 with a warning."""
    return _bridge(rdm, model or BUILTIN_EPCL_BRIDGE, "EPCL", sink)


def epdl_bridge(
    rdm: IndicatorSeries,
    model: LinearModel | None = None,
    sink: WarningSink | None = None,
) -> IndicatorSeries:
    """Degradation losses as a linear function of resource depletion."""
    return _bridge(rdm, model or BUILTIN_EPDL_BRIDGE, "EPDL", sink)


@dataclass(frozen=True)
class AccountRow:
    year: int
    gdp: float
    rdm: float
    epcl: float
    epdl: float
    ggdp: float
    methods: Mapping[str, str]  # deduction -> source note


@dataclass(frozen=True)
class GgdpAccount:
    country: str
    unit: str
    rows: tuple[AccountRow, ...]


def compute_ggdp(
    gdp: IndicatorSeries,
    rdm: IndicatorSeries,
    epcl: IndicatorSeries,
    epdl: IndicatorSeries,
    methods: Mapping[str, str | Mapping[int, str]] | None = None,
    sink: WarningSink | None = None,
) -> GgdpAccount:
    """Apply the deduction identity row by row.

    The subtraction is evaluated left to right (gdp - rdm - epcl - epdl) so
    the identity can be re-checked bitwise from a row's own fields. Negative
    GGDP is legal output and flagged with a warning; negative deductions are
    rejected.
    """
    series = {"rdm": rdm, "epcl": epcl, "epdl": epdl}
    for name, s in series.items():
        if s.years != gdp.years:
            raise InputError(f"{name} years do not match GDP years for {gdp.country}")
        if s.country != gdp.country:
            raise InputError(f"{name} belongs to {s.country}, expected {gdp.country}")
        if s.unit != gdp.unit:
            raise InputError(f"{name} unit {s.unit!r} does not match GDP unit {gdp.unit!r}")
        for year, value in s.observations.items():
            if value < 0.0:
                raise InputError(f"negative {name} deduction {value} in {year}")

    methods = methods or {}

    def note(name: str, year: int) -> str:
        entry = methods.get(name, "measured")
        if isinstance(entry, str):
            return entry
        return entry[year]

    rows = []
    for year in gdp.years:
        g = gdp.observations[year]
        r = rdm.observations[year]
        c = epcl.observations[year]
        d = epdl.observations[year]
        ggdp = g - r - c - d
        if ggdp < 0.0:
            _warn(sink, f"negative_ggdp: {gdp.country} {year} GGDP = {ggdp}")
        rows.append(
            AccountRow(
                year=year,
                gdp=g,
                rdm=r,
                epcl=c,
                epdl=d,
                ggdp=ggdp,
                methods={name: note(name, year) for name in DEDUCTIONS},
            )
        )
    return GgdpAccount(country=gdp.country, unit=gdp.unit, rows=tuple(rows))


def _component_bundle(panel: Panel, country: str, category: str) -> SecondaryBundle | None:
    prefix = f"{category}:"
    components = {
        indicator[len(prefix):]: panel.get(c, indicator)
        for c, indicator in panel.keys()
        if c == country and indicator.startswith(prefix)
    }
    if not components:
        return None
    return SecondaryBundle(category=category, components=components)


def build_account(
    panel: Panel,
    country: str,
    years: tuple[int, int] | None = None,
    strategy: Mapping[str, Iterable[str]] | None = None,
    epcl_model: LinearModel | None = None,
    epdl_model: LinearModel | None = None,
    sink: WarningSink | None = None,
) -> GgdpAccount:
    """Assemble a country's account from a panel, resolving each deduction
    per year by the strategy's source order.

    Deterministic for a fixed (panel, strategy): the first source able to
    supply a year wins, and its note lands in the row's methods.
    """
    resolved_strategy = dict(DEFAULT_STRATEGY)
    for name, order in (strategy or {}).items():
        if name not in _VALID_SOURCES:
            raise InputError(f"unknown deduction {name!r} in strategy")
        order = tuple(order)
        bad = [s for s in order if s not in _VALID_SOURCES[name]]
        if bad:
            raise InputError(f"invalid sources {bad} for deduction {name!r}")
        resolved_strategy[name] = order

    gdp = panel.get(country, "GDP")
    if years is not None:
        gdp = gdp.restrict(*years)
        missing = [y for y in range(years[0], years[1] + 1) if y not in gdp.observations]
        if missing:
            raise InputError(f"GDP for {country} is missing years {missing}")
    target_years = gdp.years

    def optional_series(indicator: str) -> IndicatorSeries | None:
        try:
            return panel.get(country, indicator)
        except InputError:
            return None

    measured = {name: optional_series(name.upper()) for name in DEDUCTIONS}
    rollups = {}
    for name in DEDUCTIONS:
        bundle = _component_bundle(panel, country, name.upper())
        rollups[name] = rollup(bundle) if bundle else None
    gni = optional_series("GNI")
    delta = optional_series(DELTA_INDICATOR)

    bridge_models = {
        "epcl": epcl_model or BUILTIN_EPCL_BRIDGE,
        "epdl": epdl_model or BUILTIN_EPDL_BRIDGE,
    }

    def unit_checked(series: IndicatorSeries, source: str) -> IndicatorSeries:
        if series.unit != gdp.unit:
            raise InputError(
                f"{source} series {series.key} unit {series.unit!r} does not match GDP unit {gdp.unit!r}"
            )
        return series

    def resolve(name: str, year: int, rdm_value: float | None) -> tuple[float, str]:
        for source in resolved_strategy[name]:
            if source == "measured":
                series = measured[name]
                if series is not None and year in series.observations:
                    return unit_checked(series, "measured").observations[year], "measured"
            elif source == "rollup":
                series = rollups[name]
                if series is not None and year in series.observations:
                    return unit_checked(series, "rollup").observations[year], "rollup"
            elif source == "delta_gni":
                if gni is not None and delta is not None and year in gni.observations and year in delta.observations:
                    unit_checked(gni, "GNI")
                    value = _delta_fraction(delta, year) * gni.observations[year]
                    return value, "delta_gni"
            elif source == "bridge":
                if rdm_value is not None:
                    estimate = apply_linear(bridge_models[name], rdm_value)
                    if estimate < 0.0:
                        _warn(sink, f"{name.upper()} bridge for {country} in {year} gave {estimate}; clamped to 0")
                        estimate = 0.0
                    return estimate, f"bridge_{name}"
        raise InputError(f"cannot resolve {name.upper()} for {country} in {year}")

    values: dict[str, dict[int, float]] = {name: {} for name in DEDUCTIONS}
    notes: dict[str, dict[int, str]] = {name: {} for name in DEDUCTIONS}
    for year in target_years:
        rdm_value, rdm_note = resolve("rdm", year, None)
        values["rdm"][year], notes["rdm"][year] = rdm_value, rdm_note
        for name in ("epcl", "epdl"):
            values[name][year], notes[name][year] = resolve(name, year, rdm_value)

    deduction_series = {
        name: IndicatorSeries(country, name.upper(), gdp.unit, values[name])
        for name in DEDUCTIONS
    }
    return compute_ggdp(
        gdp,
        deduction_series["rdm"],
        deduction_series["epcl"],
        deduction_series["epdl"],
        methods=notes,
        sink=sink,
    )


def _best_effort_rdm(panel: Panel, country: str) -> dict[int, float]:
    """Per-year RDM values from whichever source covers each year
    (measured, then rollup, then the GNI-fraction estimate)."""
    values: dict[int, float] = {}
    try:
        gni = panel.get(country, "GNI")
        delta = panel.get(country, DELTA_INDICATOR)
    except InputError:
        pass
    else:
        for year in gni.years:
            if year in delta.observations:
                values[year] = _delta_fraction(delta, year) * gni.observations[year]
    bundle = _component_bundle(panel, country, "RDM")
    if bundle is not None:
        values.update(rollup(bundle).observations)
    try:
        values.update(panel.get(country, "RDM").observations)
    except InputError:
        pass
    return values


def refit_bridge(panel: Panel, countries: Iterable[str], deduction: str) -> LinearModel:
    """Refit a deduction-vs-RDM bridge line on the panel's measured data.

    Pools (RDM, measured deduction) pairs across the given countries; the RDM
    side comes from the usual source order. Needs at least 2 pairs.
    """
    if deduction not in ("epcl", "epdl"):
        raise InputError(f"refit supports 'epcl' or 'epdl', not {deduction!r}")
    xs: list[float] = []
    ys: list[float] = []
    for country in sorted(countries):
        try:
            measured = panel.get(country, deduction.upper())
        except InputError:
            continue
        rdm = _best_effort_rdm(panel, country)
        for year, value in measured.observations.items():
            if year in rdm:
                xs.append(rdm[year])
                ys.append(value)
    if len(xs) < 2:
        raise InputError(
            f"cannot refit {deduction.upper()} bridge: fewer than 2 "
            f"(RDM, {deduction.upper()}) year pairs in the panel"
        )
    return ols_fit(xs, ys)


def account_to_panel(account: GgdpAccount) -> Panel:
    """Expose an account as a panel of GDP/RDM/EPCL/EPDL/GGDP series."""
    columns = {
        "GDP": lambda row: row.gdp,
        "RDM": lambda row: row.rdm,
        "EPCL": lambda row: row.epcl,
        "EPDL": lambda row: row.epdl,
        "GGDP": lambda row: row.ggdp,
    }
    series = [
        IndicatorSeries(
            account.country,
            indicator,
            account.unit,
            {row.year: pick(row) for row in account.rows},
        )
        for indicator, pick in columns.items()
    ]
    return Panel(series, provenance=f"account:{account.country}")
