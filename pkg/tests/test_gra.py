import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from greengdp import (
    ComputationError,
    GraOptions,
    GreyRelationalAnalysis,
    IndicatorSeries,
    InputError,
    gra,
    grey_coefficients,
    grey_grades,
    normalize_columns,
    two_pole_extremes,
)
from greengdp.gra import rank_descending

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=0.01, max_value=1e6, allow_nan=False, allow_infinity=False)


def series(country, indicator, values, first_year=2000, unit="index"):
    return IndicatorSeries(
        country, indicator, unit, {first_year + i: v for i, v in enumerate(values)}
    )


class TestNormalize:
    def test_divides_by_column_mean(self):
        out = normalize_columns(np.array([[2.0], [4.0], [6.0]]))
        assert out[:, 0].tolist() == [0.5, 1.0, 1.5]

    def test_constant_column_becomes_ones(self):
        out = normalize_columns(np.full((4, 2), 7.0))
        assert np.array_equal(out, np.ones((4, 2)))

    def test_zero_mean_column_named(self):
        with pytest.raises(ComputationError, match="EPDL"):
            normalize_columns(np.array([[1.0, 1.0], [2.0, -1.0]]), labels=["GDP", "EPDL"])

    def test_zero_mean_column_positional_fallback(self):
        with pytest.raises(ComputationError, match="column 1"):
            normalize_columns(np.array([[1.0, 1.0], [2.0, -1.0]]))

    def test_output_columns_have_unit_mean(self):
        rng = np.random.default_rng(3)
        m = rng.uniform(1.0, 9.0, size=(8, 3))
        out = normalize_columns(m)
        assert np.allclose(out.mean(axis=0), 1.0, atol=1e-15)


class TestTwoPoleExtremes:
    def test_identical_child(self):
        p = np.array([1.0, 2.0, 3.0])
        assert two_pole_extremes(p, p[:, None]) == (0.0, 0.0)

    def test_hand_case(self):
        a, b = two_pole_extremes([1.0, 2.0], [[1.0, 0.0], [3.0, 2.0]])
        assert (a, b) == (0.0, 1.0)

    def test_single_cell(self):
        # the raw helper accepts one row; length checks live in the estimator
        assert two_pole_extremes([2.0], [[4.0]]) == (2.0, 2.0)


class TestCoefficients:
    def test_hand_matrix(self):
        coeff = grey_coefficients([1.0, 2.0], [[1.0, 0.0], [3.0, 2.0]], rho=0.5)
        assert coeff[0, 0] == 1.0
        assert coeff[1, 1] == 1.0
        assert coeff[0, 1] == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert coeff[1, 0] == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_identical_columns_give_ones(self):
        p = np.array([1.0, 2.0, 3.0])
        coeff = grey_coefficients(p, np.column_stack([p, p]))
        assert np.array_equal(coeff, np.ones((3, 2)))

    def test_minimum_difference_cell_is_exactly_one(self):
        rng = np.random.default_rng(11)
        p = rng.uniform(1.0, 5.0, 9)
        c = rng.uniform(1.0, 5.0, (9, 4))
        diffs = np.abs(c - p[:, None])
        coeff = grey_coefficients(p, c)
        assert coeff[np.unravel_index(diffs.argmin(), diffs.shape)] == 1.0

    def test_rho_validation(self):
        with pytest.raises(InputError, match="rho"):
            grey_coefficients([1.0, 2.0], [[1.0], [2.0]], rho=0.0)
        with pytest.raises(InputError, match="rho"):
            grey_coefficients([1.0, 2.0], [[1.0], [2.0]], rho=1.5)

    def test_rho_monotone_for_nonminimal_cells(self):
        p = np.array([1.0, 2.0, 4.0])
        c = np.array([[1.0], [3.0], [5.0]])
        low = grey_coefficients(p, c, rho=0.2)
        high = grey_coefficients(p, c, rho=0.9)
        # larger rho dampens the spread: non-minimal-cell coefficients rise
        assert np.all(high[1:, 0] > low[1:, 0])

    @given(
        st.integers(min_value=2, max_value=12),
        st.integers(min_value=1, max_value=5),
        st.integers(min_value=0, max_value=2**32 - 1),
        st.floats(min_value=0.05, max_value=1.0),
    )
    def test_bounds(self, n, m, seed, rho):
        rng = np.random.default_rng(seed)
        p = rng.uniform(-5.0, 5.0, n)
        c = rng.uniform(-5.0, 5.0, (n, m))
        coeff = grey_coefficients(p, c, rho=rho)
        diffs = np.abs(c - p[:, None])
        a, b = diffs.min(), diffs.max()
        lower = 1.0 if b == 0.0 else (a + rho * b) / (b + rho * b)
        assert np.all(coeff >= lower - 1e-12)
        assert np.all(coeff <= 1.0)
        grades = grey_grades(coeff)
        assert np.all(grades > 0.0)
        assert np.all(grades <= 1.0)

    @given(
        st.integers(min_value=2, max_value=10),
        st.integers(min_value=0, max_value=2**32 - 1),
        st.floats(min_value=0.1, max_value=1000.0),
    )
    def test_scale_invariance(self, n, seed, scale):
        rng = np.random.default_rng(seed)
        p = rng.uniform(1.0, 9.0, n)
        c = rng.uniform(1.0, 9.0, (n, 3))
        base = grey_coefficients(p, c)
        scaled = grey_coefficients(scale * p, scale * c)
        assert np.max(np.abs(base - scaled)) < 1e-12


class TestGrades:
    def test_column_means(self):
        coeff = np.array([[1.0, 0.5], [0.5, 1.0], [0.3, 0.9]])
        grades = grey_grades(coeff)
        assert np.array_equal(grades, coeff.mean(axis=0))

    def test_single_row(self):
        assert grey_grades([[0.4, 0.8]]).tolist() == [0.4, 0.8]

    def test_rank_descending_stable_ties(self):
        assert rank_descending(np.array([0.5, 0.9, 0.5])).tolist() == [1, 0, 2]


class TestGraPipeline:
    def test_child_equal_to_parent_grades_one(self):
        parent = series("CHN", "GGDP", [3.0, 4.0, 5.0])
        twin = series("CHN", "GDP", [3.0, 4.0, 5.0])
        other = series("CHN", "RDM", [5.0, 1.0, 2.0])
        result = gra(parent, [twin, other])
        assert result.grades[0] == 1.0
        assert result.grades[1] < 1.0
        assert result.ranking[0] == ("GDP", 1.0)

    def test_normalization_makes_scaled_child_perfect(self):
        parent = series("CHN", "GGDP", [3.0, 4.0, 5.0])
        scaled = series("CHN", "GDP", [12.0, 16.0, 20.0])
        other = series("CHN", "RDM", [5.0, 1.0, 2.0])
        grades = gra(parent, [scaled, other]).grades
        assert grades[0] == 1.0
        raw = gra(parent, [scaled, other], GraOptions(normalize=False)).grades
        assert raw[0] < 1.0

    def test_hand_case_without_normalization(self):
        parent = series("CHN", "GGDP", [1.0, 2.0])
        c1 = series("CHN", "GDP", [1.0, 3.0])
        c2 = series("CHN", "RDM", [0.0, 2.0])
        result = gra(parent, [c1, c2], GraOptions(normalize=False))
        assert (result.a, result.b) == (0.0, 1.0)
        expected = ((1.0, 1.0 / 3.0), (1.0 / 3.0, 1.0))
        for row, want in zip(result.coefficients, expected):
            assert row == pytest.approx(want, rel=1e-15)
        assert result.grades == pytest.approx((2.0 / 3.0, 2.0 / 3.0), rel=1e-15)

    def test_grades_are_coefficient_column_means(self):
        parent = series("CHN", "GGDP", [3.0, 4.5, 5.0, 6.5])
        kids = [
            series("CHN", "GDP", [3.5, 4.0, 5.5, 6.0]),
            series("CHN", "RDM", [1.0, 1.5, 0.5, 2.5]),
        ]
        result = gra(parent, kids)
        matrix = np.array(result.coefficients)
        assert np.max(np.abs(matrix.mean(axis=0) - np.array(result.grades))) < 1e-15

    def test_mismatched_years_rejected(self):
        parent = series("CHN", "GGDP", [1.0, 2.0, 3.0])
        child = series("CHN", "GDP", [1.0, 2.0, 3.0], first_year=2001)
        with pytest.raises(InputError, match="years do not match"):
            gra(parent, [child])

    def test_cross_country_labels_prefixed(self):
        parent = series("CHN", "GGDP", [1.0, 2.0, 3.0])
        child = series("USA", "GDP", [1.0, 2.0, 4.0])
        result = gra(parent, [child])
        assert result.child_labels == ("USA/GDP",)

    def test_stable_tie_ranking(self):
        parent = series("CHN", "GGDP", [1.0, 2.0])
        c1 = series("CHN", "GDP", [1.0, 3.0])
        c2 = series("CHN", "RDM", [0.0, 2.0])
        ranking = gra(parent, [c1, c2], GraOptions(normalize=False)).ranking
        assert [label for label, _ in ranking] == ["GDP", "RDM"]

    def test_needs_children(self):
        with pytest.raises(InputError, match="at least one child"):
            gra(series("CHN", "GGDP", [1.0, 2.0]), [])

    def test_needs_two_observations(self):
        parent = IndicatorSeries("CHN", "GGDP", "index", {2000: 1.0})
        child = IndicatorSeries("CHN", "GDP", "index", {2000: 1.0})
        with pytest.raises(InputError, match="at least 2"):
            gra(parent, [child])


class TestEstimator:
    def test_fit_attributes(self):
        X = np.array([[1.0, 0.0], [3.0, 2.0]])
        y = np.array([1.0, 2.0])
        est = GreyRelationalAnalysis(normalize=False).fit(X, y)
        assert (est.a_, est.b_) == (0.0, 1.0)
        assert est.n_features_in_ == 2
        assert est.grades_ == pytest.approx([2.0 / 3.0, 2.0 / 3.0])
        assert est.fit_predict(X, y) == pytest.approx(est.grades_)

    def test_params_round_trip(self):
        est = GreyRelationalAnalysis(rho=0.3, normalize=False)
        assert clone(est).get_params() == {"rho": 0.3, "normalize": False}

    def test_invalid_rho_surfaces_at_fit(self):
        with pytest.raises(InputError, match="rho"):
            GreyRelationalAnalysis(rho=2.0).fit([[1.0], [2.0]], [1.0, 2.0])

    def test_options_validation(self):
        with pytest.raises(InputError, match="rho"):
            GraOptions(rho=0.0)
