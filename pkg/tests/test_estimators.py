import math

import numpy as np
import pytest
from scipy.stats import linregress

from binarymr import (
    DegenerateDesign,
    ExposureScale,
    IndividualRecord,
    Method,
    NoFirstStage,
    NoGeneticVariation,
    ScaleLabel,
    SummaryDataset,
    TooFewVariants,
    VariantAssociation,
    WeakInstrumentWarning,
    ZeroExposureAssociation,
    cochran_q,
    individual_wald,
    ivw,
    mr_egger,
    wald_ratio,
    weighted_median,
)
from conftest import make_dataset
from _oracles import cochran_q_loop, egger_normal_equations, wls_origin


def variant(bx=0.5, sx=0.1, by=0.1, sy=0.02, vid="rs1"):
    return VariantAssociation(vid, bx, sx, by, sy, ExposureScale.LOG_ODDS)


def dataset(bx, by, sy, sx=None):
    bx, by, sy = map(np.asarray, (bx, by, sy))
    sx = np.full(len(bx), 0.05) if sx is None else np.asarray(sx)
    variants = tuple(
        VariantAssociation(f"rs{i}", bx[i], sx[i], by[i], sy[i], ExposureScale.LOG_ODDS)
        for i in range(len(bx))
    )
    return SummaryDataset(variants, ExposureScale.LOG_ODDS)


class TestWaldRatio:
    def test_direct_formula(self):
        e = wald_ratio(variant(bx=0.5, by=0.1, sy=0.02))
        assert e.point == pytest.approx(0.2, abs=1e-15)
        assert e.se == pytest.approx(0.04, abs=1e-15)
        assert e.method is Method.WALD
        assert e.scale_label is ScaleLabel.PER_UNIT_EXPOSURE
        assert e.ci_low <= e.point <= e.ci_high

    def test_null_outcome(self):
        e = wald_ratio(variant(by=0.0))
        assert e.point == 0.0
        assert e.se == pytest.approx(0.02 / 0.5)

    def test_zero_exposure_association(self):
        with pytest.raises(ZeroExposureAssociation):
            wald_ratio(variant(bx=0.0))

    def test_weak_instrument_warns_without_altering(self):
        with pytest.warns(WeakInstrumentWarning):
            weak = wald_ratio(variant(bx=0.1, sx=0.1))
        assert weak.point == pytest.approx(0.1 / 0.1)

    def test_strong_instrument_silent(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            wald_ratio(variant(bx=0.5, sx=0.1))


class TestIvw:
    def test_single_variant_equals_wald(self, rng):
        import warnings

        for _ in range(100):
            v = variant(
                bx=float(rng.uniform(0.05, 1.0) * rng.choice([-1, 1])),
                sx=float(rng.uniform(0.01, 0.2)),
                by=float(rng.normal(0, 0.3)),
                sy=float(rng.uniform(0.01, 0.2)),
            )
            ds = SummaryDataset((v,), ExposureScale.LOG_ODDS)
            combined = ivw(ds)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WeakInstrumentWarning)
                single = wald_ratio(v)
            assert combined.point == pytest.approx(single.point, abs=1e-12)
            assert combined.se == pytest.approx(single.se, abs=1e-12)

    def test_symmetric_pair(self):
        ds = dataset([1.0, 1.0], [0.2, 0.4], [0.1, 0.1])
        assert ivw(ds).point == pytest.approx(0.3, abs=1e-15)

    def test_matches_wls_oracle(self, rng):
        for _ in range(25):
            ds = make_dataset(rng, int(rng.integers(3, 40)))
            mine = ivw(ds)
            slope, se = wls_origin(ds.beta_exposure, ds.beta_outcome, ds.se_outcome)
            assert mine.point == pytest.approx(slope, abs=1e-10)
            assert mine.se == pytest.approx(se, abs=1e-10)

    def test_random_effects_inflates_never_deflates(self, rng):
        tight = dataset([1.0, 1.0], [0.3, 0.3], [0.1, 0.1])
        assert ivw(tight, "random").se == ivw(tight, "fixed").se  # floor at 1
        loose = dataset([1.0, 1.0, 1.0], [0.0, 0.5, 1.0], [0.05, 0.05, 0.05])
        assert ivw(loose, "random").se > ivw(loose, "fixed").se
        assert ivw(loose, "random").point == ivw(loose, "fixed").point

    def test_random_effects_se_formula(self, rng):
        ds = make_dataset(rng, 12)
        fixed = ivw(ds, "fixed")
        q = cochran_q(ds, fixed.point)
        expected = fixed.se * max(1.0, math.sqrt(q / 11))
        assert ivw(ds, "random").se == pytest.approx(expected, rel=1e-12)

    def test_too_few(self):
        empty = SummaryDataset((), ExposureScale.LOG_ODDS)
        with pytest.raises(TooFewVariants):
            ivw(empty)
        solo = SummaryDataset((variant(),), ExposureScale.LOG_ODDS)
        with pytest.raises(TooFewVariants):
            ivw(solo, "random")

    def test_zero_exposure_association(self):
        ds = dataset([0.5, 0.0], [0.1, 0.1], [0.1, 0.1])
        with pytest.raises(ZeroExposureAssociation):
            ivw(ds)

    def test_sign_flip_invariance(self, rng):
        ds = make_dataset(rng, 9)
        flip = rng.choice([-1.0, 1.0], 9)
        flipped = dataset(flip * ds.beta_exposure, flip * ds.beta_outcome, ds.se_outcome, ds.se_exposure)
        assert ivw(flipped).point == ivw(ds).point
        assert ivw(flipped).se == ivw(ds).se

    def test_linearity_in_outcome_associations(self, rng):
        ds = make_dataset(rng, 8)
        for c in (2.5, -0.7):
            scaled = dataset(ds.beta_exposure, c * ds.beta_outcome, ds.se_outcome, ds.se_exposure)
            assert ivw(scaled).point == pytest.approx(c * ivw(ds).point, rel=1e-12)


class TestMrEgger:
    def test_exact_linear_fit(self):
        slope, intercept = mr_egger(dataset([1.0, 2.0, 3.0], [0.3, 0.5, 0.7], [0.1, 0.1, 0.1]))
        assert slope.point == pytest.approx(0.2, abs=1e-12)
        assert intercept.point == pytest.approx(0.1, abs=1e-12)
        ds = dataset([1.0, 2.0, 3.0], [0.3, 0.5, 0.7], [0.1, 0.1, 0.1])
        fitted_q = sum(
            (ds.beta_outcome[i] - 0.1 - 0.2 * ds.beta_exposure[i]) ** 2 / 0.01 for i in range(3)
        )
        assert fitted_q == pytest.approx(0.0, abs=1e-20)

    def test_all_null_outcomes(self):
        slope, intercept = mr_egger(dataset([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [0.1, 0.1, 0.1]))
        assert slope.point == pytest.approx(0.0, abs=1e-15)
        assert intercept.point == pytest.approx(0.0, abs=1e-15)

    def test_matches_normal_equations_oracle(self, rng):
        for _ in range(25):
            ds = make_dataset(rng, 20)
            slope, intercept = mr_egger(ds)
            a0, a1, se0, se1 = egger_normal_equations(
                ds.beta_exposure, ds.beta_outcome, ds.se_outcome
            )
            assert intercept.point == pytest.approx(a0, abs=1e-10)
            assert slope.point == pytest.approx(a1, abs=1e-10)
            assert intercept.se == pytest.approx(se0, abs=1e-10)
            assert slope.se == pytest.approx(se1, abs=1e-10)

    def test_orientation_canonicalizes_sign_flips(self, rng):
        ds = make_dataset(rng, 10)
        flip = rng.choice([-1.0, 1.0], 10)
        flipped = dataset(flip * ds.beta_exposure, flip * ds.beta_outcome, ds.se_outcome, ds.se_exposure)
        s1, i1 = mr_egger(ds)
        s2, i2 = mr_egger(flipped)
        assert (s1.point, s1.se, i1.point, i1.se) == (s2.point, s2.se, i2.point, i2.se)

    def test_too_few(self):
        with pytest.raises(TooFewVariants):
            mr_egger(dataset([1.0, 2.0], [0.1, 0.2], [0.1, 0.1]))

    def test_degenerate_design(self):
        with pytest.raises(DegenerateDesign):
            mr_egger(dataset([1.0, -1.0, 1.0], [0.1, 0.2, 0.3], [0.1, 0.1, 0.1]))

    def test_linearity_in_outcome_associations(self, rng):
        ds = make_dataset(rng, 15)
        scaled = dataset(ds.beta_exposure, 3.0 * ds.beta_outcome, ds.se_outcome, ds.se_exposure)
        assert mr_egger(scaled)[0].point == pytest.approx(3.0 * mr_egger(ds)[0].point, rel=1e-10)


class TestWeightedMedian:
    def test_middle_midpoint(self):
        ds = dataset([1.0, 1.0, 1.0], [0.1, 0.2, 0.3], [0.1, 0.1, 0.1])
        assert weighted_median(ds, n_boot=10).point == pytest.approx(0.2, abs=1e-15)

    def test_constant_ratios(self, rng):
        ds = dataset([0.2, 0.5, 0.9], [0.2 * 0.25, 0.5 * 0.25, 0.9 * 0.25], [0.1, 0.05, 0.02])
        e = weighted_median(ds, n_boot=200, seed=4)
        assert e.point == pytest.approx(0.25, abs=1e-12)
        assert e.se > 0.0

    def test_reproducible_and_in_range(self, rng):
        ds = make_dataset(rng, 25)
        first = weighted_median(ds, n_boot=300, seed=99)
        second = weighted_median(ds, n_boot=300, seed=99)
        assert (first.point, first.se) == (second.point, second.se)
        theta = ds.beta_outcome / ds.beta_exposure
        assert theta.min() <= first.point <= theta.max()

    def test_range_property_many(self, rng):
        for _ in range(30):
            ds = make_dataset(rng, int(rng.integers(3, 30)))
            point = weighted_median(ds, n_boot=5, seed=1).point
            theta = ds.beta_outcome / ds.beta_exposure
            assert theta.min() - 1e-12 <= point <= theta.max() + 1e-12

    def test_linearity_of_point(self, rng):
        ds = make_dataset(rng, 11)
        base = weighted_median(ds, n_boot=5, seed=0).point
        for c in (4.0, -1.5):
            scaled = dataset(ds.beta_exposure, c * ds.beta_outcome, ds.se_outcome, ds.se_exposure)
            assert weighted_median(scaled, n_boot=5, seed=0).point == pytest.approx(
                c * base, rel=1e-12
            )

    def test_errors(self):
        with pytest.raises(TooFewVariants):
            weighted_median(dataset([1.0, 1.0], [0.1, 0.2], [0.1, 0.1]))
        with pytest.raises(ZeroExposureAssociation):
            weighted_median(dataset([1.0, 0.0, 1.0], [0.1, 0.2, 0.3], [0.1, 0.1, 0.1]))
        with pytest.raises(ValueError):
            weighted_median(dataset([1.0, 1.0, 2.0], [0.1, 0.2, 0.3], [0.1, 0.1, 0.1]), n_boot=0)


class TestCochranQ:
    def test_zero_at_proportional(self):
        ds = dataset([1.0, 2.0, 3.0], [0.4, 0.8, 1.2], [0.1, 0.2, 0.3])
        assert cochran_q(ds, 0.4) == pytest.approx(0.0, abs=1e-24)

    def test_outlier_increases(self):
        base = dataset([1.0, 2.0], [0.4, 0.8], [0.1, 0.1])
        spiked = dataset([1.0, 2.0, 1.0], [0.4, 0.8, 2.0], [0.1, 0.1, 0.1])
        assert cochran_q(spiked, 0.4) > cochran_q(base, 0.4)

    def test_matches_loop_oracle(self, rng):
        ds = make_dataset(rng, 17)
        center = 0.3
        oracle = cochran_q_loop(ds.beta_exposure, ds.beta_outcome, ds.se_outcome, center)
        assert cochran_q(ds, center) == pytest.approx(oracle, abs=1e-12)

    def test_nonnegative(self, rng):
        ds = make_dataset(rng, 6)
        assert cochran_q(ds, -2.0) >= 0.0

    def test_too_few(self):
        with pytest.raises(TooFewVariants):
            cochran_q(SummaryDataset((variant(),), ExposureScale.LOG_ODDS), 0.0)


class TestIndividualWald:
    def test_perfect_compliance(self):
        g = np.array([0, 0, 1, 1, 0, 1])
        records = np.column_stack([g, g, g]).astype(float)
        e = individual_wald(records)
        assert e.point == pytest.approx(1.0, abs=1e-15)
        assert e.se == pytest.approx(0.0, abs=1e-15)
        assert e.method is Method.INDIVIDUAL_WALD

    def test_accepts_record_tuples(self):
        records = [IndividualRecord(g=0, x=0, y=0.0), IndividualRecord(1, 1, 1.0), IndividualRecord(0, 0, 0.1)]
        # slope(y~g) = 0.95 and slope(x~g) = 1 for these three records
        assert individual_wald(records).point == pytest.approx(0.95)

    def test_null_outcome_monte_carlo(self, rng):
        n = 20000
        g = rng.binomial(1, 0.4, n)
        x = (rng.normal(size=n) + g > 0.3).astype(float)
        y = rng.normal(size=n)  # independent of g by construction
        e = individual_wald(np.column_stack([g, x, y]))
        assert abs(e.point) < 3.0 * e.se

    def test_equals_wald_ratio_on_slope_pair(self, rng):
        n = 5000
        g = rng.binomial(2, 0.3, n).astype(float)
        x = (rng.normal(size=n) + 0.8 * g > 0.5).astype(float)
        y = 0.6 * x + rng.normal(size=n)
        e = individual_wald(np.column_stack([g, x, y]))
        fit_x = linregress(g, x)
        fit_y = linregress(g, y)
        paired = wald_ratio(
            VariantAssociation(
                "slopes", fit_x.slope, fit_x.stderr, fit_y.slope, fit_y.stderr, ExposureScale.LINEAR_ABSOLUTE
            )
        )
        assert e.point == pytest.approx(paired.point, abs=1e-10)
        # the two-slope delta method dominates the outcome-only wald se
        assert e.se >= paired.se

    def test_slopes_match_linregress(self, rng):
        n = 400
        g = rng.binomial(1, 0.5, n).astype(float)
        y = 0.3 * g + rng.normal(size=n)
        x = (rng.normal(size=n) + g > 0).astype(float)
        fit_x = linregress(g, x)
        fit_y = linregress(g, y)
        expected_se = math.sqrt(
            fit_y.stderr**2 / fit_x.slope**2
            + fit_y.slope**2 * fit_x.stderr**2 / fit_x.slope**4
        )
        e = individual_wald(np.column_stack([g, x, y]))
        assert e.point == pytest.approx(fit_y.slope / fit_x.slope, rel=1e-10)
        assert e.se == pytest.approx(expected_se, rel=1e-10)

    def test_no_genetic_variation(self):
        records = np.column_stack([np.ones(10), np.zeros(10), np.zeros(10)])
        with pytest.raises(NoGeneticVariation):
            individual_wald(records)

    def test_no_first_stage(self):
        g = np.array([0.0, 0.0, 1.0, 1.0])
        x = np.array([0.0, 1.0, 0.0, 1.0])
        with pytest.raises(NoFirstStage):
            individual_wald(np.column_stack([g, x, x]))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            individual_wald(np.column_stack([[3.0, 0.0], [0.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            individual_wald(np.zeros((4, 2)))
