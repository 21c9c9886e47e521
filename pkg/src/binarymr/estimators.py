"""Instrumental-variable estimators for summarized and individual-level data.

All summarized-data estimators operate on a :class:`~binarymr.core.SummaryDataset`
and return estimates on the per-unit-exposure scale; use the scaling module
to convert them into the interpretable binary-exposure scales. Every
function here is pure; the weighted-median bootstrap draws its randomness
from per-replicate substreams of the caller's seed.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from .core import CausalEstimate, Method, ScaleLabel, SummaryDataset, VariantAssociation
from .errors import (
    DegenerateDesign,
    NoFirstStage,
    NoGeneticVariation,
    TooFewVariants,
    WeakInstrumentWarning,
    ZeroExposureAssociation,
)
from .rng import substream_rngs


class IndividualRecord(NamedTuple):
    """One individual's allele count, binary exposure, and outcome."""

    g: int
    x: int
    y: float


def wald_ratio(variant: VariantAssociation, alpha: float = 0.05) -> CausalEstimate:
    """Ratio estimate from a single variant.

    The point estimate is ``beta_outcome / beta_exposure`` and the standard
    error is ``se_outcome / |beta_exposure|`` (first-order, treating the
    exposure association as fixed).

    Raises
    ------
    ZeroExposureAssociation
        If ``beta_exposure`` is exactly zero.

    Warns
    -----
    WeakInstrumentWarning
        If ``|beta_exposure| / se_exposure`` is below 2 (reporting aid only).
    """
    if variant.beta_exposure == 0.0:
        raise ZeroExposureAssociation(
            f"variant {variant.variant_id!r} has beta_exposure = 0; no ratio estimate exists"
        )
    if abs(variant.beta_exposure) / variant.se_exposure < 2.0:
        warnings.warn(
            f"variant {variant.variant_id!r}: |beta_exposure|/se_exposure < 2",
            WeakInstrumentWarning,
            stacklevel=2,
        )
    point = variant.beta_outcome / variant.beta_exposure
    se = variant.se_outcome / abs(variant.beta_exposure)
    return CausalEstimate.from_point_se(point, se, alpha, Method.WALD, ScaleLabel.PER_UNIT_EXPOSURE)


def _require_nonzero_exposure(dataset: SummaryDataset) -> None:
    for v in dataset.variants:
        if v.beta_exposure == 0.0:
            raise ZeroExposureAssociation(
                f"variant {v.variant_id!r} has beta_exposure = 0; ratio interpretation fails"
            )


def cochran_q(dataset: SummaryDataset, center: float) -> float:
    """Heterogeneity statistic around a per-unit-exposure estimate.

    Q = sum over variants of (beta_out - center * beta_exp)^2 / se_out^2.

    Raises
    ------
    TooFewVariants
        If the dataset has fewer than 2 variants.
    """
    if len(dataset) < 2:
        raise TooFewVariants(f"Cochran's Q needs >= 2 variants, got {len(dataset)}")
    resid = dataset.beta_outcome - center * dataset.beta_exposure
    return float(np.sum((resid / dataset.se_outcome) ** 2))


def ivw(dataset: SummaryDataset, model: str = "fixed", alpha: float = 0.05) -> CausalEstimate:
    """Inverse-variance weighted combination of per-variant ratio estimates.

    Equivalent to weighted regression of the outcome associations on the
    exposure associations through the origin, with weights ``1 / se_out^2``.

    Parameters
    ----------
    dataset : SummaryDataset
        At least one variant (``"fixed"``) or two (``"random"``).
    model : {"fixed", "random"}
        ``"random"`` applies the multiplicative random-effects inflation
        ``max(1, sqrt(Q / (k - 1)))`` to the fixed-effect standard error;
        the inflation never deflates below the fixed-effect value.
    alpha : float
        Two-sided confidence level.
    """
    if model not in ("fixed", "random"):
        raise ValueError(f"model must be 'fixed' or 'random', got {model!r}")
    k = len(dataset)
    minimum = 2 if model == "random" else 1
    if k < minimum:
        raise TooFewVariants(f"ivw ({model}) needs >= {minimum} variants, got {k}")
    _require_nonzero_exposure(dataset)

    bx = dataset.beta_exposure
    by = dataset.beta_outcome
    wt = 1.0 / dataset.se_outcome**2
    denominator = float(np.sum(wt * bx**2))
    point = float(np.sum(wt * bx * by)) / denominator
    se = denominator**-0.5
    method = Method.IVW_FIXED
    if model == "random":
        q = cochran_q(dataset, point)
        se *= max(1.0, math.sqrt(q / (k - 1)))
        method = Method.IVW_RANDOM
    return CausalEstimate.from_point_se(point, se, alpha, method, ScaleLabel.PER_UNIT_EXPOSURE)


def mr_egger(dataset: SummaryDataset, alpha: float = 0.05) -> tuple[CausalEstimate, CausalEstimate]:
    """Weighted regression with an intercept, robust to directional pleiotropy.

    Variants are first re-oriented so every exposure association is
    nonnegative (flipping the signs of ``beta_exp`` and ``beta_out``
    jointly); the method is not invariant to allele coding, so this
    canonicalization makes it deterministic. The outcome associations are
    then regressed on the exposure associations with weights
    ``1 / se_out^2``. Model-based standard errors are inflated by
    ``max(1, sqrt(Q / (k - 2)))``.

    Returns
    -------
    (slope, intercept) : tuple of CausalEstimate
        The slope is the causal estimate per unit exposure; the intercept
        (average per-allele direct effect) should be near zero when no
        directional pleiotropy is present.

    Raises
    ------
    TooFewVariants
        Fewer than 3 variants.
    DegenerateDesign
        All oriented exposure associations identical (no slope exists).
    """
    k = len(dataset)
    if k < 3:
        raise TooFewVariants(f"mr_egger needs >= 3 variants, got {k}")
    flip = np.where(dataset.beta_exposure < 0.0, -1.0, 1.0)
    bx = flip * dataset.beta_exposure
    by = flip * dataset.beta_outcome
    if np.ptp(bx) == 0.0:
        raise DegenerateDesign("oriented exposure associations are all identical")

    # weighted least squares via the square-root-weighted design
    sw = 1.0 / dataset.se_outcome
    design = np.column_stack([sw, sw * bx])
    response = sw * by
    coef, _, _, _ = np.linalg.lstsq(design, response, rcond=None)
    resid = response - design @ coef
    q = float(resid @ resid)
    inflation = max(1.0, math.sqrt(q / (k - 2)))
    covariance = np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(covariance)) * inflation

    slope = CausalEstimate.from_point_se(
        float(coef[1]), float(se[1]), alpha, Method.EGGER_SLOPE, ScaleLabel.PER_UNIT_EXPOSURE
    )
    intercept = CausalEstimate.from_point_se(
        float(coef[0]), float(se[0]), alpha, Method.EGGER_INTERCEPT, ScaleLabel.PER_UNIT_EXPOSURE
    )
    return slope, intercept


def _weighted_median_point(theta: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(theta, kind="stable")
    theta_sorted = theta[order]
    w = weights[order]
    w = w / w.sum()
    # cumulative midpoint of each variant's weight mass
    s = np.cumsum(w) - 0.5 * w
    return float(np.interp(0.5, s, theta_sorted))


def weighted_median(
    dataset: SummaryDataset,
    alpha: float = 0.05,
    n_boot: int = 1000,
    seed: int = 0,
) -> CausalEstimate:
    """Median of per-variant ratio estimates on the weighted cumulative scale.

    Ratio estimates ``theta_i = beta_out_i / beta_exp_i`` are sorted and
    assigned inverse-variance weights ``beta_exp_i^2 / se_out_i^2``; the
    point estimate interpolates the sorted ratios against the cumulative
    weight midpoints, evaluated at one half. Consistent when variants
    carrying at least half the weight are valid instruments.

    The standard error is the standard deviation of the point estimate
    over ``n_boot`` parametric bootstrap replicates, each redrawing the
    per-variant associations from normal distributions centred at the
    observed values. Replicate randomness comes from substreams of
    ``seed``, so results are bit-reproducible and order-independent.

    Raises
    ------
    TooFewVariants
        Fewer than 3 variants.
    ZeroExposureAssociation
        Any exposure association exactly zero.
    """
    k = len(dataset)
    if k < 3:
        raise TooFewVariants(f"weighted_median needs >= 3 variants, got {k}")
    if n_boot < 1:
        raise ValueError(f"n_boot must be positive, got {n_boot}")
    _require_nonzero_exposure(dataset)

    bx = dataset.beta_exposure
    by = dataset.beta_outcome
    sx = dataset.se_exposure
    sy = dataset.se_outcome
    point = _weighted_median_point(by / bx, bx**2 / sy**2)

    points = np.empty(n_boot)
    for i, rng in enumerate(substream_rngs(seed, n_boot)):
        bx_i = rng.normal(bx, sx)
        by_i = rng.normal(by, sy)
        points[i] = _weighted_median_point(by_i / bx_i, bx_i**2 / sy**2)
    se = float(np.std(points))
    return CausalEstimate.from_point_se(
        point, se, alpha, Method.WEIGHTED_MEDIAN, ScaleLabel.PER_UNIT_EXPOSURE
    )


def _ols_slope_se(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope of y on x and its standard error from ordinary least squares."""
    n = x.size
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise NoGeneticVariation("regressor has zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    if n <= 2:
        return slope, 0.0
    resid = (y - y.mean()) - slope * dx
    sigma2 = float(resid @ resid) / (n - 2)
    return slope, math.sqrt(sigma2 / sxx)


def individual_wald(
    records: Sequence[IndividualRecord] | np.ndarray,
    alpha: float = 0.05,
) -> CausalEstimate:
    """Single-instrument ratio estimate from individual-level data.

    The point estimate is the ratio of ordinary-least-squares slopes,
    ``slope(y ~ g) / slope(x ~ g)``; with one instrument this coincides
    with two-stage least squares. Under monotonicity it estimates the
    average causal effect in compliers, per unit change in exposure
    probability. The standard error combines the two slope standard
    errors by the first-order delta method, ignoring their covariance.

    Parameters
    ----------
    records : sequence of IndividualRecord or array of shape (n, 3)
        Columns are allele count ``g`` in {0, 1, 2}, binary exposure
        ``x``, and outcome ``y``.
    alpha : float
        Two-sided confidence level.

    Raises
    ------
    NoGeneticVariation
        The instrument takes a single value.
    NoFirstStage
        The instrument-exposure slope is exactly zero.
    """
    data = np.asarray(records, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError(f"records must have shape (n, 3), got {data.shape}")
    g, x, y = data[:, 0], data[:, 1], data[:, 2]
    if not np.isin(g, (0.0, 1.0, 2.0)).all():
        raise ValueError("allele counts must lie in {0, 1, 2}")
    if not np.isin(x, (0.0, 1.0)).all():
        raise ValueError("exposure must be binary")
    if not np.isfinite(y).all():
        raise ValueError("outcomes must be finite")

    slope_x, se_x = _ols_slope_se(g, x)
    slope_y, se_y = _ols_slope_se(g, y)
    if slope_x == 0.0:
        raise NoFirstStage("instrument-exposure slope is zero")
    point = slope_y / slope_x
    se = math.sqrt(se_y**2 / slope_x**2 + slope_y**2 * se_x**2 / slope_x**4)
    return CausalEstimate.from_point_se(
        point, se, alpha, Method.INDIVIDUAL_WALD, ScaleLabel.PER_UNIT_EXPOSURE
    )
