"""Rescaling of per-unit-exposure estimates onto interpretable scales.

A per-unit estimate from log-odds exposure associations means "per unit
increase in the log odds", i.e. per 2.72-fold multiplication of the odds;
multiplying by ln 2 re-expresses it per doubling. A per-unit estimate from
linear (absolute prevalence) associations means "per 0% to 100% prevalence
intervention"; multiplying by k/100 re-expresses it per k% absolute
increase. The two exposure scales rest on mutually incompatible
assumptions, so each transform demands the matching scale, and transforms
only accept per-unit inputs (no chaining).
"""

from __future__ import annotations

import math
from dataclasses import replace

from .core import CausalEstimate, ExposureScale, ScaleLabel
from .errors import WrongScale

LN2 = math.log(2.0)


def _require_per_unit(estimate: CausalEstimate, operation: str) -> None:
    if estimate.scale_label is not ScaleLabel.PER_UNIT_EXPOSURE:
        raise WrongScale(
            f"{operation} requires a per-unit-exposure estimate, got "
            f"{estimate.scale_label.value!r} (scale transforms do not chain)"
        )


def per_doubling(estimate: CausalEstimate, scale: ExposureScale) -> CausalEstimate:
    """Re-express a log-odds-unit estimate per doubling of the exposure odds.

    Multiplies the point, standard error, and confidence limits by ln 2
    (0.6931...; the factor is computed at full precision). Only valid when
    the exposure associations came from logistic regression.

    Raises
    ------
    WrongScale
        If ``scale`` is linear-absolute, or the estimate is not on the
        per-unit-exposure scale.
    """
    if ExposureScale(scale) is not ExposureScale.LOG_ODDS:
        raise WrongScale("per-doubling interpretation requires log-odds exposure associations")
    _require_per_unit(estimate, "per_doubling")
    return replace(
        estimate,
        point=estimate.point * LN2,
        se=estimate.se * LN2,
        ci_low=estimate.ci_low * LN2,
        ci_high=estimate.ci_high * LN2,
        scale_label=ScaleLabel.PER_DOUBLING,
    )


def per_percent(estimate: CausalEstimate, scale: ExposureScale, percent: float) -> CausalEstimate:
    """Re-express a per-unit estimate per ``percent``% absolute prevalence increase.

    A unit change on the linear-absolute scale is the unrealistic 0% to
    100% population intervention; scaling by k/100 gives the effect of a
    modest k% increase in exposure prevalence. Only valid when the exposure
    associations came from linear regression.

    Raises
    ------
    WrongScale
        If ``scale`` is log-odds, or the estimate is not per-unit.
    ValueError
        If ``percent`` is outside (0, 100].
    """
    if ExposureScale(scale) is not ExposureScale.LINEAR_ABSOLUTE:
        raise WrongScale(
            "per-percent-prevalence interpretation requires linear-absolute "
            "exposure associations"
        )
    _require_per_unit(estimate, "per_percent")
    if not 0.0 < percent <= 100.0:
        raise ValueError(f"percent must be in (0, 100], got {percent}")
    factor = percent / 100.0
    return replace(
        estimate,
        point=estimate.point * factor,
        se=estimate.se * factor,
        ci_low=estimate.ci_low * factor,
        ci_high=estimate.ci_high * factor,
        scale_label=ScaleLabel.PER_PERCENT_PREVALENCE,
        percent=percent,
    )


_RARE_NOTE = (
    "The odds of the exposure approximates its probability only when the exposure is rare."
)
_CASE_CONTROL_NOTE = (
    "Absolute associations with a binary exposure are not meaningful in case-control "
    "settings, where they depend on the investigator-chosen case:control ratio."
)


def interpret(scale: ExposureScale, label: ScaleLabel, percent: float | None = None) -> str:
    """Canonical one-sentence reading of an estimate, with its caveats.

    Total over all scale/label combinations; incoherent pairings return a
    sentence saying so rather than raising.
    """
    scale = ExposureScale(scale)
    label = ScaleLabel(label)
    if scale is ExposureScale.LOG_ODDS:
        if label is ScaleLabel.PER_UNIT_EXPOSURE:
            return (
                "Average change in the outcome per unit increase in the log odds of the "
                "exposure, i.e. per 2.72-fold increase in the odds of the exposure "
                f"(for example, exposure prevalence rising from 1% to 2.72%). {_RARE_NOTE}"
            )
        if label is ScaleLabel.PER_DOUBLING:
            return (
                "Average change in the outcome per doubling (2-fold increase) in the odds "
                f"of the exposure. {_RARE_NOTE}"
            )
        return (
            "Inconsistent combination: per-percent-prevalence readings require "
            "linear-absolute exposure associations, not log-odds."
        )
    # linear-absolute scale
    if label is ScaleLabel.PER_UNIT_EXPOSURE:
        return (
            "Average change in the outcome for a population intervention raising exposure "
            "prevalence from 0% to 100% (a unit change in exposure probability); rarely a "
            f"realistic intervention, so prefer a per-k% rescaling. {_CASE_CONTROL_NOTE}"
        )
    if label is ScaleLabel.PER_PERCENT_PREVALENCE:
        amount = f"{percent:g}%" if percent is not None else "each k%"
        return (
            f"Average change in the outcome per {amount} absolute increase in the "
            f"prevalence of the exposure. {_CASE_CONTROL_NOTE}"
        )
    return (
        "Inconsistent combination: per-doubling readings require log-odds exposure "
        "associations, not linear-absolute."
    )
