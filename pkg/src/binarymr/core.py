"""Domain types and summary-statistics I/O shared by all estimators.

A :class:`SummaryDataset` holds per-variant regression associations with an
exposure and an outcome, together with the scale on which the exposure
associations were estimated (linear regression gives absolute prevalence
changes, logistic regression gives log odds ratios). All types are frozen
and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import numpy as np
from scipy.stats import norm

from .errors import DuplicateVariantId, EmptyDataset, ParseError

TSV_HEADER = ("variant_id", "beta_exp", "se_exp", "beta_out", "se_out")


class ExposureScale(str, Enum):
    """Scale of the variant-exposure associations.

    ``LINEAR_ABSOLUTE``: associations are absolute changes in exposure
    prevalence (linear regression of a 0/1 exposure on allele count).
    ``LOG_ODDS``: associations are log odds ratios (logistic regression).
    The two scales rest on mutually incompatible parametric assumptions,
    so a dataset carries exactly one of them.
    """

    LINEAR_ABSOLUTE = "linear"
    LOG_ODDS = "logodds"


class Method(str, Enum):
    """Label for the estimator that produced a :class:`CausalEstimate`."""

    WALD = "wald"
    IVW_FIXED = "ivw-fixed"
    IVW_RANDOM = "ivw-random"
    EGGER_SLOPE = "egger-slope"
    EGGER_INTERCEPT = "egger-intercept"
    WEIGHTED_MEDIAN = "weighted-median"
    INDIVIDUAL_WALD = "individual-wald"


class ScaleLabel(str, Enum):
    """How the point estimate is to be read.

    ``PER_UNIT_EXPOSURE``: per unit change of the exposure association
    scale (one log-odds unit, or a 0% to 100% prevalence intervention).
    ``PER_PERCENT_PREVALENCE``: per k% absolute increase in prevalence.
    ``PER_DOUBLING``: per 2-fold increase in the odds of the exposure.
    """

    PER_UNIT_EXPOSURE = "per-unit-exposure"
    PER_PERCENT_PREVALENCE = "per-percent-prevalence"
    PER_DOUBLING = "per-doubling"


@dataclass(frozen=True)
class VariantAssociation:
    """One variant's regression associations with exposure and outcome.

    Attributes
    ----------
    variant_id : str
        Unique identifier (e.g. an rsid).
    beta_exposure, se_exposure : float
        Per-allele association with the exposure and its standard error,
        on the units given by ``scale``.
    beta_outcome, se_outcome : float
        Per-allele association with the outcome and its standard error.
    scale : ExposureScale
        Scale of the exposure association.
    """

    variant_id: str
    beta_exposure: float
    se_exposure: float
    beta_outcome: float
    se_outcome: float
    scale: ExposureScale


@dataclass(frozen=True)
class SummaryDataset:
    """Ordered collection of variant associations sharing one scale."""

    variants: tuple[VariantAssociation, ...]
    scale: ExposureScale

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))

    def __len__(self) -> int:
        return len(self.variants)

    def __iter__(self) -> Iterator[VariantAssociation]:
        return iter(self.variants)

    @property
    def beta_exposure(self) -> np.ndarray:
        return np.array([v.beta_exposure for v in self.variants])

    @property
    def se_exposure(self) -> np.ndarray:
        return np.array([v.se_exposure for v in self.variants])

    @property
    def beta_outcome(self) -> np.ndarray:
        return np.array([v.beta_outcome for v in self.variants])

    @property
    def se_outcome(self) -> np.ndarray:
        return np.array([v.se_outcome for v in self.variants])


@dataclass(frozen=True)
class CausalEstimate:
    """A causal point estimate with its normal-theory confidence interval.

    ``percent`` records the prevalence increment k when
    ``scale_label`` is ``PER_PERCENT_PREVALENCE``; it is ``None`` otherwise.
    """

    point: float
    se: float
    ci_low: float
    ci_high: float
    alpha: float
    method: Method
    scale_label: ScaleLabel
    percent: float | None = None

    @staticmethod
    def from_point_se(
        point: float,
        se: float,
        alpha: float,
        method: Method,
        scale_label: ScaleLabel,
        percent: float | None = None,
    ) -> "CausalEstimate":
        """Build an estimate, deriving the symmetric CI from point and se."""
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        if se < 0.0:
            raise ValueError(f"standard error must be nonnegative, got {se}")
        z = norm.ppf(1.0 - alpha / 2.0)
        return CausalEstimate(
            point=point,
            se=se,
            ci_low=point - z * se,
            ci_high=point + z * se,
            alpha=alpha,
            method=method,
            scale_label=scale_label,
            percent=percent,
        )


@dataclass(frozen=True)
class Violation:
    """One dataset invariant violation found by :func:`validate_dataset`."""

    code: str
    message: str
    variant_id: str | None = None
    field_name: str | None = None


def _format_number(x: float) -> str:
    # 17 significant digits round-trips any float exactly
    return f"{x:.17g}"


def parse_summary_tsv(text: str | Iterable[str], scale: ExposureScale) -> SummaryDataset:
    """Parse tab-separated summary statistics into a validated dataset.

    The stream must contain a header line ``variant_id beta_exp se_exp
    beta_out se_out`` (tab-separated), followed by one row per variant.
    Lines starting with ``#`` and blank lines are skipped. Row order is
    preserved.

    Parameters
    ----------
    text : str or iterable of str
        File contents or an open text file.
    scale : ExposureScale
        Scale on which the exposure associations were estimated.

    Raises
    ------
    ParseError
        Malformed header or row, non-numeric field, or non-positive
        standard error; the message names the offending line.
    DuplicateVariantId
        The same variant id appears twice.
    EmptyDataset
        No data rows after the header.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    scale = ExposureScale(scale)

    variants: list[VariantAssociation] = []
    seen: set[str] = set()
    header_done = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if not header_done:
            if tuple(f.strip() for f in fields) != TSV_HEADER:
                raise ParseError(
                    f"expected header {' '.join(TSV_HEADER)!r}, got {line!r}", line=lineno
                )
            header_done = True
            continue
        if len(fields) != 5:
            raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", line=lineno)
        variant_id = fields[0].strip()
        if not variant_id:
            raise ParseError("empty variant_id", line=lineno)
        values = {}
        for name, token in zip(TSV_HEADER[1:], fields[1:]):
            try:
                values[name] = float(token)
            except ValueError:
                raise ParseError(f"field {name!r}: not a number: {token!r}", line=lineno) from None
            if not math.isfinite(values[name]):
                raise ParseError(f"field {name!r}: non-finite value {token!r}", line=lineno)
        for name in ("se_exp", "se_out"):
            if values[name] <= 0.0:
                raise ParseError(f"field {name!r}: standard error must be > 0", line=lineno)
        if variant_id in seen:
            raise DuplicateVariantId(f"line {lineno}: duplicate variant_id {variant_id!r}")
        seen.add(variant_id)
        variants.append(
            VariantAssociation(
                variant_id=variant_id,
                beta_exposure=values["beta_exp"],
                se_exposure=values["se_exp"],
                beta_outcome=values["beta_out"],
                se_outcome=values["se_out"],
                scale=scale,
            )
        )
    if not header_done:
        raise ParseError("no header line found")
    if not variants:
        raise EmptyDataset("file contains a header but no variant rows")
    return SummaryDataset(variants=tuple(variants), scale=scale)


def serialize_summary_tsv(dataset: SummaryDataset) -> str:
    """Render a dataset back to its TSV exchange format.

    Numbers are written with 17 significant digits, so
    ``parse -> serialize -> parse`` reproduces the dataset exactly.
    """
    out = ["\t".join(TSV_HEADER)]
    for v in dataset.variants:
        out.append(
            "\t".join(
                (
                    v.variant_id,
                    _format_number(v.beta_exposure),
                    _format_number(v.se_exposure),
                    _format_number(v.beta_outcome),
                    _format_number(v.se_outcome),
                )
            )
        )
    return "\n".join(out) + "\n"


def validate_dataset(dataset: SummaryDataset) -> list[Violation]:
    """Check every dataset invariant, returning one descriptor per violation.

    Validation never raises; an empty list means the dataset is valid.
    """
    violations: list[Violation] = []
    if len(dataset.variants) == 0:
        violations.append(Violation("EmptyDataset", "dataset has no variants"))
        return violations

    counts: dict[str, int] = {}
    for v in dataset.variants:
        if not v.variant_id:
            violations.append(Violation("EmptyVariantId", "variant with empty id"))
        else:
            counts[v.variant_id] = counts.get(v.variant_id, 0) + 1
        for name in ("beta_exposure", "se_exposure", "beta_outcome", "se_outcome"):
            value = getattr(v, name)
            if not math.isfinite(value):
                violations.append(
                    Violation(
                        "NonFinite",
                        f"{name} is {value!r}",
                        variant_id=v.variant_id,
                        field_name=name,
                    )
                )
        for name in ("se_exposure", "se_outcome"):
            value = getattr(v, name)
            if math.isfinite(value) and value <= 0.0:
                violations.append(
                    Violation(
                        "NonPositiveSe",
                        f"{name} must be > 0, got {value!r}",
                        variant_id=v.variant_id,
                        field_name=name,
                    )
                )
        if v.scale != dataset.scale:
            violations.append(
                Violation(
                    "MixedScale",
                    f"variant scale {v.scale.value!r} differs from dataset scale "
                    f"{dataset.scale.value!r}",
                    variant_id=v.variant_id,
                )
            )
    for variant_id, n in counts.items():
        if n > 1:
            violations.append(
                Violation(
                    "DuplicateId",
                    f"variant_id {variant_id!r} appears {n} times",
                    variant_id=variant_id,
                )
            )
    return violations
