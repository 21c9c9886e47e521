"""Decision-flow advisor for binary-exposure analyses.

Given what the analyst believes about the exposure (is it a
dichotomization of a continuous risk factor?), the identification
assumptions they are willing to make (monotonicity, homogeneity), and the
purpose of the analysis, emit the applicable guidance in a fixed order.
The mapping is total and deterministic: every input combination yields at
least one guidance code.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

PURPOSE_TEST_NULL = "test-null"
PURPOSE_ESTIMATE = "estimate"
PURPOSE_POWER_CALC = "power-calc"
PURPOSES = (PURPOSE_TEST_NULL, PURPOSE_ESTIMATE, PURPOSE_POWER_CALC)


class AdviceCode(str, Enum):
    CONCEPTUALIZE_CONTINUOUS = "conceptualize-continuous"
    VALID_NULL_TEST = "valid-null-test"
    COMPLIER_INTERPRETATION = "complier-interpretation"
    HOMOGENEITY_ESTIMATE = "homogeneity-estimate"
    BOUNDS_ONLY = "bounds-only"
    CONSERVATIVE_POWER = "conservative-power"


ADVICE_TEXTS: dict[AdviceCode, str] = {
    AdviceCode.CONCEPTUALIZE_CONTINUOUS: (
        "The binary exposure dichotomizes a continuous risk factor, so the variant can "
        "shift the outcome through that factor even while the binary state never changes "
        "(an exclusion-restriction violation for the binary exposure). Assess the "
        "instrument assumptions, and conceptualize any causal inference, with respect to "
        "the underlying continuous risk factor."
    ),
    AdviceCode.VALID_NULL_TEST: (
        "Provided the instrument assumptions hold for the underlying risk factor, testing "
        "the variant-outcome association is a valid test of the causal null hypothesis; "
        "no exposure scaling or binary-exposure modeling is needed for this test."
    ),
    AdviceCode.COMPLIER_INTERPRETATION: (
        "Under monotonicity (no defiers), the estimate is the average causal effect among "
        "compliers: the individuals whose exposure status is switched by the variant. "
        "Genetic effects on phenotypes are small, so genetic compliers are typically an "
        "uncommon, unrepresentative subgroup that differs between variants and between "
        "populations."
    ),
    AdviceCode.HOMOGENEITY_ESTIMATE: (
        "Under homogeneity, the estimate targets the population average causal effect, "
        "but it is only meaningful if the exposure affects the outcome as a strict step "
        "at the dichotomization point; effects carried by the underlying continuous "
        "factor are not captured, and the required linearity/no-heterogeneity conditions "
        "are rarely plausible biologically."
    ),
    AdviceCode.BOUNDS_ONLY: (
        "Without monotonicity or homogeneity the average causal effect is not "
        "point-identified; only nonparametric bounds are available from the observable "
        "instrument-exposure-outcome distribution."
    ),
    AdviceCode.CONSERVATIVE_POWER: (
        "Power calculated from the binary exposure alone is conservative: the variant "
        "also moves the outcome through the part of the continuous risk factor that the "
        "dichotomization discards, so the variant-outcome association is stronger than "
        "the binary pathway suggests."
    ),
}


@dataclass(frozen=True)
class AdviceInput:
    """Analyst beliefs and analysis purpose driving the advisor."""

    exposure_is_dichotomization: bool
    believe_monotonicity: bool
    believe_homogeneity: bool
    purpose: str

    def __post_init__(self):
        if self.purpose not in PURPOSES:
            raise ValueError(f"purpose must be one of {PURPOSES}, got {self.purpose!r}")


@dataclass(frozen=True)
class Advice:
    code: AdviceCode
    text: str


def advise(inputs: AdviceInput) -> list[Advice]:
    """Ordered guidance for the given beliefs and purpose.

    Rules, in emission order: a dichotomized exposure always triggers the
    conceptualize-as-continuous warning; a null-test purpose always
    triggers the valid-null-test note; held assumptions fix the estimand's
    interpretation (homogeneity takes precedence, else monotonicity gives
    the complier reading); seeking an estimate or an effect size for power
    without either assumption leaves only bounds; and a power calculation
    with a dichotomized exposure is flagged as conservative.
    """
    codes: list[AdviceCode] = []
    if inputs.exposure_is_dichotomization:
        codes.append(AdviceCode.CONCEPTUALIZE_CONTINUOUS)
    if inputs.purpose == PURPOSE_TEST_NULL:
        codes.append(AdviceCode.VALID_NULL_TEST)
    if inputs.believe_homogeneity:
        codes.append(AdviceCode.HOMOGENEITY_ESTIMATE)
    elif inputs.believe_monotonicity:
        codes.append(AdviceCode.COMPLIER_INTERPRETATION)
    elif inputs.purpose != PURPOSE_TEST_NULL:
        codes.append(AdviceCode.BOUNDS_ONLY)
    if inputs.purpose == PURPOSE_POWER_CALC and inputs.exposure_is_dichotomization:
        codes.append(AdviceCode.CONSERVATIVE_POWER)
    return [Advice(code=c, text=ADVICE_TEXTS[c]) for c in codes]
