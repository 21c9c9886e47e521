"""Nonparametric bounds on the average causal effect for binary G, X, Y.

With a binary instrument, exposure, and outcome, each individual is
characterized by a response type: one of 4 exposure responses to the
instrument paired with one of 4 outcome responses to the exposure (16
types). The instrumental-variable model says the distribution over types
is independent of the instrument and the instrument reaches the outcome
only through the exposure; both are encoded by the parameterization
itself. The observable cell probabilities P(X=x, Y=y | G=g) are linear in
the type distribution, so the average causal effect
P(Y(1)=1) - P(Y(0)=1) is bounded by a small linear program. An empty
constraint polytope means the data are incompatible with the model;
infeasibility is reported as a result, not an error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .errors import EmptyStratum

#: Residual above which a linear-program "solution" is treated as infeasible.
FEASIBILITY_TOL = 1e-9

_CELLS = [(g, x, y) for g in (0, 1) for x in (0, 1) for y in (0, 1)]


@dataclass(frozen=True)
class ObservedJoint:
    """The eight probabilities P(X=x, Y=y | G=g), indexed ``p[g][x][y]``.

    Each instrument stratum must sum to one (tolerance 1e-12).
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2, 2):
            raise ValueError(f"joint must have shape (2, 2, 2), got {p.shape}")
        if not np.isfinite(p).all():
            raise ValueError("joint contains non-finite entries")
        if (p < 0.0).any() or (p > 1.0).any():
            raise ValueError("joint entries must lie in [0, 1]")
        sums = p.sum(axis=(1, 2))
        if np.abs(sums - 1.0).max() > 1e-12:
            raise ValueError(f"each instrument stratum must sum to 1, got sums {sums}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def prob_outcome_given_instrument(self, g: int) -> float:
        """P(Y=1 | G=g)."""
        return float(self.p[g].sum(axis=0)[1])


@dataclass(frozen=True)
class BoundsResult:
    """Sharp lower/upper bounds on the average causal effect.

    ``feasible`` is False when the observed joint is incompatible with the
    instrumental-variable model, in which case the bounds are NaN.
    """

    lower: float
    upper: float
    feasible: bool


@lru_cache(maxsize=1)
def response_type_system() -> tuple[np.ndarray, np.ndarray]:
    """Constraint matrix and objective of the response-type linear program.

    Returns
    -------
    (constraints, ace_coefficients)
        ``constraints`` has shape (8, 16): one row per observable cell
        (g, x, y) in lexicographic order, one column per response type
        (exposure response (x0, x1) paired with outcome response (y0, y1),
        both in lexicographic order). ``ace_coefficients[t]`` is the
        individual causal effect y1 - y0 of type ``t``.
    """
    exposure_types = list(itertools.product((0, 1), repeat=2))
    outcome_types = list(itertools.product((0, 1), repeat=2))
    constraints = np.zeros((8, 16))
    ace = np.zeros(16)
    for row, (g, x, y) in enumerate(_CELLS):
        for i, tx in enumerate(exposure_types):
            for j, ty in enumerate(outcome_types):
                if tx[g] == x and ty[x] == y:
                    constraints[row, 4 * i + j] = 1.0
    for i, tx in enumerate(exposure_types):
        for j, ty in enumerate(outcome_types):
            ace[4 * i + j] = ty[1] - ty[0]
    constraints.setflags(write=False)
    ace.setflags(write=False)
    return constraints, ace


def joint_from_counts(counts: np.ndarray) -> ObservedJoint:
    """Empirical joint from the eight cell counts ``n[g][x][y]``.

    Raises
    ------
    EmptyStratum
        If an instrument stratum has zero total count.
    """
    n = np.asarray(counts, dtype=float)
    if n.shape != (2, 2, 2):
        raise ValueError(f"counts must have shape (2, 2, 2), got {n.shape}")
    if (n < 0).any() or not np.isfinite(n).all():
        raise ValueError("counts must be nonnegative and finite")
    totals = n.sum(axis=(1, 2))
    for g in (0, 1):
        if totals[g] == 0:
            raise EmptyStratum(f"instrument stratum g={g} has no observations")
    return ObservedJoint(n / totals[:, None, None])


def ace_bounds(joint: ObservedJoint) -> BoundsResult:
    """Bounds on P(Y(1)=1) - P(Y(0)=1) over all model-compatible type distributions.

    Solves the response-type linear program twice (minimize and maximize)
    with a deterministic dense solver. Any returned solution is checked
    against the constraints at ``FEASIBILITY_TOL``.
    """
    constraints, ace = response_type_system()
    target = np.array([joint.p[g, x, y] for (g, x, y) in _CELLS])

    values = []
    for sign in (1.0, -1.0):
        result = linprog(sign * ace, A_eq=constraints, b_eq=target, bounds=(0.0, 1.0), method="highs")
        if not result.success:
            return BoundsResult(lower=float("nan"), upper=float("nan"), feasible=False)
        residual = np.abs(constraints @ result.x - target).max()
        if residual > FEASIBILITY_TOL:
            return BoundsResult(lower=float("nan"), upper=float("nan"), feasible=False)
        values.append(sign * result.fun)
    lower, upper = values
    # guard against solver round-off leaking outside the logical range
    lower = min(max(lower, -1.0), 1.0)
    upper = min(max(upper, -1.0), 1.0)
    return BoundsResult(lower=lower, upper=upper, feasible=True)


def null_test_consistency(joint: ObservedJoint, tol: float = 1e-12) -> bool:
    """Whether the joint carries no population-level instrument-outcome association.

    True iff P(Y=1 | G=1) equals P(Y=1 | G=0) within ``tol``. Testing this
    association is a valid test of the causal null hypothesis whenever
    the instrumental-variable assumptions hold for the (possibly
    continuous) risk factor underlying the exposure.
    """
    return (
        abs(joint.prob_outcome_given_instrument(1) - joint.prob_outcome_given_instrument(0)) <= tol
    )
