"""Latent-risk-factor population simulator with a counterfactual ledger.

The data-generating process draws, per individual, an allele count G, a
confounder U, and noise terms, then sets

    Z = gamma * G + kappa * U + eps_Z          (latent continuous risk factor)
    X = 1[Z > tau]                             (binary exposure by dichotomization)
    Y = beta_step * X + beta_cont * Z + lambda * U + eps_Y

with U ~ N(0, 1), eps_Z ~ N(0, sd_z^2), eps_Y ~ N(0, sd_y^2). The ledger
records each individual's latent factor and exposure under *every*
instrument level (re-evaluating the structural equations with the same U
and eps_Z draws) and the outcome under both exposure interventions
(holding Z at its value under the realized G, so that only the stepwise
X-pathway counts as the binary exposure's effect; the Z-pathway is the
exclusion-restriction violation). Real data never reveal these
counterfactuals; the ledger exists so that principal strata, the true
complier average causal effect, and coverage can be computed exactly.

Everything is deterministic given the seed. Replicated experiments derive
per-replicate seeds from a master seed, so serial and parallel execution
agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from .bounds import ObservedJoint
from .core import CausalEstimate
from .errors import (
    DataError,
    EmptyInstrumentGroup,
    NoCompliers,
    PreconditionViolated,
)
from .estimators import _ols_slope_se, individual_wald
from .rng import substream_seeds

HAPLOID01 = "haploid01"
ADDITIVE012 = "additive012"

_CONFIG_KEYS = (
    "n",
    "maf",
    "genetic_model",
    "gamma",
    "kappa",
    "tau",
    "beta_step",
    "beta_cont",
    "lambda",
    "sd_z",
    "sd_y",
    "seed",
)


@dataclass(frozen=True)
class SimConfig:
    """Data-generating parameters.

    ``gamma`` is the per-allele effect on the latent risk factor Z,
    ``kappa`` the confounder effect on Z, ``tau`` the dichotomization
    threshold (may be +infinity, making the exposure identically zero),
    ``beta_step`` the stepwise effect of the binary exposure on the
    outcome, ``beta_cont`` the direct effect of the latent factor on the
    outcome, and ``lam`` the confounder effect on the outcome.
    """

    n: int
    maf: float
    gamma: float
    tau: float
    genetic_model: str = HAPLOID01
    kappa: float = 0.0
    beta_step: float = 0.0
    beta_cont: float = 0.0
    lam: float = 0.0
    sd_z: float = 1.0
    sd_y: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.maf < 1.0:
            raise ValueError(f"maf must be in (0, 1), got {self.maf}")
        if self.genetic_model not in (HAPLOID01, ADDITIVE012):
            raise ValueError(f"unknown genetic_model {self.genetic_model!r}")
        if self.sd_z <= 0.0 or self.sd_y <= 0.0:
            raise ValueError("sd_z and sd_y must be > 0")
        if math.isnan(self.tau):
            raise ValueError("tau must not be NaN")

    @property
    def instrument_levels(self) -> tuple[int, ...]:
        return (0, 1) if self.genetic_model == HAPLOID01 else (0, 1, 2)


def parse_sim_config(text: str) -> SimConfig:
    """Parse the ``key = value`` configuration format.

    One line per field; blank lines and ``#`` comments are skipped;
    unknown or repeated keys are rejected. ``lambda`` names the confounder
    effect on the outcome and ``tau`` accepts ``inf``.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise DataError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise DataError(f"config line {lineno}: repeated key {key!r}")
        values[key] = value

    kwargs: dict[str, object] = {}
    try:
        for key, value in values.items():
            if key in ("n", "seed"):
                kwargs[key] = int(value)
            elif key == "genetic_model":
                kwargs[key] = value.lower()
            elif key == "lambda":
                kwargs["lam"] = float(value)
            else:
                kwargs[key] = float(value)
    except ValueError as exc:
        raise DataError(f"config key {key!r}: {exc}") from None
    try:
        return SimConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid configuration: {exc}") from None


@dataclass(frozen=True)
class CounterfactualLedger:
    """Per-individual potential exposures and outcomes, plus observed data.

    ``z_levels[:, l]`` and ``x_levels[:, l]`` hold the latent factor and
    exposure the individual would have at instrument level ``l``;
    ``y0``/``y1`` hold the outcome under exposure set to 0/1. Observed
    columns equal the counterfactual entries at the realized instrument
    level. Arrays are read-only.
    """

    config: SimConfig
    g: np.ndarray
    u: np.ndarray
    eps_z: np.ndarray
    eps_y: np.ndarray
    z_levels: np.ndarray
    x_levels: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    x_obs: np.ndarray
    y_obs: np.ndarray

    def __post_init__(self):
        for name in ("g", "u", "eps_z", "eps_y", "z_levels", "x_levels", "y0", "y1", "x_obs", "y_obs"):
            getattr(self, name).setflags(write=False)

    @property
    def n(self) -> int:
        return self.g.size

    def observed_gxy(self) -> np.ndarray:
        """Observed (g, x, y) columns, ready for :func:`individual_wald`."""
        return np.column_stack([self.g, self.x_obs, self.y_obs]).astype(float)

    def complier_mask(self) -> np.ndarray:
        """Individuals whose exposure responds to the instrument somewhere."""
        return np.ptp(self.x_levels, axis=1) != 0


def simulate(config: SimConfig) -> CounterfactualLedger:
    """Draw a population and its full counterfactual ledger.

    Bit-identical output for identical configurations (including seed).
    """
    rng = np.random.default_rng(config.seed)
    n = config.n
    if config.genetic_model == HAPLOID01:
        g = rng.binomial(1, config.maf, size=n)
    else:
        g = rng.binomial(2, config.maf, size=n)
    u = rng.standard_normal(n)
    eps_z = rng.standard_normal(n) * config.sd_z
    eps_y = rng.standard_normal(n) * config.sd_y

    levels = np.array(config.instrument_levels, dtype=float)
    z_levels = config.gamma * levels[None, :] + (config.kappa * u + eps_z)[:, None]
    x_levels = (z_levels > config.tau).astype(np.int8)

    rows = np.arange(n)
    z_obs = z_levels[rows, g]
    x_obs = x_levels[rows, g]
    baseline = config.beta_cont * z_obs + config.lam * u + eps_y
    y0 = baseline
    y1 = baseline + config.beta_step
    y_obs = np.where(x_obs == 1, y1, y0)

    return CounterfactualLedger(
        config=config,
        g=g,
        u=u,
        eps_z=eps_z,
        eps_y=eps_y,
        z_levels=z_levels,
        x_levels=x_levels,
        y0=y0,
        y1=y1,
        x_obs=x_obs,
        y_obs=y_obs,
    )


@dataclass(frozen=True)
class StrataTally:
    """Counts of counterfactual exposure patterns across instrument levels.

    Patterns are strings like ``"01"`` (haploid) or ``"011"`` (additive),
    giving the exposure at each instrument level in order.
    """

    n: int
    genetic_model: str
    levels: int
    pattern_counts: Mapping[str, int]

    def _count(self, pattern: str) -> int:
        return self.pattern_counts.get(pattern, 0)

    @property
    def never_takers(self) -> int:
        return self._count("0" * self.levels)

    @property
    def always_takers(self) -> int:
        return self._count("1" * self.levels)

    @property
    def compliers(self) -> int:
        """Count of the exposure-switched-on-by-the-variant stratum (binary instrument)."""
        if self.genetic_model != HAPLOID01:
            raise ValueError(
                "a single complier count is defined for the binary instrument only; "
                "use pattern_counts for the additive model"
            )
        return self._count("01")

    @property
    def defiers(self) -> int:
        """Individuals whose exposure decreases anywhere as the instrument increases."""
        total = 0
        for pattern, count in self.pattern_counts.items():
            if any(a > b for a, b in zip(pattern, pattern[1:])):
                total += count
        return total


def classify_strata(ledger: CounterfactualLedger) -> StrataTally:
    """Exact principal-strata tally from the ledger's counterfactual exposures."""
    x = ledger.x_levels
    n_levels = x.shape[1]
    codes = np.zeros(ledger.n, dtype=np.int64)
    for level in range(n_levels):
        codes = codes * 2 + x[:, level]
    counts = np.bincount(codes, minlength=2**n_levels)
    pattern_counts = {
        format(code, f"0{n_levels}b"): int(count)
        for code, count in enumerate(counts)
        if count > 0
    }
    return StrataTally(
        n=ledger.n,
        genetic_model=ledger.config.genetic_model,
        levels=n_levels,
        pattern_counts=pattern_counts,
    )


def true_cace(ledger: CounterfactualLedger) -> float:
    """Average of y(1) - y(0) over compliers, straight from the ledger.

    Under this generating process y(1) - y(0) equals ``beta_step`` for
    every individual, so the result is ``beta_step`` whenever a complier
    exists; the averaging is kept general.

    Raises
    ------
    NoCompliers
        If no individual's exposure responds to the instrument.
    """
    mask = ledger.complier_mask()
    if not mask.any():
        raise NoCompliers("no individual's exposure responds to the instrument")
    return float(np.mean(ledger.y1[mask] - ledger.y0[mask]))


def complier_proportion_estimate(ledger: CounterfactualLedger) -> float:
    """P(X=1 | G=1) - P(X=1 | G=0) from observed data only.

    Identifies the complier proportion for a binary instrument under
    monotonicity, without using the ledger's counterfactual columns.

    Raises
    ------
    PreconditionViolated
        If the ledger is not from the binary-instrument model.
    EmptyInstrumentGroup
        If either instrument group is empty.
    """
    if ledger.config.genetic_model != HAPLOID01:
        raise PreconditionViolated("complier proportion is defined for the binary instrument")
    in_g1 = ledger.g == 1
    n1 = int(in_g1.sum())
    n0 = ledger.n - n1
    if n0 == 0 or n1 == 0:
        raise EmptyInstrumentGroup(f"instrument groups have sizes {n0} and {n1}")
    return float(ledger.x_obs[in_g1].mean() - ledger.x_obs[~in_g1].mean())


@dataclass(frozen=True)
class ExclusionReport:
    """Instrument-outcome association while the exposure never moves."""

    g_y_slope: float
    g_y_se: float
    x_variance: float


def exclusion_violation_demo(config: SimConfig) -> ExclusionReport:
    """Show the variant-outcome association surviving a frozen exposure.

    Requires ``tau = +infinity`` so that the binary exposure is
    identically zero; with ``beta_cont * gamma != 0`` the variant still
    moves the outcome through the latent continuous factor, which is
    exactly the exclusion-restriction violation a dichotomized exposure
    invites.

    Raises
    ------
    PreconditionViolated
        If ``tau`` is finite.
    """
    if not (math.isinf(config.tau) and config.tau > 0):
        raise PreconditionViolated("exclusion demo requires tau = +infinity")
    ledger = simulate(config)
    slope, se = _ols_slope_se(ledger.g.astype(float), ledger.y_obs)
    return ExclusionReport(
        g_y_slope=slope, g_y_se=se, x_variance=float(np.var(ledger.x_obs))
    )


@dataclass(frozen=True)
class WaldCaceReport:
    """Replicated comparison of the ratio estimator against the ledger CACE."""

    replicates: int
    mean_wald: float
    sd_wald: float
    true_cace: float
    coverage: float


def wald_vs_cace_experiment(config: SimConfig, replicates: int, seed: int = 0) -> WaldCaceReport:
    """Check that the ratio estimator recovers the complier average causal effect.

    Valid only when the stepwise model is true (``beta_cont = 0``), so the
    binary exposure really is the risk factor. Each replicate simulates a
    fresh population (seeds derived from ``seed``), estimates the
    individual-level ratio, and records whether its confidence interval
    covers the ledger's true CACE.

    Raises
    ------
    PreconditionViolated
        If ``beta_cont != 0``.
    """
    if config.beta_cont != 0.0:
        raise PreconditionViolated("the estimator targets the CACE only when beta_cont = 0")
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    seeds = substream_seeds(seed, replicates)
    points = np.empty(replicates)
    caces = np.empty(replicates)
    covered = 0
    for i in range(replicates):
        ledger = simulate(replace(config, seed=int(seeds[i])))
        estimate = individual_wald(ledger.observed_gxy())
        cace = true_cace(ledger)
        points[i] = estimate.point
        caces[i] = cace
        if estimate.ci_low <= cace <= estimate.ci_high:
            covered += 1
    return WaldCaceReport(
        replicates=replicates,
        mean_wald=float(points.mean()),
        sd_wald=float(points.std(ddof=1)) if replicates > 1 else 0.0,
        true_cace=float(caces.mean()),
        coverage=covered / replicates,
    )


def gy_rejection_rate(
    config: SimConfig, replicates: int, alpha: float = 0.05, seed: int = 0
) -> float:
    """Fraction of replicates rejecting the instrument-outcome null.

    Each replicate simulates a population, regresses the outcome on allele
    count, and rejects when |slope / se| exceeds the two-sided normal
    quantile. Under the causal null this calibrates to ``alpha``; with the
    latent pathway active it shows the test's power.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    z = norm.ppf(1.0 - alpha / 2.0)
    seeds = substream_seeds(seed, replicates)
    rejected = 0
    for i in range(replicates):
        ledger = simulate(replace(config, seed=int(seeds[i])))
        slope, se = _ols_slope_se(ledger.g.astype(float), ledger.y_obs)
        if se > 0 and abs(slope) / se > z:
            rejected += 1
    return rejected / replicates


def binary_outcome_counts(ledger: CounterfactualLedger, y_threshold: float) -> np.ndarray:
    """Cell counts n[g][x][y] with the outcome dichotomized at ``y_threshold``.

    Feeds :func:`binarymr.bounds.joint_from_counts`. Binary instrument only.
    """
    if ledger.config.genetic_model != HAPLOID01:
        raise PreconditionViolated("cell counts require the binary instrument")
    yb = (ledger.y_obs > y_threshold).astype(np.int64)
    codes = 4 * ledger.g + 2 * ledger.x_obs + yb
    return np.bincount(codes, minlength=8).reshape(2, 2, 2)


def binary_outcome_ace(ledger: CounterfactualLedger, y_threshold: float) -> float:
    """True average causal effect of the exposure on the dichotomized outcome."""
    return float(
        np.mean(ledger.y1 > y_threshold) - np.mean(ledger.y0 > y_threshold)
    )


def _upper_orthant(a: float, b: float, rho: float) -> float:
    """P(zeta > a, nu > b) for a standard bivariate normal with correlation rho."""
    if a >= 38.0 or b >= 38.0:
        return 0.0
    scale = math.sqrt(1.0 - rho * rho)

    def integrand(z: float) -> float:
        return norm.pdf(z) * norm.sf((b - rho * z) / scale)

    value, _ = quad(integrand, max(a, -38.0), 38.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def analytic_joint(config: SimConfig, y_threshold: float) -> ObservedJoint:
    """Large-sample joint P(X=x, 1[Y>c]=y | G=g) computed without sampling.

    Marginalizing the confounder, the latent factor Z and the non-stepwise
    outcome part V = beta_cont*Z + lambda*U + eps_Y are jointly normal
    given G, so every cell is a bivariate-normal orthant probability.
    Binary instrument only.
    """
    if config.genetic_model != HAPLOID01:
        raise PreconditionViolated("the analytic joint requires the binary instrument")

    var_z = config.kappa**2 + config.sd_z**2
    sd_z_total = math.sqrt(var_z)
    cov_zv = config.beta_cont * var_z + config.lam * config.kappa
    var_v = (
        config.beta_cont**2 * var_z
        + config.lam**2
        + config.sd_y**2
        + 2.0 * config.beta_cont * config.lam * config.kappa
    )
    sd_v = math.sqrt(var_v)
    rho = cov_zv / (sd_z_total * sd_v)

    p = np.zeros((2, 2, 2))
    for g in (0, 1):
        mean_z = config.gamma * g
        mean_v = config.beta_cont * mean_z
        a = min(max((config.tau - mean_z) / sd_z_total, -38.0), 38.0)
        b1 = (y_threshold - config.beta_step - mean_v) / sd_v
        b0 = (y_threshold - mean_v) / sd_v

        q11 = _upper_orthant(a, b1, rho)
        q10 = norm.sf(a) - q11
        q01 = norm.sf(b0) - _upper_orthant(a, b0, rho)
        q00 = norm.cdf(a) - q01
        cells = np.clip([q00, q01, q10, q11], 0.0, None)
        p[g] = (cells / cells.sum()).reshape(2, 2)
    return ObservedJoint(p)
