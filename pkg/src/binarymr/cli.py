"""Command-line interface.

Subcommands: ``estimate`` (summary TSV in, causal estimate out),
``simulate`` (counterfactual-ledger experiments), ``bounds`` (average
causal effect bounds from eight counts), ``power`` (analytic power and
the conservatism report), and ``advise`` (the decision-flow advisor).

Reports are TSV tables preceded by ``#``-prefixed metadata lines, so they
are both human- and machine-readable; diagnostics go to standard error.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import advisor, power as power_mod, scaling
from .bounds import ace_bounds, joint_from_counts, null_test_consistency
from .core import CausalEstimate, ExposureScale, parse_summary_tsv
from .errors import (
    BinaryMRError,
    DataError,
    EstimationError,
    NoCompliers,
    NoFirstStage,
    NoGeneticVariation,
    PreconditionViolated,
    WrongScale,
)
from .estimators import individual_wald, ivw, mr_egger, wald_ratio, weighted_median
from .simulator import (
    SimConfig,
    classify_strata,
    complier_proportion_estimate,
    exclusion_violation_demo,
    parse_sim_config,
    simulate,
    true_cace,
    wald_vs_cace_experiment,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _meta(key: str, value) -> None:
    print(f"# {key}: {_fmt(value)}")


def _kv_rows(rows: list[tuple[str, object]]) -> None:
    print("key\tvalue")
    for key, value in rows:
        print(f"{key}\t{_fmt(value)}")


_CONFIG_FLAGS = {
    "n": int,
    "maf": float,
    "genetic_model": str,
    "gamma": float,
    "kappa": float,
    "tau": float,
    "beta_step": float,
    "beta_cont": float,
    "lambda": float,
    "sd_z": float,
    "sd_y": float,
    "seed": int,
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key = value configuration file")
    for key, kind in _CONFIG_FLAGS.items():
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, type=kind, dest=f"cfg_{key}", metavar=key.upper())


def _build_config(args: argparse.Namespace) -> SimConfig:
    """Merge a config file with command-line overrides."""
    if args.config:
        base = parse_sim_config(Path(args.config).read_text())
        values = {f.name: getattr(base, f.name) for f in fields(SimConfig)}
    else:
        values = {}
    for key in _CONFIG_FLAGS:
        given = getattr(args, f"cfg_{key}")
        if given is not None:
            values["lam" if key == "lambda" else key] = given
    missing = [k for k in ("n", "maf", "gamma", "tau") if k not in values]
    if missing:
        raise DataError(f"missing required simulation parameters: {', '.join(missing)}")
    try:
        return SimConfig(**values)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid configuration: {exc}") from None


def _cmd_estimate(args: argparse.Namespace) -> int:
    scale = ExposureScale(args.scale)
    dataset = parse_summary_tsv(Path(args.infile).read_text(encoding="utf-8"), scale)
    alpha = args.alpha
    method = {"ivw": "ivw-fixed"}.get(args.method, args.method)

    rows: list[tuple[str, CausalEstimate]]
    if method == "wald":
        rows = [(v.variant_id, wald_ratio(v, alpha)) for v in dataset]
    elif method == "ivw-fixed":
        rows = [("ivw-fixed", ivw(dataset, "fixed", alpha))]
    elif method == "ivw-random":
        rows = [("ivw-random", ivw(dataset, "random", alpha))]
    elif method == "egger":
        slope, intercept = mr_egger(dataset, alpha)
        rows = [("egger-slope", slope), ("egger-intercept", intercept)]
    else:  # weighted-median
        rows = [
            ("weighted-median", weighted_median(dataset, alpha, n_boot=args.n_boot, seed=args.seed))
        ]

    def transform(estimate: CausalEstimate) -> CausalEstimate:
        if args.per_doubling:
            return scaling.per_doubling(estimate, scale)
        if args.per_percent is not None:
            return scaling.per_percent(estimate, scale, args.per_percent)
        return estimate

    # the egger intercept is a per-allele pleiotropy term, not a causal
    # effect, so exposure rescalings do not apply to it
    rows = [
        (label, estimate if label == "egger-intercept" else transform(estimate))
        for label, estimate in rows
    ]

    lead = rows[0][1]
    _meta("method", method)
    _meta("scale", scale.value)
    _meta("scale_label", lead.scale_label.value)
    _meta("alpha", alpha)
    if method == "weighted-median":
        _meta("seed", args.seed)
        _meta("n_boot", args.n_boot)
    _meta("n_variants", len(dataset))
    _meta("interpretation", scaling.interpret(scale, lead.scale_label, lead.percent))
    print("estimate\tpoint\tse\tci_low\tci_high")
    for label, estimate in rows:
        print(
            f"{label}\t{_fmt(estimate.point)}\t{_fmt(estimate.se)}"
            f"\t{_fmt(estimate.ci_low)}\t{_fmt(estimate.ci_high)}"
        )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    _meta("experiment", args.experiment)
    _meta("seed", config.seed)

    if args.experiment == "summary":
        ledger = simulate(config)
        tally = classify_strata(ledger)
        rows: list[tuple[str, object]] = [
            ("n", config.n),
            ("genetic_model", config.genetic_model),
        ]
        for pattern in sorted(tally.pattern_counts):
            rows.append((f"pattern_{pattern}", tally.pattern_counts[pattern]))
        rows.append(("never_takers", tally.never_takers))
        rows.append(("always_takers", tally.always_takers))
        rows.append(("defiers", tally.defiers))
        if config.genetic_model == "haploid01":
            rows.append(("compliers", tally.compliers))
            rows.append(("complier_proportion_estimate", complier_proportion_estimate(ledger)))
        try:
            rows.append(("true_cace", true_cace(ledger)))
        except NoCompliers:
            rows.append(("true_cace", "NA"))
        try:
            estimate = individual_wald(ledger.observed_gxy(), args.alpha)
            rows.append(("wald_point", estimate.point))
            rows.append(("wald_se", estimate.se))
        except (NoFirstStage, NoGeneticVariation):
            rows.append(("wald_point", "NA"))
            rows.append(("wald_se", "NA"))
        _kv_rows(rows)
        return 0

    if args.experiment == "wald-cace":
        if args.replicates is None:
            raise _UsageError("--replicates is required for the wald-cace experiment")
        report = wald_vs_cace_experiment(config, args.replicates, seed=config.seed)
        _kv_rows(
            [
                ("replicates", report.replicates),
                ("mean_wald", report.mean_wald),
                ("sd_wald", report.sd_wald),
                ("true_cace", report.true_cace),
                ("coverage", report.coverage),
            ]
        )
        return 0

    # exclusion demo
    report = exclusion_violation_demo(config)
    _kv_rows(
        [
            ("g_y_slope", report.g_y_slope),
            ("g_y_se", report.g_y_se),
            ("g_y_z", report.g_y_slope / report.g_y_se if report.g_y_se > 0 else float("nan")),
            ("x_variance", report.x_variance),
        ]
    )
    return 0


def _parse_counts(tokens: list[str]) -> np.ndarray:
    groups: dict[str, list[int]] = {}
    for token in tokens:
        prefix, _, rest = token.partition(":")
        if prefix not in ("g0", "g1") or not rest:
            raise _UsageError(f"counts must look like 'g0:n00,n01,n10,n11', got {token!r}")
        if prefix in groups:
            raise _UsageError(f"group {prefix!r} given twice")
        try:
            cells = [int(c) for c in rest.split(",")]
        except ValueError:
            raise _UsageError(f"counts for {prefix!r} must be integers, got {rest!r}") from None
        if len(cells) != 4 or any(c < 0 for c in cells):
            raise _UsageError(f"group {prefix!r} needs 4 nonnegative counts (x,y = 00,01,10,11)")
        groups[prefix] = cells
    if set(groups) != {"g0", "g1"}:
        raise _UsageError("both groups g0: and g1: are required")
    counts = np.array([groups["g0"], groups["g1"]]).reshape(2, 2, 2)
    return counts


def _cmd_bounds(args: argparse.Namespace) -> int:
    counts = _parse_counts(args.counts)
    joint = joint_from_counts(counts)
    result = ace_bounds(joint)
    _meta("cell_order", "x,y = 00,01,10,11")
    _kv_rows(
        [
            ("lower", result.lower),
            ("upper", result.upper),
            ("feasible", result.feasible),
            ("gy_null_consistent", null_test_consistency(joint)),
        ]
    )
    return 0


def _cmd_power(args: argparse.Namespace) -> int:
    config = _build_config(args)
    _meta("alpha", args.alpha)
    _meta("n", config.n)
    if args.pathway is not None:
        spec = power_mod.PowerSpec(config, args.alpha, args.pathway)
        _kv_rows(
            [
                ("pathway", args.pathway),
                ("slope", power_mod.analytic_gy_slope(config, args.pathway)),
                ("power", power_mod.power_gy_test(spec)),
            ]
        )
        return 0
    report = power_mod.conservatism_report(config, args.alpha)
    _kv_rows(
        [
            ("slope_binary_x", power_mod.analytic_gy_slope(config, power_mod.PATHWAY_BINARY_X)),
            (
                "slope_continuous_z",
                power_mod.analytic_gy_slope(config, power_mod.PATHWAY_CONTINUOUS_Z),
            ),
            ("slope_total", power_mod.analytic_gy_slope(config, power_mod.PATHWAY_TOTAL)),
            ("power_binary", report.power_binary),
            ("power_total", report.power_total),
            ("deficit", report.deficit),
        ]
    )
    return 0


def _cmd_advise(args: argparse.Namespace) -> int:
    inputs = advisor.AdviceInput(
        exposure_is_dichotomization=args.dichotomized,
        believe_monotonicity=args.monotonicity,
        believe_homogeneity=args.homogeneity,
        purpose=args.purpose,
    )
    _meta("dichotomized", inputs.exposure_is_dichotomization)
    _meta("monotonicity", inputs.believe_monotonicity)
    _meta("homogeneity", inputs.believe_homogeneity)
    _meta("purpose", inputs.purpose)
    print("code\tguidance")
    for advice in advisor.advise(inputs):
        print(f"{advice.code.value}\t{advice.text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binarymr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="causal estimates from a summary-statistics TSV")
    p_est.add_argument("--in", dest="infile", required=True, metavar="PATH")
    p_est.add_argument("--scale", required=True, choices=[s.value for s in ExposureScale])
    p_est.add_argument(
        "--method",
        required=True,
        choices=["wald", "ivw", "ivw-fixed", "ivw-random", "egger", "weighted-median"],
    )
    p_est.add_argument("--alpha", type=float, default=0.05)
    p_est.add_argument("--n-boot", type=int, default=1000, help="weighted-median bootstrap size")
    p_est.add_argument("--seed", type=int, default=0, help="weighted-median bootstrap seed")
    rescale = p_est.add_mutually_exclusive_group()
    rescale.add_argument("--per-doubling", action="store_true")
    rescale.add_argument("--per-percent", type=float, metavar="K")
    p_est.set_defaults(func=_cmd_estimate)

    p_sim = sub.add_parser("simulate", help="counterfactual-ledger simulation experiments")
    _add_config_flags(p_sim)
    p_sim.add_argument(
        "--experiment", choices=["summary", "wald-cace", "exclusion"], default="summary"
    )
    p_sim.add_argument("--replicates", type=int)
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.set_defaults(func=_cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="average-causal-effect bounds from eight counts")
    p_bounds.add_argument(
        "--counts",
        nargs=2,
        required=True,
        metavar=("g0:n00,n01,n10,n11", "g1:n00,n01,n10,n11"),
    )
    p_bounds.set_defaults(func=_cmd_bounds)

    p_power = sub.add_parser("power", help="analytic instrument-outcome test power")
    _add_config_flags(p_power)
    p_power.add_argument("--alpha", type=float, default=0.05)
    p_power.add_argument(
        "--pathway",
        choices=[
            power_mod.PATHWAY_BINARY_X,
            power_mod.PATHWAY_CONTINUOUS_Z,
            power_mod.PATHWAY_TOTAL,
        ],
        help="omit to print the conservatism report",
    )
    p_power.set_defaults(func=_cmd_power)

    p_adv = sub.add_parser("advise", help="decision-flow guidance")
    p_adv.add_argument(
        "--dichotomized", action=argparse.BooleanOptionalAction, required=True,
        help="is the binary exposure a dichotomization of a continuous risk factor?",
    )
    p_adv.add_argument("--monotonicity", action=argparse.BooleanOptionalAction, required=True)
    p_adv.add_argument("--homogeneity", action=argparse.BooleanOptionalAction, required=True)
    p_adv.add_argument("--purpose", required=True, choices=list(advisor.PURPOSES))
    p_adv.set_defaults(func=_cmd_advise)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Execute one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except WrongScale as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, PreconditionViolated, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (EstimationError, BinaryMRError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
