"""Command-line front end.

``chainuq analyze`` reads model-indicator chains, samples the posterior of
the transition matrix, and reports uncertainty summaries, Bayes factors,
subset probabilities, rank stability, and the effective sample size.
``chainuq bench`` runs the synthetic coverage study.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .benchmark import run_coverage_experiment
from .chains import count_transitions, merge_counts, read_chain_file
from .errors import (
    ChainFileError,
    ChainUQError,
    ConfigError,
    DegenerateRowError,
    DegenerateSamplesError,
    DomainError,
    EmptyChainError,
    EmptyMergeError,
    InsufficientTransitionsError,
    LabelError,
    NonStochasticError,
    NoUniqueStationaryError,
)
from .ess import effective_sample_size
from .sampling import PriorSpec, draw_posterior, point_estimate
from .summaries import bayes_factors, rank_stability, subset_probability, summarize

INPUT_ERRORS = (
    ChainFileError,
    EmptyChainError,
    InsufficientTransitionsError,
    EmptyMergeError,
    OSError,
)
NUMERICAL_ERRORS = (
    DegenerateRowError,
    NoUniqueStationaryError,
    NonStochasticError,
    DomainError,
    DegenerateSamplesError,
)
CONFIG_ERRORS = (ConfigError, LabelError)


@dataclass
class RunConfig:
    """Validated configuration of one analyze run."""

    inputs: list
    input_format: str | None
    epsilon_text: str
    prior: PriorSpec
    n_draws: int
    seed: int
    levels: tuple
    k_top: int | None
    subsets: list = field(default_factory=list)
    bf_pairs: list = field(default_factory=list)
    declared: list = field(default_factory=list)
    out: str = "-"
    out_format: str = "text"


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports bad flags as config errors (exit 3)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_epsilon(text: str) -> PriorSpec:
    if text in ("default_reduced", "default"):
        return PriorSpec.default()
    if text.startswith("fixed:"):
        try:
            value = float(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"cannot parse epsilon value in {text!r}") from None
        return PriorSpec.fixed(value)
    if text.startswith("matrix:"):
        path = text.split(":", 1)[1]
        try:
            matrix = np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read epsilon matrix from {path!r}: {exc}") from None
        return PriorSpec.from_matrix(matrix)
    raise ConfigError(
        f"epsilon must be 'default_reduced', 'fixed:<value>' or 'matrix:<path>', got {text!r}"
    )


def _parse_ci(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--ci expects two comma-separated levels, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"cannot parse --ci levels from {text!r}") from None
    if not (0.0 < lo < hi < 1.0):
        raise ConfigError(f"--ci levels must satisfy 0 < lo < hi < 1, got {text!r}")
    return lo, hi


def _parse_subset(text: str, position: int) -> tuple:
    if "=" in text:
        name, labels = text.split("=", 1)
    else:
        name, labels = f"subset_{position}", text
    members = [part.strip() for part in labels.split(",") if part.strip()]
    if not members:
        raise ConfigError(f"subset {text!r} names no models")
    return name.strip(), members


def _parse_pair(text: str) -> tuple:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"--bf expects 'numerator,denominator', got {text!r}")
    return parts[0], parts[1]


def _parse_labels(text: str) -> list:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_floats(text: str, flag: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse {flag} value {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chainuq",
        description="Quantify the Monte Carlo uncertainty of posterior model "
        "probabilities estimated from a discrete model-indicator chain.",
    )
    parser.add_argument("--version", action="version", version=f"chainuq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze one or more model-indicator chains")
    an.add_argument("--input", action="append", required=True, metavar="PATH",
                    help="chain file; repeat for multiple independent chains")
    an.add_argument("--format", choices=("lines", "csv"), default=None,
                    help="input format (default: inferred from the extension)")
    an.add_argument("--epsilon", default="default_reduced", metavar="POLICY",
                    help="prior policy: default_reduced | fixed:<value> | matrix:<path>")
    an.add_argument("--draws", type=int, default=1000, metavar="R",
                    help="posterior draws (default 1000; use >= 5000 for densities)")
    an.add_argument("--seed", type=int, default=None,
                    help="RNG seed (default: fresh entropy, recorded in the report)")
    an.add_argument("--ci", default="0.05,0.95", metavar="LO,HI",
                    help="credibility interval quantile levels")
    an.add_argument("--top-k", type=int, default=None, metavar="K",
                    help="emit a rank-stability report for the top K models")
    an.add_argument("--subset", action="append", default=[], metavar="[NAME=]A,B",
                    help="summarize the total probability of a set of models; repeatable")
    an.add_argument("--bf", action="append", default=[], metavar="A,B",
                    help="summarize the Bayes factor of model A over model B; repeatable")
    an.add_argument("--declared", default="", metavar="A,B",
                    help="models that could have been sampled; reported even if never seen")
    an.add_argument("--out", default="-", metavar="PATH", help="output path (default stdout)")
    an.add_argument("--out-format", choices=("json", "csv", "text"), default="text")

    be = sub.add_parser("bench", help="run the synthetic coverage study")
    be.add_argument("--pi", default="0.85,0.13,0.02", metavar="P1,P2,...",
                    help="generating stationary distribution")
    be.add_argument("--beta-grid", default="0,0.2,0.4,0.6,0.8", metavar="B1,B2,...",
                    help="autocorrelation levels to sweep")
    be.add_argument("--iterations", type=int, default=1000, metavar="T")
    be.add_argument("--replications", type=int, default=200)
    be.add_argument("--draws", type=int, default=1000, metavar="R")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--ci", default="0.05,0.95", metavar="LO,HI")
    be.add_argument("--out", default="coverage", metavar="PREFIX",
                    help="writes PREFIX.csv and PREFIX.json")
    return parser


def _clean(value):
    """Make a report value JSON-safe: plain python types, NaN/inf -> None."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    return value


def analyze_chains(
    chains,
    prior: PriorSpec,
    n_draws: int,
    seed: int,
    levels=(0.05, 0.95),
    k_top: int | None = None,
    subsets=(),
    bf_pairs=(),
    declared=(),
    epsilon_text: str = "default_reduced",
    inputs=(),
    input_format=None,
) -> dict:
    """Run the full pipeline on indexed chains and assemble the report dict.

    This is the CLI's engine, exposed so library users can produce the same
    report without touching the filesystem.
    """
    counts = merge_counts([count_transitions(c) for c in chains])
    draws = draw_posterior(counts, prior, n_draws=n_draws, seed=seed)
    summary = summarize(draws, levels=levels)
    point = point_estimate(draws, "mean")
    ess_est = effective_sample_size(draws)

    warnings = []
    if summary.insufficient_draws:
        warnings.append({
            "code": "insufficient_draws_for_sd",
            "message": "fewer than two draws; standard deviations are undefined",
        })

    rank_report = None
    k_used = None
    if k_top is not None:
        k_used = min(int(k_top), counts.n_models)
        if k_used < int(k_top):
            warnings.append({
                "code": "k_top_reduced",
                "message": f"top-k reduced from {k_top} to the {counts.n_models} observed models",
            })
        rank_report = rank_stability(draws, k_top=k_used)

    bf_results = bayes_factors(draws, bf_pairs, levels=levels) if bf_pairs else []
    for bf in bf_results:
        if bf.unstable:
            warnings.append({
                "code": "unstable_bayes_factor",
                "message": (
                    f"B({bf.numerator!r}/{bf.denominator!r}): {bf.n_zero_denominator} "
                    f"of {draws.n_draws} draws had a zero denominator; summary uses "
                    "the remaining draws only"
                ),
            })
    subset_results = [
        (name, subset_probability(draws, members, levels=levels))
        for name, members in subsets
    ]

    if ess_est.single_model:
        warnings.append({
            "code": "single_model_chain",
            "message": "only one model was ever sampled; the effective sample size is undefined",
        })
    if ess_est.negative:
        warnings.append({
            "code": "negative_ess",
            "message": "fitted shape total fell below the prior weight; t_eff reported as 0",
        })
    if ess_est.exceeds_raw:
        warnings.append({
            "code": "ess_exceeds_iterations",
            "message": (
                f"t_eff = {ess_est.t_eff:.6g} exceeds 1.5x the {ess_est.t_raw} chain "
                "iterations; reported as estimated, never truncated"
            ),
        })
    if not ess_est.converged:
        warnings.append({
            "code": "dirichlet_fit_not_converged",
            "message": "shape fit hit its iteration budget; t_eff uses the best iterate",
        })
    if ess_est.approximate:
        warnings.append({
            "code": "clamped_draws",
            "message": "draws contained zero components that were clamped before the fit",
        })

    label_index = counts.label_to_index
    never_sampled = [lab for lab in declared if lab not in label_index]
    for lab in never_sampled:
        warnings.append({
            "code": "never_sampled_model",
            "message": f"declared model {lab!r} was never sampled; reported with probability 0",
        })

    model_rows = []
    for lab in counts.labels:
        i = label_index[lab]
        row = {
            "label": str(lab),
            "mean": summary.mean[i],
            "sd": summary.sd[i],
            "median": summary.median[i],
            "ci_lower": summary.lower[i],
            "ci_upper": summary.upper[i],
            "point_estimate": point[i],
            "visits": int(counts.visits[i]),
            "never_sampled": False,
        }
        if rank_report is not None:
            row["rank"] = {
                "point_rank": int(rank_report.point_rank[i]),
                "mean_rank": rank_report.mean_rank[i],
                "sd_rank": rank_report.sd_rank[i],
                "p_rank_equals_point": rank_report.p_rank_equals_point[i],
                "p_rank_within_top": rank_report.p_rank_within_top[i],
            }
        model_rows.append(row)
    for lab in never_sampled:
        model_rows.append({
            "label": str(lab),
            "mean": 0.0,
            "sd": 0.0,
            "median": 0.0,
            "ci_lower": 0.0,
            "ci_upper": 0.0,
            "point_estimate": 0.0,
            "visits": 0,
            "never_sampled": True,
        })
    model_rows.sort(key=lambda row: row["label"])

    report = {
        "tool": "chainuq",
        "version": __version__,
        "config": {
            "inputs": [str(p) for p in inputs],
            "input_format": input_format,
            "epsilon_policy": epsilon_text,
            "epsilon_total_mass": draws.prior_mass,
            "draws": n_draws,
            "seed": int(seed),
            "ci_levels": list(levels),
            "k_top": k_used,
            "subsets": [name for name, _ in subsets],
            "bayes_factor_pairs": [[str(a), str(b)] for a, b in bf_pairs],
            "declared_models": [str(lab) for lab in declared],
        },
        "chain": {
            "chains": counts.n_chains,
            "iterations": counts.total_iterations,
            "transitions": counts.total_transitions,
            "models_observed": counts.n_models,
        },
        "models": model_rows,
        "ess": {
            "t_eff": ess_est.t_eff,
            "t_raw": ess_est.t_raw,
            "ratio": ess_est.ratio,
            "alpha_total": None if ess_est.alpha_hat is None else float(ess_est.alpha_hat.sum()),
            "prior_weight": ess_est.prior_weight,
            "converged": ess_est.converged,
            "negative": ess_est.negative,
            "single_model": ess_est.single_model,
        },
        "warnings": warnings,
    }
    if rank_report is not None:
        report["rank_stability"] = {
            "k_top": rank_report.k_top,
            "p_top_order_reproduced": rank_report.p_top_order_reproduced,
        }
    if bf_results:
        report["bayes_factors"] = [
            {
                "numerator": str(bf.numerator),
                "denominator": str(bf.denominator),
                "mean": bf.mean,
                "sd": bf.sd,
                "median": bf.median,
                "ci_lower": bf.lower,
                "ci_upper": bf.upper,
                "n_zero_denominator": bf.n_zero_denominator,
                "unstable": bf.unstable,
            }
            for bf in bf_results
        ]
    if subset_results:
        report["subsets"] = [
            {
                "name": name,
                "labels": [str(lab) for lab in res.labels],
                "mean": res.mean,
                "sd": res.sd,
                "median": res.median,
                "ci_lower": res.lower,
                "ci_upper": res.upper,
            }
            for name, res in subset_results
        ]
    return _clean(report)


def render_text(report: dict) -> str:
    lines = []
    cfg = report["config"]
    ch = report["chain"]
    lines.append(f"chainuq {report['version']} analyze report")
    lines.append(
        f"seed {cfg['seed']}   draws {cfg['draws']}   epsilon {cfg['epsilon_policy']}"
        f"   ci {cfg['ci_levels'][0]:g},{cfg['ci_levels'][1]:g}"
    )
    lines.append(
        f"chains {ch['chains']}   iterations {ch['iterations']}   "
        f"transitions {ch['transitions']}   observed models {ch['models_observed']}"
    )
    lines.append("")
    header = f"{'model':<16}{'mean':>12}{'sd':>12}{'median':>12}{'lower':>12}{'upper':>12}"
    lines.append(header)
    for row in report["models"]:
        tag = "  (never sampled)" if row["never_sampled"] else ""
        sd = row["sd"]
        sd_txt = f"{sd:>12.6g}" if sd is not None else f"{'n/a':>12}"
        lines.append(
            f"{row['label']:<16}{row['mean']:>12.6g}{sd_txt}{row['median']:>12.6g}"
            f"{row['ci_lower']:>12.6g}{row['ci_upper']:>12.6g}{tag}"
        )
    lines.append("")
    ess = report["ess"]
    if ess["t_eff"] is None:
        lines.append("effective sample size: undefined (see warnings)")
    else:
        lines.append(
            f"effective sample size: t_eff {ess['t_eff']:.6g} of {ess['t_raw']} "
            f"iterations (ratio {ess['ratio']:.6g})"
        )
    if "rank_stability" in report:
        rs = report["rank_stability"]
        lines.append(
            f"rank stability: top-{rs['k_top']} ordering reproduced in "
            f"{100 * rs['p_top_order_reproduced']:.6g}% of draws"
        )
        for row in report["models"]:
            if "rank" in row:
                rk = row["rank"]
                lines.append(
                    f"  {row['label']:<14} rank {rk['point_rank']:>3}   "
                    f"mean {rk['mean_rank']:.6g}   P(rank=point) {rk['p_rank_equals_point']:.6g}   "
                    f"P(rank<=k) {rk['p_rank_within_top']:.6g}"
                )
    for bf in report.get("bayes_factors", []):
        mean = "n/a" if bf["mean"] is None else f"{bf['mean']:.6g}"
        sd = "n/a" if bf["sd"] is None else f"{bf['sd']:.6g}"
        flag = "  [unstable]" if bf["unstable"] else ""
        lines.append(
            f"bayes factor {bf['numerator']}/{bf['denominator']}: mean {mean} "
            f"sd {sd} ci [{bf['ci_lower']:.6g}, {bf['ci_upper']:.6g}]{flag}"
            if bf["ci_lower"] is not None
            else f"bayes factor {bf['numerator']}/{bf['denominator']}: undefined{flag}"
        )
    for sub_row in report.get("subsets", []):
        lines.append(
            f"subset {sub_row['name']} ({','.join(sub_row['labels'])}): "
            f"mean {sub_row['mean']:.6g} sd {sub_row['sd']:.6g} "
            f"ci [{sub_row['ci_lower']:.6g}, {sub_row['ci_upper']:.6g}]"
        )
    if report["warnings"]:
        lines.append("")
        lines.append("warnings:")
        for w in report["warnings"]:
            lines.append(f"  [{w['code']}] {w['message']}")
    return "\n".join(lines) + "\n"


def render_csv(report: dict) -> str:
    cfg = report["config"]
    lines = [
        f"# chainuq={report['version']} seed={cfg['seed']} draws={cfg['draws']} "
        f"epsilon={cfg['epsilon_policy']} ci={cfg['ci_levels'][0]!r},{cfg['ci_levels'][1]!r}",
        "label,mean,sd,median,ci_lower,ci_upper,point_estimate,visits,never_sampled",
    ]
    for row in report["models"]:
        sd = "" if row["sd"] is None else repr(row["sd"])
        lines.append(
            f"{row['label']},{row['mean']!r},{sd},{row['median']!r},"
            f"{row['ci_lower']!r},{row['ci_upper']!r},{row['point_estimate']!r},"
            f"{row['visits']},{row['never_sampled']}"
        )
    ess = report["ess"]
    t_eff = "" if ess["t_eff"] is None else repr(ess["t_eff"])
    lines.append(f"# ess t_eff={t_eff} t_raw={ess['t_raw']} prior_weight={ess['prior_weight']!r}")
    return "\n".join(lines) + "\n"


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config_from_args(args) -> RunConfig:
    if args.draws < 1:
        raise ConfigError("--draws must be at least 1")
    seed = args.seed
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    if args.top_k is not None and args.top_k < 1:
        raise ConfigError("--top-k must be at least 1")
    return RunConfig(
        inputs=list(args.input),
        input_format=args.format,
        epsilon_text=args.epsilon,
        prior=_parse_epsilon(args.epsilon),
        n_draws=args.draws,
        seed=seed,
        levels=_parse_ci(args.ci),
        k_top=args.top_k,
        subsets=[_parse_subset(s, i + 1) for i, s in enumerate(args.subset)],
        bf_pairs=[_parse_pair(p) for p in args.bf],
        declared=_parse_labels(args.declared),
        out=args.out,
        out_format=args.out_format,
    )


def _run_analyze(args) -> int:
    config = _config_from_args(args)
    chains = []
    for path in config.inputs:
        chains.extend(read_chain_file(path, config.input_format))
    report = analyze_chains(
        chains,
        prior=config.prior,
        n_draws=config.n_draws,
        seed=config.seed,
        levels=config.levels,
        k_top=config.k_top,
        subsets=config.subsets,
        bf_pairs=config.bf_pairs,
        declared=config.declared,
        epsilon_text=config.epsilon_text,
        inputs=config.inputs,
        input_format=config.input_format,
    )
    if config.out_format == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif config.out_format == "csv":
        text = render_csv(report)
    else:
        text = render_text(report)
    _write_output(text, config.out)
    return 0


def _run_bench(args) -> int:
    pi = _parse_floats(args.pi, "--pi")
    betas = _parse_floats(args.beta_grid, "--beta-grid")
    if not pi or abs(sum(pi) - 1.0) > 1e-9 or any(p < 0 for p in pi):
        raise ConfigError(f"--pi must be a probability vector summing to 1, got {args.pi!r}")
    if not betas or any(not 0.0 <= b <= 1.0 for b in betas):
        raise ConfigError(f"--beta-grid values must lie in [0, 1], got {args.beta_grid!r}")
    if args.iterations < 2 or args.replications < 1 or args.draws < 1:
        raise ConfigError("--iterations must be >= 2, --replications and --draws >= 1")
    result = run_coverage_experiment(
        pi,
        betas,
        iterations=args.iterations,
        replications=args.replications,
        n_draws=args.draws,
        seed=args.seed,
        levels=_parse_ci(args.ci),
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    csv_path = f"{args.out}.csv"
    json_path = f"{args.out}.json"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(result.to_json())
    print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "analyze":
            return _run_analyze(args)
        return _run_bench(args)
    except CONFIG_ERRORS as exc:
        print(f"chainuq: config error: {exc}", file=sys.stderr)
        return 3
    except NUMERICAL_ERRORS as exc:
        print(f"chainuq: numerical failure: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"chainuq: input error: {exc}", file=sys.stderr)
        return 1
    except ChainUQError as exc:  # safety net for uncategorized package errors
        print(f"chainuq: error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
