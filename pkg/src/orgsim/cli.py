"""Headless entry point: single runs, strategy comparisons, replays, serving.

Exit codes: 0 success, 1 usage, 2 scenario/validation failure, 3 runtime
failure (I/O, corrupt snapshots, simulation errors).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import REGIMES, ScenarioConfig, ScenarioError
from .diagnostics import (
    negative_counts_series,
    path_matrix,
    recompute_efficiency,
    strategy_comparison,
    summarize_deltas,
)
from .engine import RunResult, run_simulation, run_strategies
from .runio import RunFormatError, export_run, load_run, load_scenario, save_run
from .strategies import StrategyKind

SNAPSHOT_NAME = "run_snapshot.tar.gz"

USAGE_EXIT = 1
VALIDATION_EXIT = 2
RUNTIME_EXIT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orgsim",
        description="Promotion-policy simulator for a five-level organizational hierarchy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario and export its tables")
    run_p.add_argument("scenario", nargs="?", default="", help="scenario YAML (omit for defaults)")
    run_p.add_argument("--out", type=Path, help="export directory")
    _add_overrides(run_p)
    run_p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    run_p.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser("compare", help="run several strategies from one initial org")
    cmp_p.add_argument("scenario", nargs="?", default="")
    cmp_p.add_argument(
        "--strategies",
        required=True,
        help="comma-separated strategy kinds (e.g. merit,seniority,random)",
    )
    cmp_p.add_argument("--out", type=Path)
    _add_overrides(cmp_p, include_strategy=False)
    cmp_p.add_argument("--no-figures", action="store_true")
    cmp_p.add_argument(
        "--full-exports", action="store_true", help="also export every run's tables"
    )
    cmp_p.set_defaults(func=_cmd_compare)

    replay_p = sub.add_parser("replay", help="recompute diagnostics from a saved run")
    replay_p.add_argument("snapshot", type=Path)
    replay_p.add_argument("--out", type=Path)
    replay_p.add_argument("--no-figures", action="store_true")
    replay_p.set_defaults(func=_cmd_replay)

    serve_p = sub.add_parser("serve", help="start the HTTP JSON API")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--snapshot-dir", type=Path, default=None)
    serve_p.add_argument("--max-concurrent", type=int, default=2)
    serve_p.add_argument(
        "--dashboard-dir", type=Path, default=None, help="serve a built dashboard from this dir"
    )
    serve_p.set_defaults(func=_cmd_serve)
    return parser


def _add_overrides(parser: argparse.ArgumentParser, include_strategy: bool = True) -> None:
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--regime", help="override the regime preset")
    if include_strategy:
        parser.add_argument("--strategy", help="override the promotion strategy")
    parser.add_argument("--tau", type=float, help="override the demotion tolerance")
    parser.add_argument("--alpha", type=float, help="override the hybrid performance weight")


def _apply_overrides(config: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.regime is not None:
        if args.regime not in REGIMES:
            raise ScenarioError("regime", f"unknown preset {args.regime!r}")
        overrides["regime"] = REGIMES[args.regime]
    if getattr(args, "strategy", None) is not None:
        try:
            overrides["kind"] = StrategyKind(args.strategy)
        except ValueError:
            raise ScenarioError("strategy.kind", f"unknown strategy {args.strategy!r}") from None
    if args.tau is not None:
        overrides["demotion_tolerance"] = args.tau
    if args.alpha is not None:
        overrides["performance_weight"] = args.alpha
    return config.with_overrides(**overrides) if overrides else config


def _cmd_run(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    run = run_simulation(config)
    _print_run_summary(run)
    if args.out:
        paths = export_run(run, args.out)
        paths.append(save_run(run, args.out / SNAPSHOT_NAME))
        if not args.no_figures:
            from .figures import render_run_figures

            paths.extend(render_run_figures(run, args.out))
        print(f"wrote {len(paths)} files to {args.out}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    try:
        kinds = [StrategyKind(k.strip()) for k in args.strategies.split(",") if k.strip()]
    except ValueError as exc:
        raise ScenarioError("strategy.kind", str(exc)) from None
    if not kinds:
        raise ScenarioError("strategy.kind", "no strategies given")
    runs = run_strategies(config, kinds)
    rows = strategy_comparison(runs)
    order = sorted(range(len(rows)), key=lambda i: -rows[i].final_efficiency)
    header = f"{'strategy':<20}{'mean_dp':>10}{'median_dp':>11}{'%drop':>8}{'promotions':>12}{'E_T':>10}"
    print(header)
    for i in order:
        r = rows[i]
        print(
            f"{r.strategy:<20}{r.mean_delta_p:>10.4f}{r.median_delta_p:>11.4f}"
            f"{100 * r.share_negative:>7.1f}%{r.promotions:>12}{r.final_efficiency:>10.5f}"
        )
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        with (args.out / "comparison.csv").open("w", newline="\n") as f:
            f.write("strategy,mean_delta_p,median_delta_p,share_negative,promotions,final_efficiency\n")
            for i in order:
                r = rows[i]
                f.write(
                    f"{r.strategy},{r.mean_delta_p!r},{r.median_delta_p!r},"
                    f"{r.share_negative!r},{r.promotions},{r.final_efficiency!r}\n"
                )
        if not args.no_figures:
            from .figures import render_comparison_figure

            render_comparison_figure(runs, args.out)
        if args.full_exports:
            for run in runs:
                export_run(run, args.out / run.config.strategy.kind.value)
        print(f"wrote comparison to {args.out}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    run = load_run(args.snapshot)
    _print_run_summary(run)
    recomputed = recompute_efficiency(run)
    drift = float(abs(recomputed - run.efficiency).max()) if run.efficiency.size else 0.0
    print(f"efficiency recompute max deviation: {drift:.3e}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        summary = summarize_deltas(run.effective_promotions)
        with (args.out / "delta_summary.csv").open("w", newline="\n") as f:
            f.write("count,mean,median,share_negative,share_large_negative,min,max,p01,p99\n")
            f.write(
                f"{summary.count},{summary.mean!r},{summary.median!r},{summary.share_negative!r},"
                f"{summary.share_large_negative!r},{summary.min!r},{summary.max!r},"
                f"{summary.p01!r},{summary.p99!r}\n"
            )
        matrix = path_matrix(run.effective_promotions)
        with (args.out / "path_matrix.csv").open("w", newline="\n") as f:
            f.write("from_level,to_level,count,mean_delta,positive,negative\n")
            for (src, dst), cell in sorted(matrix.cells.items()):
                f.write(f"{src},{dst},{cell.count},{cell.mean_delta!r},{cell.positive},{cell.negative}\n")
        negatives = negative_counts_series(run.effective_promotions, run.n_steps)
        with (args.out / "negatives.csv").open("w", newline="\n") as f:
            f.write("step,negative_promotions\n")
            for t, count in enumerate(negatives, start=1):
                f.write(f"{t},{count}\n")
        with (args.out / "efficiency.csv").open("w", newline="\n") as f:
            f.write("step,efficiency\n")
            for t, value in enumerate(run.efficiency):
                f.write(f"{t},{value!r}\n")
        if not args.no_figures:
            from .figures import render_run_figures

            render_run_figures(run, args.out)
        print(f"wrote diagnostics to {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(
        max_concurrent=args.max_concurrent,
        snapshot_dir=args.snapshot_dir,
        dashboard_dir=args.dashboard_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _print_run_summary(run: RunResult) -> None:
    summary = summarize_deltas(run.effective_promotions)
    kind = run.config.strategy.kind.value
    print(
        f"{kind}: steps={run.n_steps} agents={run.config.n_agents} "
        f"E_0={run.efficiency[0]:.5f} E_T={run.efficiency[-1]:.5f} "
        f"promotions={summary.count} share_negative={summary.share_negative:.3f}"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else USAGE_EXIT
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario -- {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except RunFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except KeyboardInterrupt:
        return RUNTIME_EXIT
    except Exception as exc:  # simulation or I/O failure
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
