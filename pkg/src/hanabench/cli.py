"""Command-line entry points.

    hanabench tournament --out runs/demo --games 125 --seed 20260801
    hanabench metrics    --run runs/demo --out runs/demo/report.csv
    hanabench regress    --run runs/demo --ratings ratings.json --out analysis.csv
    hanabench replay     --run runs/demo
    hanabench serve      --log events.jsonl --port 8000

A tournament run directory holds `config.json` (pool and settings, enough to
reproduce the run exactly) and `traces.jsonl` (one game per line).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

from .agents import DEFAULT_POOL, load_pool
from .harness import TournamentConfig, read_traces, replay_trace, run_tournament, write_traces
from .metrics import build_report
from .stats import analyze_cohorts, write_analysis_csv


def _load_tournament_config(args) -> TournamentConfig:
    pool = load_pool(args.pool) if args.pool else DEFAULT_POOL
    return TournamentConfig(
        pool=tuple(pool),
        games_per_pairing=args.games,
        base_seed=args.seed,
        counting=not args.no_counting,
        allow_discard_at_max_tokens=args.allow_discard_at_max_tokens,
        allow_empty_hints=args.allow_empty_hints,
        processes=args.processes,
    )


def _run_dir_config(run_dir: Path) -> TournamentConfig:
    with open(run_dir / "config.json") as fh:
        return TournamentConfig.from_dict(json.load(fh))


def cmd_tournament(args) -> int:
    config = _load_tournament_config(args)
    out_dir = Path(args.out)
    if (out_dir / "traces.jsonl").exists():
        print(f"error: {out_dir} already holds a run; pick a fresh directory", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    traces = run_tournament(config)
    elapsed = time.time() - started
    write_traces(traces, out_dir / "traces.jsonl")
    meta = config.to_dict()
    meta["config_hash"] = config.config_hash()
    with open(out_dir / "config.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    aborted = sum(1 for t in traces if t.aborted is not None)
    print(
        f"{len(traces)} games ({aborted} aborted) in {elapsed:.1f}s -> "
        f"{out_dir / 'traces.jsonl'} [config {config.config_hash()}]"
    )
    return 0


def cmd_metrics(args) -> int:
    run_dir = Path(args.run)
    config = _run_dir_config(run_dir)
    traces = read_traces(run_dir / "traces.jsonl")
    base = 2.0 if args.unit == "bits" else math.e
    report = build_report(
        traces,
        config.pool,
        base=base,
        ci_formula_count=args.ci_formulas,
        ci_seed=args.ci_seed,
        config_hash=config.config_hash(),
    )
    out = Path(args.out)
    report.to_csv(out)
    sidecar = {
        "entropy_unit": report.entropy_unit,
        "config_hash": report.config_hash,
        "ci_formula_count": report.ci_formula_count,
        "ci_seed": report.ci_seed,
        "games": report.games,
    }
    with open(out.with_suffix(".meta.json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"report for {report.games} games -> {out} ({report.entropy_unit})")
    return 0


def cmd_regress(args) -> int:
    run_dir = Path(args.run)
    config = _run_dir_config(run_dir)
    traces = read_traces(run_dir / "traces.jsonl")
    with open(args.ratings) as fh:
        ratings = {str(k): float(v) for k, v in json.load(fh).items()}
    report = build_report(
        traces,
        config.pool,
        ci_formula_count=args.ci_formulas,
        ci_seed=args.ci_seed,
        config_hash=config.config_hash(),
    )
    analysis = analyze_cohorts(report, ratings, alpha=args.alpha)
    payload = {
        "alpha": analysis.alpha,
        "family_size": analysis.family_size,
        "bonferroni_alpha": analysis.bonferroni_alpha,
        "cohorts": [
            {
                "cohort": c.cohort,
                "agents": c.agent_names,
                "linear": [dataclasses.asdict(r) for r in c.linear],
                "coupling_parabola": dataclasses.asdict(c.coupling_parabola),
            }
            for c in analysis.cohorts
        ],
    }
    def _clean(obj):
        if isinstance(obj, float) and math.isnan(obj):
            return None
        if isinstance(obj, dict):
            return {k: _clean(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [_clean(v) for v in obj]
        return obj

    out = Path(args.out)
    write_analysis_csv(analysis, out)
    with open(out.with_suffix(".json"), "w") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    n_sig = sum(
        1
        for c in analysis.cohorts
        for r in c.linear
        if r.applicable and r.p_value < analysis.bonferroni_alpha
    )
    print(
        f"{analysis.family_size} planned fits, {n_sig} significant at "
        f"bonferroni alpha {analysis.bonferroni_alpha:.5f} -> {out}"
    )
    return 0


def cmd_replay(args) -> int:
    run_dir = Path(args.run)
    config = _run_dir_config(run_dir)
    traces = read_traces(run_dir / "traces.jsonl")
    for trace in traces:
        try:
            replay_trace(trace, config.engine_config())
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    print(f"replayed {len(traces)} traces: all consistent")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .expserver import create_app

    pool = tuple(load_pool(args.pool)) if args.pool else DEFAULT_POOL
    app = create_app(args.log, pool=pool, seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hanabench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tournament", help="run every pairing of a bot pool")
    p.add_argument("--out", required=True, help="run directory to create")
    p.add_argument("--games", type=int, default=125, help="games per pairing")
    p.add_argument("--seed", type=int, default=20260801, help="base deck seed")
    p.add_argument("--pool", help="JSON pool file (default: built-in 8-bot pool)")
    p.add_argument("--processes", type=int, default=None)
    p.add_argument("--no-counting", action="store_true", help="label with hint-only knowledge")
    p.add_argument("--allow-discard-at-max-tokens", action="store_true")
    p.add_argument("--allow-empty-hints", action="store_true")
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("metrics", help="behavioral metric report from a run")
    p.add_argument("--run", required=True, help="tournament run directory")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--unit", choices=("nats", "bits"), default="nats")
    p.add_argument("--ci-formulas", type=int, default=500)
    p.add_argument("--ci-seed", type=int, default=0)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("regress", help="regress teamwork ratings on metrics")
    p.add_argument("--run", required=True, help="tournament run directory")
    p.add_argument("--ratings", required=True, help="JSON {behavior name: rating}")
    p.add_argument("--out", required=True, help="CSV output path (JSON sidecar alongside)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ci-formulas", type=int, default=500)
    p.add_argument("--ci-seed", type=int, default=0)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("replay", help="re-verify every trace in a run")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="start the human-experiment HTTP service")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--pool", help="JSON pool file (default: built-in 8-bot pool)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
