"""Command-line entry point: ``run``, ``tune``, ``describe`` and ``bench``.

Output goes to ``--out`` (default ``results``) unless ``$ANPSO_FIS_OUTPUT``
is set. Every source of randomness is derived from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import bench as bench_mod
from . import experiment as E
from . import tuner
from ._optim import write_trace_csv
from .data import normalize

TUNE_METHODS = {
    "anpso": E.ANPSO_ANFIS,
    "pso": E.PSO_ANFIS,
    "de": E.DE_ANFIS,
    "ga": E.GA_ANFIS,
    "hs": E.HS_ANFIS,
}


def _cmd_run(args) -> int:
    cfg = E.ExperimentConfig.from_json(Path(args.config).read_text())
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    stats, results = E.run_experiment(cfg)
    sys.stdout.write(stats.table())
    failed = sum(not r.ok for r in results)
    if failed:
        print(f"{failed} run(s) failed; see runs.csv")
    print(f"results written to {E.resolve_output(cfg.output_dir)}")
    return 0


def _cmd_tune(args) -> int:
    method = TUNE_METHODS[args.method]
    cfg = E.ExperimentConfig(
        dataset=args.dataset,
        methods=[method],
        runs=1,
        max_evals=args.max_evals,
        seed=args.seed,
        output_dir=args.out or "results",
        fitness_epochs=args.fitness_epochs,
        budget_factor=args.budget_factor,
        probe_iters=args.probe_iters,
    )
    stats, results = E.run_experiment(cfg)
    res = results[0]
    if not res.ok:
        print(f"tuning failed: {res.error}", file=sys.stderr)
        return 1
    print(f"{method}: train RMSE {res.train_rmse:.4f}  test RMSE {res.test_rmse:.4f}  "
          f"R {res.test_r:.4f}  evaluations {res.n_evals} (+{res.meta_evals} meta)")
    names = normalize(E.load_dataset(args.dataset)).feature_names
    print(tuner.describe(res.model, names or None))
    return 0


def _cmd_describe(args) -> int:
    model = tuner.load_model_document(Path(args.model).read_text())
    print(tuner.describe(model, precision=args.precision))
    return 0


def _cmd_bench(args) -> int:
    rows = bench_mod.run_suite(args.suite, seed=args.seed, runs=args.runs)
    root = E.resolve_output(args.out or "results") / "bench" / args.suite
    root.mkdir(parents=True, exist_ok=True)
    bench_mod.write_rows(rows, root / "bench.csv")
    for r in rows:
        d = root / "runs" / r.method / str(r.run)
        d.mkdir(parents=True, exist_ok=True)
        write_trace_csv(r.trace, d / "trace.csv")
    E.write_json(root / "manifest.json", {
        "command": "bench", "suite": args.suite, "seed": args.seed, "runs": args.runs,
        "versions": E.versions(),
    })
    sys.stdout.write(bench_mod.render(rows))
    return 0 if all(r.passed is not False for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anpso-fis", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="multi-run experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None, help="overrides the config's seed")
    run.add_argument("--out", default=None)
    run.set_defaults(func=_cmd_run)

    tune = sub.add_parser("tune", help="one structure search on a dataset")
    tune.add_argument("--method", choices=sorted(TUNE_METHODS), default="anpso")
    tune.add_argument("--dataset", default=None, help="CSV, last column the target (default: bundled BUPA)")
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--max-evals", type=int, default=5000)
    tune.add_argument("--fitness-epochs", type=int, default=10)
    tune.add_argument("--budget-factor", type=float, default=1.0, help="scales the meta EA generations")
    tune.add_argument("--probe-iters", type=int, default=10)
    tune.add_argument("--out", default=None)
    tune.set_defaults(func=_cmd_tune)

    desc = sub.add_parser("describe", help="print a saved model as IF-THEN rules")
    desc.add_argument("--model", required=True)
    desc.add_argument("--precision", type=int, default=3)
    desc.set_defaults(func=_cmd_describe)

    b = sub.add_parser("bench", help="optimizer sanity suite")
    b.add_argument("--suite", choices=sorted(bench_mod.SUITES), required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--runs", type=int, default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
