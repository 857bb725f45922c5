"""Multi-run experiment harness: splits, per-method runs, statistics, files.

Run ``r`` of every method uses seed ``base + r`` for its split, its search
and its training, so methods are compared on identical (paired) splits.
Tuned methods hold out part of the training split for the validation
fitness; the model reported for them is the best genome's validated model
(trained on the fit part), scored on the full training split and on the
test split.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import _kernels
from . import anpso, baselines, pso, tuner
from ._optim import write_trace_csv
from .anfis import HYBRID, TrainConfig, train
from .data import Dataset, SplitSpec, load_bupa, load_csv, normalize, split
from .fis import predict
from .metrics import r_value, rmse

log = logging.getLogger(__name__)

ANFIS = "ANFIS"
PSO_ANFIS = "PSO-ANFIS"
DE_ANFIS = "DE-ANFIS"
GA_ANFIS = "GA-ANFIS"
HS_ANFIS = "HS-ANFIS"
ANPSO_ANFIS = "ANPSO-ANFIS"
METHODS = (ANFIS, PSO_ANFIS, DE_ANFIS, GA_ANFIS, HS_ANFIS, ANPSO_ANFIS)
_BASELINE_OF = {DE_ANFIS: baselines.DE, GA_ANFIS: baselines.GA, HS_ANFIS: baselines.HS}

OUTPUT_ENV = "ANPSO_FIS_OUTPUT"


@dataclass
class ExperimentConfig:
    dataset: str | None = None  # None: bundled BUPA
    train_fraction: float = 0.7
    val_fraction: float = 0.25
    methods: list[str] = field(default_factory=lambda: [ANFIS])
    runs: int = 30
    max_evals: int = 5000
    seed: int = 0
    output_dir: str = "results"
    epochs: int = 100
    fitness_epochs: int = 10
    learning_rate: float = 0.01
    train_mode: str = HYBRID
    order: int = 1
    n_particles: int = 30
    population: int = 20
    # ANPSO meta level
    retune_period: int = 10
    ea_generations: int = 100
    probe_iters: int = 10
    ea_variant: str = "v1"
    budget_factor: float = 1.0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.methods:
            raise ValueError("methods must not be empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")
        if self.max_evals < self.n_particles:
            raise ValueError("max_evals must cover one swarm evaluation")
        SplitSpec(self.train_fraction, self.seed)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return asdict(self)

    def meta(self, seed: int) -> anpso.MetaConfig:
        return anpso.MetaConfig(
            retune_period=self.retune_period,
            ea_generations=self.ea_generations,
            ea_variant=self.ea_variant,
            probe_iters=self.probe_iters,
            budget_factor=self.budget_factor,
            seed=seed,
        )


@dataclass
class RunResult:
    method: str
    run: int
    seed: int
    train_rmse: float = float("nan")
    test_rmse: float = float("nan")
    train_r: float = float("nan")
    test_r: float = float("nan")
    n_evals: int = 0
    meta_evals: int = 0
    error: str = ""
    genome: np.ndarray | None = field(default=None, repr=False)
    model: object = field(default=None, repr=False)
    trace: np.ndarray | None = field(default=None, repr=False)
    trace_header: tuple = ("iteration", "best_value")
    meta_trace: anpso.MetaTrace | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class StatRow:
    method: str
    partition: str
    metric: str
    max: float
    min: float
    average: float
    n_runs: int
    n_failed: int


@dataclass
class TrialStats:
    rows: list[StatRow]

    def get(self, method: str, partition: str, metric: str = "rmse") -> StatRow:
        for row in self.rows:
            if (row.method, row.partition, row.metric) == (method, partition, metric):
                return row
        raise KeyError((method, partition, metric))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["method", "partition", "metric", "max", "min", "average", "n_runs", "n_failed"])
            for r in self.rows:
                writer.writerow(
                    [r.method, r.partition, r.metric, _fmt(r.max), _fmt(r.min), _fmt(r.average), r.n_runs, r.n_failed]
                )

    def table(self) -> str:
        """Aligned text: one line per method, max/min/average per column group."""
        header = ["method"]
        groups = [("train", "rmse"), ("test", "rmse"), ("train", "r_value"), ("test", "r_value")]
        for part, metric in groups:
            label = f"{part} {'RMSE' if metric == 'rmse' else 'R'}"
            header += [f"{label} max", f"{label} min", f"{label} avg"]
        body = []
        for method in dict.fromkeys(r.method for r in self.rows):
            line = [method]
            for part, metric in groups:
                row = self.get(method, part, metric)
                line += [f"{v:.4f}" for v in (row.max, row.min, row.average)]
            body.append(line)
        widths = [max(len(str(c)) for c in col) for col in zip(header, *body)]
        out = ["  ".join(c.ljust(w) for c, w in zip(header, widths))]
        out.append("  ".join("-" * w for w in widths))
        out += ["  ".join(c.ljust(w) for c, w in zip(line, widths)) for line in body]
        return "\n".join(out) + "\n"


def _fmt(v: float) -> str:
    return repr(float(v))


def summarize(values) -> tuple[float, float, float]:
    """(max, min, average) of a non-empty sequence."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan"), float("nan")
    return float(arr.max()), float(arr.min()), float(arr.mean())


def compute_stats(results: list[RunResult]) -> TrialStats:
    rows = []
    for method in dict.fromkeys(r.method for r in results):
        mine = [r for r in results if r.method == method]
        good = [r for r in mine if r.ok]
        for part in ("train", "test"):
            for metric, attr in (("rmse", f"{part}_rmse"), ("r_value", f"{part}_r")):
                mx, mn, avg = summarize([getattr(r, attr) for r in good])
                rows.append(StatRow(method, part, metric, mx, mn, avg, len(good), len(mine) - len(good)))
    return TrialStats(rows)


def load_dataset(path: str | None) -> Dataset:
    return load_bupa() if path is None else load_csv(path)


def _score(model, train_data: Dataset, test_data: Dataset, result: RunResult) -> None:
    with np.errstate(all="ignore"):
        p_tr = predict(model, train_data.features)
        p_te = predict(model, test_data.features)
    result.train_rmse = rmse(p_tr, train_data.targets)
    result.test_rmse = rmse(p_te, test_data.targets)
    result.train_r = float(r_value(p_tr, train_data.targets))
    result.test_r = float(r_value(p_te, test_data.targets))
    result.model = model


def _final_train(genome, cfg: ExperimentConfig, train_data: Dataset, seed: int):
    model = tuner.init_consequents(
        tuner.decode(genome, train_data.n_features, order=cfg.order), train_data.targets
    )
    tcfg = TrainConfig(epochs=cfg.epochs, learning_rate=cfg.learning_rate, mode=cfg.train_mode, seed=seed)
    return train(model, train_data, tcfg)


def search(method: str, cfg: ExperimentConfig, objective, seed: int, n_inputs: int):
    """Run one optimizer over the genome box; the default genome is seeded."""
    bounds = tuner.genome_bounds()
    start = tuner.default_genome(n_inputs)[None]
    if method in (PSO_ANFIS, ANPSO_ANFIS):
        iters = (cfg.max_evals - cfg.n_particles) // cfg.n_particles
        scfg = pso.SwarmConfig(
            dims=tuner.GENOME_LENGTH, bounds=bounds, n_particles=cfg.n_particles, max_iters=iters, seed=seed
        )
        if method == PSO_ANFIS:
            return pso.optimize(scfg, objective, seed_points=start)
        return anpso.optimize_adaptive(scfg, cfg.meta(seed), objective, seed_points=start)
    bcfg = baselines.BaselineConfig(
        method=_BASELINE_OF[method], population=cfg.population, max_evals=cfg.max_evals, seed=seed
    )
    return baselines.optimize(bcfg, objective, bounds, seed_points=start)


def run_method(method: str, cfg: ExperimentConfig, data: Dataset, run: int) -> RunResult:
    seed = cfg.seed + run
    result = RunResult(method=method, run=run, seed=seed)
    train_data, test_data = split(data, SplitSpec(cfg.train_fraction, seed))
    if method == ANFIS:
        genome = tuner.default_genome(data.n_features)
        trace = _final_train(genome, cfg, train_data, seed)
        result.trace = trace.rmse
        result.trace_header = ("epoch", "train_rmse")
    else:
        fit_data, val_data = split(train_data, SplitSpec(1.0 - cfg.val_fraction, seed))
        fcfg = TrainConfig(
            epochs=cfg.fitness_epochs, learning_rate=cfg.learning_rate, mode=cfg.train_mode, seed=seed
        )
        objective = tuner.FitnessObjective(fit_data, val_data, fcfg, order=cfg.order)
        found = search(method, cfg, objective, seed, data.n_features)
        genome = found.x
        result.n_evals = found.n_evals
        result.trace = found.trace
        if isinstance(found, anpso.AdaptiveResult):
            result.meta_trace = found.meta_trace
            result.meta_evals = found.meta_trace.meta_evals
        # the validated model itself: fitness is deterministic, so this
        # reproduces the evaluation that made the genome best
        report = tuner.fitness(genome, fit_data, val_data, fcfg, order=cfg.order)
        if report.diverged:
            result.error = "training diverged"
            return result
        _score(report.model, train_data, test_data, result)
        result.genome = np.asarray(genome)
        return result
    result.genome = np.asarray(genome)
    if trace.diverged:
        result.error = "training diverged"
        return result
    _score(trace.model, train_data, test_data, result)
    return result


def _write_run(result: RunResult, root: Path, feature_names) -> None:
    d = root / "runs" / result.method / str(result.run)
    d.mkdir(parents=True, exist_ok=True)
    if result.trace is not None:
        write_trace_csv(result.trace, d / "trace.csv", header=result.trace_header)
    if result.meta_trace is not None:
        result.meta_trace.to_csv(d / "meta_trace.csv")
    if result.model is not None:
        model = result.model
        if feature_names:
            model.input_names = tuple(feature_names)
        doc = tuner.model_document(model, genome=result.genome)
        (d / "model.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_runs_csv(results: list[RunResult], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["method", "run", "seed", "train_rmse", "test_rmse", "train_r", "test_r", "n_evals", "meta_evals", "error"]
        )
        for r in results:
            writer.writerow(
                [r.method, r.run, r.seed, _fmt(r.train_rmse), _fmt(r.test_rmse), _fmt(r.train_r),
                 _fmt(r.test_r), r.n_evals, r.meta_evals, r.error]
            )


def versions() -> dict:
    import numba

    return {
        "anpso_fis": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
        "kernel_backend": _kernels.BACKEND,
    }


def manifest(cfg: ExperimentConfig, command: str, extra: dict | None = None) -> dict:
    doc = {
        "command": command,
        "config": cfg.to_dict(),
        "versions": versions(),
        "protocol": {
            "normalization": "min-max over the whole dataset, before splitting",
            "seeds": "run r uses seed base + r for split, search and training (paired across methods)",
            "fitness": "validation RMSE after training on the rest of the training split",
            "final_model": "plain ANFIS: trained on the full training split; tuned methods: the best genome's validated model",
            "baselines": {m: asdict(baselines.BaselineConfig(method=m)) for m in baselines.METHODS},
        },
    }
    if extra:
        doc.update(extra)
    return doc


def resolve_output(path: str | os.PathLike) -> Path:
    """``$ANPSO_FIS_OUTPUT`` overrides any configured output directory."""
    return Path(os.environ.get(OUTPUT_ENV) or path)


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> tuple[TrialStats, list[RunResult]]:
    """Every method for every run; failed runs are logged and left out of
    the statistics (their count is reported in each stats row)."""
    data = normalize(load_dataset(cfg.dataset))
    results = []
    for method in cfg.methods:
        for run in range(cfg.runs):
            try:
                res = run_method(method, cfg, data, run)
            except Exception as exc:  # noqa: BLE001 - recorded, excluded from stats
                res = RunResult(method=method, run=run, seed=cfg.seed + run, error=f"{type(exc).__name__}: {exc}")
            if not res.ok:
                log.warning("%s run %d failed: %s", method, run, res.error)
            results.append(res)
    stats = compute_stats(results)
    if write:
        root = resolve_output(cfg.output_dir)
        root.mkdir(parents=True, exist_ok=True)
        for res in results:
            _write_run(res, root, data.feature_names)
        stats.to_csv(root / "stats.csv")
        (root / "stats.txt").write_text(stats.table())
        _write_runs_csv(results, root / "runs.csv")
        write_json(root / "manifest.json", manifest(cfg, "run"))
    return stats, results
