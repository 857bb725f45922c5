"""Real-vector encoding of FIS structure, and the training-based fitness.

Genome layout (133 genes, every gene in [0, 1])::

    [0]        rule count            -> 1..10
    [1:7]      MF count per input    -> 1..5
    [7:13]     MF kind per input     -> triangle | gaussian | trapezoid
    [13:73]    MF shape (center, width) for 6 inputs x 5 MFs
    [73:133]   rule antecedents, 10 rules x 6 inputs -> MF index

Integer and categorical genes use ``min(floor(g * K), K - 1)``. Genes that
the decoded structure does not use (extra rules, extra MFs, extra inputs)
have no effect on the model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .anfis import TrainConfig, train
from .data import Dataset
from .fis import KIND_NAMES, FISModel, MembershipFunction, Rule, predict

MAX_RULES = 10
MAX_MF = 5
MAX_INPUTS = 6
N_KINDS = 3
KIND_ORDER = (K.TRIANGLE, K.GAUSSIAN, K.TRAPEZOID)

RULES_GENE = 0
MF_COUNT = slice(1, 1 + MAX_INPUTS)
MF_KIND = slice(7, 7 + MAX_INPUTS)
SHAPE = slice(13, 13 + MAX_INPUTS * MAX_MF * 2)
ANTECEDENT = slice(73, 73 + MAX_RULES * MAX_INPUTS)
GENOME_LENGTH = 1 + MAX_INPUTS + MAX_INPUTS + MAX_INPUTS * MAX_MF * 2 + MAX_RULES * MAX_INPUTS
PENALTY = 1e6
MIN_GAUSS_SIGMA = 1e-3


def _level(g, k):
    return np.minimum(np.floor(g * k).astype(np.int64), k - 1)


def genome_bounds() -> np.ndarray:
    return np.tile([0.0, 1.0], (GENOME_LENGTH, 1))


def mf_from_shape(kind: int, center: float, width: float) -> np.ndarray:
    """Four padded MF parameters for a (center, width) shape code."""
    if kind == K.TRIANGLE:
        return np.array([center - width, center, center + width, 0.0])
    if kind == K.GAUSSIAN:
        return np.array([center, max(0.5 * width, MIN_GAUSS_SIGMA), 0.0, 0.0])
    half = 0.5 * width
    return np.array([center - width, center - half, center + half, center + width])


def decode(genome, n_inputs: int = MAX_INPUTS, order: int = 1) -> FISModel:
    """Build a valid :class:`FISModel` from any real vector of the right length.

    Out-of-range genes are clamped to [0, 1] first, so decoding is total.
    """
    g = np.asarray(genome, dtype=np.float64)
    if g.shape != (GENOME_LENGTH,):
        raise ValueError(f"genome must have {GENOME_LENGTH} genes, got shape {g.shape}")
    if not 1 <= n_inputs <= MAX_INPUTS:
        raise ValueError(f"n_inputs must be in 1..{MAX_INPUTS}")
    g = np.clip(np.nan_to_num(g, nan=0.0), 0.0, 1.0)
    n_rules = int(_level(g[RULES_GENE], MAX_RULES)) + 1
    n_mf = _level(g[MF_COUNT], MAX_MF)[:n_inputs] + 1
    kinds_per_input = np.array(KIND_ORDER)[_level(g[MF_KIND], N_KINDS)][:n_inputs]
    shapes = g[SHAPE].reshape(MAX_INPUTS, MAX_MF, 2)
    kinds = np.zeros((n_inputs, MAX_MF), dtype=np.int64)
    params = np.zeros((n_inputs, MAX_MF, 4))
    for i in range(n_inputs):
        kinds[i, :] = kinds_per_input[i]
        for m in range(n_mf[i]):
            params[i, m] = mf_from_shape(int(kinds_per_input[i]), *shapes[i, m])
    ant_genes = g[ANTECEDENT].reshape(MAX_RULES, MAX_INPUTS)[:n_rules, :n_inputs]
    antecedents = _level(ant_genes, MAX_MF) % n_mf[None, :]
    consequents = np.zeros((n_rules, n_inputs + 1))
    model = FISModel(kinds, params, n_mf, antecedents, consequents, order=order)
    return model.repair()


def encode_structure(
    n_rules: int,
    n_mf,
    kinds,
    shapes,
    antecedents,
) -> np.ndarray:
    """Inverse of :func:`decode` for a structure expressed in decoded terms.

    ``kinds`` holds one kind code per input, ``shapes`` is ``(I, M, 2)``
    (center, width) and ``antecedents`` is ``(n_rules, I)``. Each discrete
    gene is placed at the midpoint of its decoding bin.
    """
    g = np.zeros(GENOME_LENGTH)
    n_in = len(n_mf)
    g[RULES_GENE] = (n_rules - 0.5) / MAX_RULES
    g[MF_COUNT][:n_in] = (np.asarray(n_mf) - 0.5) / MAX_MF
    g[MF_COUNT][n_in:] = 0.5 / MAX_MF
    kind_idx = [KIND_ORDER.index(int(k)) for k in kinds]
    g[MF_KIND][:n_in] = (np.asarray(kind_idx) + 0.5) / N_KINDS
    block = np.zeros((MAX_INPUTS, MAX_MF, 2))
    shapes = np.asarray(shapes, dtype=np.float64)
    block[:n_in, : shapes.shape[1]] = shapes
    g[SHAPE] = np.clip(block.reshape(-1), 0.0, 1.0)
    ant = np.zeros((MAX_RULES, MAX_INPUTS))
    ant[:n_rules, :n_in] = (np.asarray(antecedents) + 0.5) / MAX_MF
    g[ANTECEDENT] = ant.reshape(-1)
    return g


DEFAULT_WIDTH = 0.6


def default_genome(n_inputs: int = MAX_INPUTS) -> np.ndarray:
    """The unoptimized starting structure.

    Two gaussian sets per input ("low" centred at 0, "high" at 1) and two
    rules: all inputs low, all inputs high. It is the plain ANFIS of the
    experiments and is seeded into every search.
    """
    shapes = np.zeros((n_inputs, 2, 2))
    shapes[:, 0] = (0.0, DEFAULT_WIDTH)
    shapes[:, 1] = (1.0, DEFAULT_WIDTH)
    antecedents = np.array([[0] * n_inputs, [1] * n_inputs])
    return encode_structure(2, [2] * n_inputs, [K.GAUSSIAN] * n_inputs, shapes, antecedents)


def default_model(n_inputs: int = MAX_INPUTS, order: int = 1) -> FISModel:
    return decode(default_genome(n_inputs), n_inputs, order=order)


@dataclass
class FitnessReport:
    genome: np.ndarray
    summary: dict
    train_rmse: float
    val_rmse: float
    epochs: int
    diverged: bool = False
    model: FISModel | None = field(default=None, repr=False)

    @property
    def value(self) -> float:
        if self.diverged or not np.isfinite(self.val_rmse):
            return PENALTY
        return min(self.val_rmse, PENALTY)


def summarize(model: FISModel) -> dict:
    return {
        "n_rules": model.n_rules,
        "n_mf": model.n_mf.tolist(),
        "kinds": [KIND_NAMES[int(model.kinds[i, 0])] for i in range(model.n_inputs)],
    }


def init_consequents(model: FISModel, targets) -> FISModel:
    """Zero slopes and the target mean as every rule's bias."""
    model.consequents[:] = 0.0
    model.consequents[:, -1] = float(np.mean(targets))
    return model


def fitness(
    genome,
    train_data: Dataset,
    val_data: Dataset,
    train_cfg: TrainConfig = TrainConfig(),
    order: int = 1,
) -> FitnessReport:
    """Decode, train on ``train_data`` and score on ``val_data``.

    The objective is the validation RMSE; a diverged or non-finite run
    scores :data:`PENALTY`.
    """
    g = np.asarray(genome, dtype=np.float64)
    model = init_consequents(decode(g, train_data.n_features, order=order), train_data.targets)
    with np.errstate(all="ignore"):
        trace = train(model, train_data, train_cfg)
        pred = predict(trace.model, val_data.features)
        val = float(np.sqrt(np.mean((pred - val_data.targets) ** 2)))
    diverged = trace.diverged or not np.isfinite(val)
    return FitnessReport(
        genome=g.copy(),
        summary=summarize(trace.model),
        train_rmse=trace.final_rmse,
        val_rmse=val if np.isfinite(val) else float("inf"),
        epochs=len(trace.rmse),
        diverged=diverged,
        model=trace.model,
    )


class FitnessObjective:
    """Callable ``genome -> validation RMSE`` that counts evaluations and
    remembers the best report seen."""

    def __init__(self, train_data: Dataset, val_data: Dataset, train_cfg: TrainConfig, order: int = 1):
        self.train_data = train_data
        self.val_data = val_data
        self.train_cfg = train_cfg
        self.order = order
        self.n_evals = 0
        self.n_penalized = 0
        self.best: FitnessReport | None = None

    def __call__(self, genome) -> float:
        report = fitness(genome, self.train_data, self.val_data, self.train_cfg, self.order)
        self.n_evals += 1
        if report.value >= PENALTY:
            self.n_penalized += 1
        if self.best is None or report.value < self.best.value:
            self.best = report
        return report.value


def describe(model: FISModel, feature_names=None, precision: int = 3) -> str:
    """Human-readable rule base: one IF-THEN line per rule plus MF listing."""
    names = list(feature_names or model.input_names)
    lines = []
    for i, mfs in enumerate(model.inputs):
        parts = []
        for m, mf in enumerate(mfs):
            p = ", ".join(f"{v:.{precision}f}" for v in mf.params)
            parts.append(f"mf{m + 1}={mf.kind}({p})")
        lines.append(f"{names[i]}: " + "  ".join(parts))
    lines.append("")
    for r, rule in enumerate(model.rules, start=1):
        cond = " AND ".join(f"{names[i]} is mf{a + 1}" for i, a in enumerate(rule.antecedent))
        *slopes, bias = rule.consequent
        if model.order == 0:
            out = f"{bias:.{precision}f}"
        else:
            terms = " ".join(f"{s:+.{precision}f}*{names[i]}" for i, s in enumerate(slopes))
            out = f"{terms} {bias:+.{precision}f}"
        lines.append(f"R{r}: IF {cond} THEN y = {out}")
    return "\n".join(lines)


def model_document(model: FISModel, genome=None, report: FitnessReport | None = None) -> dict:
    doc = {"model": model.to_dict()}
    if genome is not None:
        doc["genome"] = [float(v) for v in np.asarray(genome)]
    if report is not None:
        doc["fitness"] = {
            "train_rmse": report.train_rmse,
            "val_rmse": report.val_rmse,
            "epochs": report.epochs,
            "diverged": report.diverged,
        }
    return doc


def load_model_document(text: str) -> FISModel:
    doc = json.loads(text)
    return FISModel.from_dict(doc["model"] if "model" in doc else doc)
