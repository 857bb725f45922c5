"""Takagi-Sugeno inference: membership functions, rule firing, defuzzification.

The model keeps its parameters in packed numpy arrays so batch evaluation
goes straight to the kernels in :mod:`anpso_fis._kernels`; the
:class:`MembershipFunction` / :class:`Rule` objects are a readable view used
for construction, inspection and serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as K

KIND_NAMES = {K.TRIANGLE: "triangle", K.GAUSSIAN: "gaussian", K.TRAPEZOID: "trapezoid"}
KIND_CODES = {v: k for k, v in KIND_NAMES.items()}
N_PARAMS = {K.TRIANGLE: 3, K.GAUSSIAN: 2, K.TRAPEZOID: 4}
MIN_SIGMA = 1e-4
_N_PARAMS_BY_CODE = np.array([N_PARAMS[c] for c in range(3)], dtype=np.int64)


class FISError(ValueError):
    """Structurally invalid fuzzy model."""


@dataclass(frozen=True)
class MembershipFunction:
    """One fuzzy set on one input.

    ``params`` are ``(a, b, c)`` for a triangle, ``(center, sigma)`` for a
    gaussian and ``(a, b, c, d)`` for a trapezoid.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise FISError(f"unknown membership kind {self.kind!r}")
        code = KIND_CODES[self.kind]
        params = tuple(float(p) for p in self.params)
        if len(params) != N_PARAMS[code]:
            raise FISError(
                f"{self.kind} takes {N_PARAMS[code]} parameters, got {len(params)}"
            )
        if code == K.GAUSSIAN:
            if not params[1] > 0.0:
                raise FISError("gaussian width must be positive")
        elif any(p > q for p, q in zip(params, params[1:])):
            raise FISError(f"{self.kind} parameters must be non-decreasing: {params}")
        object.__setattr__(self, "params", params)

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]

    @classmethod
    def triangle(cls, a, b, c):
        return cls("triangle", (a, b, c))

    @classmethod
    def gaussian(cls, center, sigma):
        return cls("gaussian", (center, sigma))

    @classmethod
    def trapezoid(cls, a, b, c, d):
        return cls("trapezoid", (a, b, c, d))


@dataclass(frozen=True)
class Rule:
    """Antecedent MF index per input plus a linear consequent ``(p_1..p_k, r)``."""

    antecedent: tuple[int, ...]
    consequent: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(int(a) for a in self.antecedent))
        object.__setattr__(self, "consequent", tuple(float(c) for c in self.consequent))
        if len(self.consequent) != len(self.antecedent) + 1:
            raise FISError("consequent needs one coefficient per input plus a bias")


def mf_eval(mf: MembershipFunction, x):
    """Membership degree of ``x`` (scalar or array) in ``mf``; always in [0, 1]."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    kinds = np.array([[mf.code]], dtype=np.int64)
    params = np.zeros((1, 1, 4))
    params[0, 0, : len(mf.params)] = mf.params
    mu = K.membership(xs.reshape(-1, 1), kinds, params, np.ones(1, dtype=np.int64))
    out = mu[:, 0, 0].reshape(xs.shape)
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(eq=False)
class FISModel:
    """First-order (or zeroth-order) Sugeno model in packed form.

    kinds : int array (n_inputs, max_mf)
    params : float array (n_inputs, max_mf, 4)
    n_mf : int array (n_inputs,)
    antecedents : int array (n_rules, n_inputs)
    consequents : float array (n_rules, n_inputs + 1), bias in the last column
    order : 1 for linear consequents, 0 for constant ones (only the bias is used)
    """

    kinds: np.ndarray
    params: np.ndarray
    n_mf: np.ndarray
    antecedents: np.ndarray
    consequents: np.ndarray
    order: int = 1
    input_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.kinds = np.ascontiguousarray(self.kinds, dtype=np.int64)
        self.params = np.ascontiguousarray(self.params, dtype=np.float64)
        self.n_mf = np.ascontiguousarray(self.n_mf, dtype=np.int64)
        self.antecedents = np.ascontiguousarray(self.antecedents, dtype=np.int64)
        self.consequents = np.ascontiguousarray(self.consequents, dtype=np.float64)
        if self.order not in (0, 1):
            raise FISError("order must be 0 or 1")
        if not self.input_names:
            self.input_names = tuple(f"x{i + 1}" for i in range(self.n_inputs))
        self.validate()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_parts(
        cls,
        inputs: Sequence[Sequence[MembershipFunction]],
        rules: Sequence[Rule],
        order: int = 1,
        input_names: Sequence[str] = (),
    ) -> "FISModel":
        n_in = len(inputs)
        m_max = max((len(mfs) for mfs in inputs), default=0)
        kinds = np.zeros((n_in, max(m_max, 1)), dtype=np.int64)
        params = np.zeros((n_in, max(m_max, 1), 4))
        n_mf = np.array([len(mfs) for mfs in inputs], dtype=np.int64)
        for i, mfs in enumerate(inputs):
            for m, mf in enumerate(mfs):
                kinds[i, m] = mf.code
                params[i, m, : len(mf.params)] = mf.params
        ant = np.array([r.antecedent for r in rules], dtype=np.int64).reshape(len(rules), n_in)
        cons = np.array([r.consequent for r in rules], dtype=np.float64).reshape(
            len(rules), n_in + 1
        )
        return cls(kinds, params, n_mf, ant, cons, order=order, input_names=tuple(input_names))

    def copy(self) -> "FISModel":
        return FISModel(
            self.kinds.copy(),
            self.params.copy(),
            self.n_mf.copy(),
            self.antecedents.copy(),
            self.consequents.copy(),
            order=self.order,
            input_names=self.input_names,
        )

    # -- views ----------------------------------------------------------------

    @property
    def n_inputs(self) -> int:
        return self.kinds.shape[0]

    @property
    def n_rules(self) -> int:
        return self.antecedents.shape[0]

    @property
    def inputs(self) -> list[list[MembershipFunction]]:
        out = []
        for i in range(self.n_inputs):
            mfs = []
            for m in range(self.n_mf[i]):
                code = int(self.kinds[i, m])
                mfs.append(
                    MembershipFunction(KIND_NAMES[code], tuple(self.params[i, m, : N_PARAMS[code]]))
                )
            out.append(mfs)
        return out

    @property
    def rules(self) -> list[Rule]:
        return [
            Rule(tuple(self.antecedents[r]), tuple(self.consequents[r]))
            for r in range(self.n_rules)
        ]

    # -- invariants -----------------------------------------------------------

    def validate(self) -> None:
        n_in = self.n_inputs
        if self.params.shape != self.kinds.shape + (4,):
            raise FISError("params must have shape kinds.shape + (4,)")
        if self.n_mf.shape != (n_in,):
            raise FISError("n_mf must hold one count per input")
        if self.n_rules < 1:
            raise FISError("a model needs at least one rule")
        if np.any(self.n_mf < 1) or np.any(self.n_mf > self.kinds.shape[1]):
            raise FISError("every input needs between 1 and max_mf membership functions")
        if self.antecedents.shape[1] != n_in:
            raise FISError("antecedent length must equal the number of inputs")
        if self.consequents.shape != (self.n_rules, n_in + 1):
            raise FISError("consequents must have shape (n_rules, n_inputs + 1)")
        if np.any(self.antecedents < 0) or np.any(self.antecedents >= self.n_mf[None, :]):
            raise FISError("antecedent refers to a membership function that does not exist")
        for i in range(n_in):
            for m in range(self.n_mf[i]):
                code = int(self.kinds[i, m])
                if code not in N_PARAMS:
                    raise FISError(f"unknown membership kind code {code}")
                p = self.params[i, m, : N_PARAMS[code]]
                if not np.all(np.isfinite(p)):
                    raise FISError("non-finite membership parameter")
                if code == K.GAUSSIAN:
                    if not p[1] > 0.0:
                        raise FISError("gaussian width must be positive")
                elif np.any(np.diff(p) < 0.0):
                    raise FISError("membership parameters out of order")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except FISError:
            return False
        return True

    def repair(self) -> "FISModel":
        """Sort piecewise-linear parameters and floor gaussian widths, in place."""
        tri = self.kinds == K.TRIANGLE
        tra = self.kinds == K.TRAPEZOID
        gau = self.kinds == K.GAUSSIAN
        if tri.any():
            self.params[..., :3][tri] = np.sort(self.params[..., :3][tri], axis=-1)
        if tra.any():
            self.params[tra] = np.sort(self.params[tra], axis=-1)
        if gau.any():
            sig = self.params[..., 1]
            sig[gau] = np.maximum(sig[gau], MIN_SIGMA)
        return self

    # -- premise parameter vector (input-major, MF-minor, parameter-minor) --

    def premise_mask(self) -> np.ndarray:
        counts = _N_PARAMS_BY_CODE[np.clip(self.kinds, 0, 2)]
        active = np.arange(self.kinds.shape[1])[None, :] < self.n_mf[:, None]
        return (np.arange(4)[None, None, :] < counts[:, :, None]) & active[:, :, None]

    def premise_vector(self) -> np.ndarray:
        return self.params[self.premise_mask()].copy()

    def set_premise_vector(self, theta) -> None:
        self.params[self.premise_mask()] = np.asarray(theta, dtype=np.float64)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "order": int(self.order),
            "inputs": [
                {
                    "name": name,
                    "mfs": [{"kind": mf.kind, "params": list(mf.params)} for mf in mfs],
                }
                for name, mfs in zip(self.input_names, self.inputs)
            ],
            "rules": [
                {"antecedent": list(r.antecedent), "consequent": list(r.consequent)}
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FISModel":
        inputs = [
            [MembershipFunction(mf["kind"], tuple(mf["params"])) for mf in spec["mfs"]]
            for spec in doc["inputs"]
        ]
        rules = [Rule(tuple(r["antecedent"]), tuple(r["consequent"])) for r in doc["rules"]]
        names = tuple(spec.get("name", f"x{i + 1}") for i, spec in enumerate(doc["inputs"]))
        return cls.from_parts(inputs, rules, order=int(doc.get("order", 1)), input_names=names)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "FISModel":
        return cls.from_dict(json.loads(text))


class Firing(NamedTuple):
    raw: np.ndarray
    normalized: np.ndarray
    fallback: np.ndarray | bool


class Forward(NamedTuple):
    """All intermediate layer outputs for a batch ``X`` of shape (n, I)."""

    mu: np.ndarray  # (n, I, M) layer 1
    w: np.ndarray  # (n, R) layer 2
    wbar: np.ndarray  # (n, R) layer 3
    f: np.ndarray  # (n, R) rule outputs
    y: np.ndarray  # (n,) layer 5
    fallback: np.ndarray  # (n,) bool, total firing was zero


def _as_batch(model: FISModel, x) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.ascontiguousarray(X.reshape(1, -1) if single else X)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise FISError(f"expected {model.n_inputs} inputs, got shape {np.shape(x)}")
    return X, single


def normalize_firing(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    total = w.sum(axis=1)
    fallback = ~(total > 0.0) | ~np.isfinite(total)
    safe = np.where(fallback, 1.0, total)
    wbar = w / safe[:, None]
    if fallback.any():
        wbar[fallback] = 1.0 / w.shape[1]
    return wbar, fallback


def rule_outputs(model: FISModel, X: np.ndarray) -> np.ndarray:
    if model.order == 0:
        return np.broadcast_to(model.consequents[:, -1], (X.shape[0], model.n_rules)).copy()
    return X @ model.consequents[:, :-1].T + model.consequents[:, -1]


def forward(model: FISModel, X: np.ndarray, mu: np.ndarray | None = None) -> Forward:
    if mu is None:
        mu = K.membership(X, model.kinds, model.params, model.n_mf)
    w = K.firing(mu, model.antecedents)
    wbar, fallback = normalize_firing(w)
    f = rule_outputs(model, X)
    y = np.einsum("nr,nr->n", wbar, f)
    return Forward(mu, w, wbar, f, y, fallback)


def fire_rules(model: FISModel, x) -> Firing:
    """Raw and normalized firing strengths for one input vector or a batch.

    When every rule has zero strength the normalized weights fall back to a
    uniform ``1/R`` and ``fallback`` is set.
    """
    X, single = _as_batch(model, x)
    mu = K.membership(X, model.kinds, model.params, model.n_mf)
    w = K.firing(mu, model.antecedents)
    wbar, fallback = normalize_firing(w)
    if single:
        return Firing(w[0], wbar[0], bool(fallback[0]))
    return Firing(w, wbar, fallback)


def infer(model: FISModel, x):
    """Crisp output ``sum_i wbar_i * (p_i . x + r_i)``; float for one vector, array for a batch."""
    X, single = _as_batch(model, x)
    y = forward(model, X).y
    return float(y[0]) if single else y


def predict(model: FISModel, X) -> np.ndarray:
    X, _ = _as_batch(model, X)
    return forward(model, X).y
