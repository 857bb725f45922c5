"""BUPA liver-disorders ingestion, min-max scaling and seeded splits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

BUPA_COLUMNS = ("mcv", "alkphos", "sgpt", "sgot", "gammagt", "drinks")
BUPA_TARGET = "selector"


class DataError(ValueError):
    """Raised for malformed input files or impossible splits."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus target vector.

    ``normalization`` holds one ``(min, max)`` row per feature column once
    :func:`normalize` has been applied; ``degenerate`` marks constant columns
    that were mapped to zero.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...] = BUPA_COLUMNS
    normalization: np.ndarray | None = None
    degenerate: tuple[bool, ...] = ()
    indices: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        targets = np.ascontiguousarray(self.targets, dtype=np.float64).reshape(-1)
        if features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if features.shape[0] != targets.shape[0]:
            raise DataError(
                f"{features.shape[0]} feature rows but {targets.shape[0]} targets"
            )
        features.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)
        if len(self.feature_names) != features.shape[1]:
            names = tuple(f"x{i}" for i in range(features.shape[1]))
            object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        base = idx if self.indices is None else self.indices[idx]
        return replace(
            self, features=self.features[idx], targets=self.targets[idx], indices=base
        )

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "features": self.features.tolist(),
            "targets": self.targets.tolist(),
            "normalization": None
            if self.normalization is None
            else self.normalization.tolist(),
            "degenerate": list(self.degenerate),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Dataset":
        norm = doc.get("normalization")
        return cls(
            features=np.asarray(doc["features"], dtype=np.float64),
            targets=np.asarray(doc["targets"], dtype=np.float64),
            feature_names=tuple(doc.get("feature_names", BUPA_COLUMNS)),
            normalization=None if norm is None else np.asarray(norm, dtype=np.float64),
            degenerate=tuple(bool(d) for d in doc.get("degenerate", ())),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError(
                f"train_fraction must lie strictly in (0, 1), got {self.train_fraction}"
            )
        if self.seed < 0:
            raise DataError("seed must be non-negative")


def parse_bupa(raw_text: str, n_fields: int = 7) -> Dataset:
    """Parse comma-separated BUPA records; the last field is the target.

    Blank lines are skipped. Any other line must carry exactly ``n_fields``
    finite numbers, otherwise :class:`DataError` names the offending line.
    """
    rows = []
    for lineno, line in enumerate(raw_text.splitlines(), start=1):
        if not line.strip():
            continue
        tokens = line.split(",")
        if len(tokens) != n_fields:
            raise DataError(
                f"line {lineno}: expected {n_fields} fields, found {len(tokens)}"
            )
        try:
            values = [float(tok) for tok in tokens]
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric token in {line!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise DataError(f"line {lineno}: missing or non-finite value")
        rows.append(values)
    if not rows:
        raise DataError("empty input: no samples found")
    arr = np.asarray(rows, dtype=np.float64)
    names = BUPA_COLUMNS if n_fields == 7 else ()
    return Dataset(features=arr[:, :-1], targets=arr[:, -1], feature_names=names)


def serialize_bupa(ds: Dataset) -> str:
    """Inverse of :func:`parse_bupa` (``repr`` floats, so it round-trips)."""
    lines = []
    for row, t in zip(ds.features, ds.targets):
        lines.append(",".join(repr(float(v)) for v in (*row, t)))
    return "\n".join(lines) + "\n"


def load_bupa(path: str | Path | None = None) -> Dataset:
    """Load BUPA from ``path`` or from the copy bundled with the package."""
    if path is None:
        text = resources.files("anpso_fis.datasets").joinpath("bupa.data").read_text()
    else:
        text = Path(path).read_text()
    return parse_bupa(text)


def load_csv(path: str | Path) -> Dataset:
    """Load any numeric CSV whose last column is the target.

    A first line with a non-numeric token is taken as a header naming the
    features. Seven-column files without a header are read as BUPA.
    """
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty input: no samples found")
    first = lines[0].split(",")
    names: tuple[str, ...] = ()
    try:
        [float(tok) for tok in first]
    except ValueError:
        names = tuple(tok.strip() for tok in first[:-1])
        text = "\n".join(lines[1:])
    ds = parse_bupa(text, n_fields=len(first))
    if names:
        ds = replace(ds, feature_names=names)
    return ds


def normalize(ds: Dataset) -> Dataset:
    """Min-max scale every feature column to [0, 1]; targets are untouched.

    Re-normalizing already scaled data is the identity on the features, and
    the recorded ``(min, max)`` pairs are composed so :func:`denormalize`
    still recovers the raw values.
    """
    lo = ds.features.min(axis=0)
    hi = ds.features.max(axis=0)
    span = hi - lo
    degenerate = span <= 0.0
    safe = np.where(degenerate, 1.0, span)
    scaled = np.where(degenerate, 0.0, (ds.features - lo) / safe)
    np.clip(scaled, 0.0, 1.0, out=scaled)
    pairs = np.column_stack([lo, hi])
    if ds.normalization is not None:
        prev_lo = ds.normalization[:, 0]
        prev_span = ds.normalization[:, 1] - prev_lo
        pairs = np.column_stack([prev_lo + lo * prev_span, prev_lo + hi * prev_span])
        degenerate = degenerate | np.asarray(ds.degenerate or [False] * ds.n_features)
    return replace(
        ds,
        features=scaled,
        normalization=pairs,
        degenerate=tuple(bool(d) for d in degenerate),
    )


def denormalize(ds: Dataset) -> Dataset:
    if ds.normalization is None:
        return ds
    lo = ds.normalization[:, 0]
    span = ds.normalization[:, 1] - lo
    return replace(ds, features=ds.features * span + lo, normalization=None, degenerate=())


def split_indices(n: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise DataError(f"cannot split {n} sample(s) into two non-empty partitions")
    n_train = min(max(int(math.floor(spec.train_fraction * n)), 1), n - 1)
    perm = np.random.default_rng(spec.seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split; train size is ``floor(fraction * n)`` clipped to [1, n-1]."""
    train_idx, test_idx = split_indices(ds.n_samples, spec)
    return ds.subset(train_idx), ds.subset(test_idx)
