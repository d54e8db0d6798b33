"""Dataset container, CSV ingestion, normalization, splits, and synthetic data.

The in-memory convention is samples by features: ``X[i, j]`` is the
expression of gene ``j`` in sample ``i``. Files on disk may be oriented
either way; ingestion transposes as needed.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, CSVParseError, LabelError
from .validation import readonly

ORIENTATIONS = ("genes_by_samples", "samples_by_genes")
NORMALIZATIONS = ("minmax", "zscore")


@dataclass(frozen=True)
class ExpressionDataset:
    """Expression matrix with aligned labels and identifiers.

    X          -- (n_samples, n_features) float64, finite
    labels     -- (n_samples,) int64 class ids in [0, n_classes)
    gene_ids   -- one id per feature column
    sample_ids -- one id per sample row
    class_names-- display name per class id
    """

    X: np.ndarray
    labels: np.ndarray
    gene_ids: tuple[str, ...]
    sample_ids: tuple[str, ...]
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "X", readonly(X))
        object.__setattr__(self, "labels", readonly(labels))
        if X.ndim != 2:
            raise ConfigurationError(f"X must be 2-D, got ndim={X.ndim}")
        n, m = X.shape
        if n < 2 or m < 1:
            raise ConfigurationError(f"need at least 2 samples and 1 feature, got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise CSVParseError("expression matrix contains NaN or Inf entries")
        if labels.shape != (n,):
            raise LabelError(f"labels shape {labels.shape} does not match {n} samples")
        if len(self.gene_ids) != m:
            raise ConfigurationError(f"{len(self.gene_ids)} gene ids for {m} features")
        if len(self.sample_ids) != n:
            raise ConfigurationError(f"{len(self.sample_ids)} sample ids for {n} samples")
        c = int(labels.max()) + 1 if labels.size else 0
        if labels.min(initial=0) < 0:
            raise LabelError("negative class id")
        present = np.unique(labels)
        if c < 2:
            raise LabelError("need at least 2 classes")
        if present.size != c:
            missing = sorted(set(range(c)) - set(present.tolist()))
            raise LabelError(f"class ids {missing} have no samples")
        names = self.class_names or tuple(str(j) for j in range(c))
        if len(names) != c:
            raise LabelError(f"{len(names)} class names for {c} classes")
        object.__setattr__(self, "class_names", tuple(str(s) for s in names))

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class SplitPlan:
    """Protocol for train/test index generation.

    mode="repeated" draws `repetitions` independent shuffled splits with
    `test_fraction` held out; mode="kfold" partitions the data into
    `repetitions` folds and uses each in turn as the test side.
    """

    repetitions: int = 5
    test_fraction: float = 0.2
    seed: int = 0
    stratified: bool = True
    mode: str = "repeated"

    def __post_init__(self):
        if self.mode not in ("repeated", "kfold"):
            raise ConfigurationError(f"unknown split mode {self.mode!r}")
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        if self.mode == "repeated" and not (0.0 < self.test_fraction < 1.0):
            raise ConfigurationError("test_fraction must lie strictly between 0 and 1")


# ---------------------------------------------------------------------------
# CSV ingestion


def _parse_cells(path: str):
    """Read a CSV into a rectangular list of string cells.

    Raises CSVParseError with a 1-based row index on ragged input.
    """
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(c.strip() == "" for c in row):
                continue  # allow blank trailing lines
            rows.append((lineno, [c.strip() for c in row]))
    if not rows:
        raise CSVParseError(f"{path}: empty file")
    width = len(rows[0][1])
    for lineno, row in rows:
        if len(row) != width:
            raise CSVParseError(
                f"{path}: row {lineno}: expected {width} fields, found {len(row)}"
            )
    return rows


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _to_matrix(rows, path: str, col_offset: int = 0) -> np.ndarray:
    """Convert string cells to float64, naming the offending cell on failure.

    Coordinates in errors are 1-based over the raw file grid (row includes
    any header line, column includes any id column); `col_offset` is the
    count of id columns the caller stripped before handing us the cells.
    """
    cells = [row for _, row in rows]
    try:
        M = np.array(cells, dtype=np.float64)
    except ValueError:
        for (lineno, row), _ in zip(rows, range(len(rows))):
            for j, cell in enumerate(row, start=1 + col_offset):
                if not _is_float(cell):
                    raise CSVParseError(
                        f"{path}: non-numeric cell at row {lineno}, col {j}: {cell!r}"
                    ) from None
        raise CSVParseError(f"{path}: could not parse numeric block") from None
    if not np.all(np.isfinite(M)):
        i, j = np.argwhere(~np.isfinite(M))[0]
        lineno = rows[i][0]
        raise CSVParseError(
            f"{path}: non-finite cell at row {lineno}, col {j + 1 + col_offset}: "
            f"{cells[i][j]!r}"
        )
    return M


def _encode_labels(raw: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    cleaned = [s.strip() for s in raw]
    if any(s == "" for s in cleaned):
        raise LabelError("empty label value")
    try:
        ids = [int(s) for s in cleaned]
    except ValueError:
        ids = None
    if ids is not None:
        uniq = sorted(set(ids))
        if uniq == list(range(len(uniq))):
            return np.asarray(ids, dtype=np.int64), tuple(str(u) for u in uniq)
    # fall back to sorted-unique string encoding
    names = tuple(sorted(set(cleaned)))
    index = {name: j for j, name in enumerate(names)}
    return np.asarray([index[s] for s in cleaned], dtype=np.int64), names


def _read_label_file(path: str, n: int) -> tuple[np.ndarray, tuple[str, ...]]:
    if not os.path.exists(path):
        raise LabelError(f"label file not found: {path}")
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() != ""]
    if len(lines) == n + 1 and lines[0].lower() in ("label", "labels", "class"):
        lines = lines[1:]
    if len(lines) != n:
        raise LabelError(f"{path}: {len(lines)} labels for {n} samples")
    return _encode_labels(lines)


def ingest_csv(
    path: str,
    orientation: str = "samples_by_genes",
    label_source: str | None = None,
    has_header: bool | str = "auto",
    has_ids: bool | str = "auto",
) -> ExpressionDataset:
    """Load an expression CSV into the samples-by-features convention.

    orientation
        "genes_by_samples": file rows are genes, columns are samples
        (header row holds sample ids, first column holds gene ids).
        "samples_by_genes": the transpose of that layout.
    label_source
        Either a path to a one-label-per-line file aligned with the
        samples, or the id of a row/column inside the data file to strip
        out and use as labels. Required: every dataset carries labels.
    has_header / has_ids
        True, False, or "auto". Auto sniffs non-numeric cells in the
        first row / first column.
    """
    if orientation not in ORIENTATIONS:
        raise ConfigurationError(f"unknown orientation {orientation!r}")
    if label_source is None:
        raise LabelError("label_source is required: datasets carry labels")
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset not found: {path}")

    rows = _parse_cells(path)
    first = rows[0][1]
    if has_header == "auto":
        has_header = any(not _is_float(c) for c in first[1:])
    body = rows[1:] if has_header else rows
    if not body:
        raise CSVParseError(f"{path}: no data rows")
    if has_ids == "auto":
        has_ids = any(not _is_float(r[0]) for _, r in body)

    row_ids = [r[0] for _, r in body] if has_ids else None
    col_start = 1 if has_ids else 0
    col_ids = first[col_start:] if has_header else None
    data_rows = [(lineno, r[col_start:]) for lineno, r in body]

    label_row = None
    if label_source is not None and not os.path.exists(label_source):
        # strip a labelled row (genes_by_samples) or column (samples_by_genes)
        if orientation == "genes_by_samples":
            if row_ids is None or label_source not in row_ids:
                raise LabelError(
                    f"label source {label_source!r} is neither a file nor a row id"
                )
            at = row_ids.index(label_source)
            label_row = [c for c in data_rows[at][1]]
            del data_rows[at], row_ids[at]
        else:
            if col_ids is None or label_source not in col_ids:
                raise LabelError(
                    f"label source {label_source!r} is neither a file nor a column id"
                )
            at = col_ids.index(label_source)
            label_row = [r[at] for _, r in data_rows]
            col_ids = col_ids[:at] + col_ids[at + 1 :]
            data_rows = [(ln, r[:at] + r[at + 1 :]) for ln, r in data_rows]

    M = _to_matrix(data_rows, path, col_offset=col_start)
    if orientation == "genes_by_samples":
        X = M.T
        gene_ids = row_ids
        sample_ids = col_ids
    else:
        X = M
        gene_ids = col_ids
        sample_ids = row_ids

    n, m = X.shape
    if gene_ids is None:
        gene_ids = [f"gene_{j}" for j in range(m)]
    if sample_ids is None:
        sample_ids = [f"sample_{i}" for i in range(n)]

    if label_row is not None:
        labels, class_names = _encode_labels(label_row)
    else:
        labels, class_names = _read_label_file(label_source, n)

    return ExpressionDataset(
        X=X,
        labels=labels,
        gene_ids=tuple(gene_ids),
        sample_ids=tuple(sample_ids),
        class_names=class_names,
    )


def export_csv(ds: ExpressionDataset, data_path: str, labels_path: str | None = None):
    """Write the dataset back out in samples_by_genes orientation."""
    with open(data_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", *ds.gene_ids])
        for i in range(ds.n_samples):
            w.writerow([ds.sample_ids[i], *(repr(v) for v in ds.X[i].tolist())])
    if labels_path is not None:
        with open(labels_path, "w") as fh:
            for lab in ds.labels.tolist():
                fh.write(f"{ds.class_names[lab]}\n")


# ---------------------------------------------------------------------------
# Normalization


def normalize(ds: ExpressionDataset, mode: str = "minmax") -> ExpressionDataset:
    """Per-feature rescaling; constant features map to all-zero columns.

    minmax: (x - min) / (max - min), range [0, 1]. Idempotent.
    zscore: (x - mean) / population std.
    """
    if mode not in NORMALIZATIONS:
        raise ConfigurationError(f"unknown normalization mode {mode!r}")
    X = ds.X
    if mode == "minmax":
        lo = X.min(axis=0)
        span = X.max(axis=0) - lo
        safe = np.where(span == 0.0, 1.0, span)
        Z = (X - lo) / safe
        Z[:, span == 0.0] = 0.0
    else:
        mu = X.mean(axis=0)
        sd = X.std(axis=0)  # population convention, ddof=0
        safe = np.where(sd == 0.0, 1.0, sd)
        Z = (X - mu) / safe
        Z[:, sd == 0.0] = 0.0
    return ExpressionDataset(
        X=Z,
        labels=ds.labels.copy(),
        gene_ids=ds.gene_ids,
        sample_ids=ds.sample_ids,
        class_names=ds.class_names,
    )


# ---------------------------------------------------------------------------
# Label encoding


def one_hot(labels, n_classes: int) -> np.ndarray:
    """Indicator matrix with one column per sample: Y[c, i] = 1 iff label i == c."""
    y = np.asarray(labels, dtype=np.int64)
    if y.ndim != 1:
        raise LabelError("labels must be 1-D")
    if n_classes < 2:
        raise LabelError("need at least 2 classes")
    if y.size == 0:
        raise LabelError("empty label vector")
    if y.min() < 0 or y.max() >= n_classes:
        bad = int(y[(y < 0) | (y >= n_classes)][0])
        raise LabelError(f"label {bad} outside [0, {n_classes})")
    Y = np.zeros((n_classes, y.shape[0]), dtype=np.float64)
    Y[y, np.arange(y.shape[0])] = 1.0
    return Y


# ---------------------------------------------------------------------------
# Splits


def _stratified_draw(rng, labels: np.ndarray, test_fraction: float):
    test = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if members.size < 2:
            raise ConfigurationError(
                f"class {int(c)} has {members.size} sample(s); stratified splits need >= 2"
            )
        n_test = int(round(test_fraction * members.size))
        n_test = min(max(n_test, 0), members.size - 1)
        perm = rng.permutation(members)
        test.append(perm[:n_test])
    test = np.concatenate(test) if test else np.empty(0, dtype=np.int64)
    if test.size == 0:
        # take one sample from the largest class so the test side is never empty
        counts = np.bincount(labels)
        c = int(np.argmax(counts))
        members = np.flatnonzero(labels == c)
        test = rng.permutation(members)[:1]
    return np.sort(test)


def make_splits(ds: ExpressionDataset, plan: SplitPlan):
    """Generate (train_indices, test_indices) pairs per the plan.

    Deterministic in plan.seed; every pair partitions range(n_samples).
    """
    rng = np.random.default_rng(plan.seed)
    n = ds.n_samples
    labels = ds.labels
    out = []
    if plan.mode == "repeated":
        for _ in range(plan.repetitions):
            if plan.stratified:
                test = _stratified_draw(rng, labels, plan.test_fraction)
            else:
                n_test = int(round(plan.test_fraction * n))
                n_test = min(max(n_test, 1), n - 1)
                test = np.sort(rng.permutation(n)[:n_test])
            mask = np.ones(n, dtype=bool)
            mask[test] = False
            out.append((np.flatnonzero(mask), test))
    else:
        k = plan.repetitions
        if k > n:
            raise ConfigurationError(f"{k} folds for {n} samples")
        fold = np.empty(n, dtype=np.int64)
        if plan.stratified:
            for c in np.unique(labels):
                members = rng.permutation(np.flatnonzero(labels == c))
                fold[members] = np.arange(members.size) % k
        else:
            fold[rng.permutation(n)] = np.arange(n) % k
        for f in range(k):
            test = np.flatnonzero(fold == f)
            train = np.flatnonzero(fold != f)
            if test.size == 0 or train.size == 0:
                raise ConfigurationError("empty fold; reduce the fold count")
            out.append((train, test))
    return out


# ---------------------------------------------------------------------------
# Synthetic benchmark data


def synth_outliers(
    n_per_class: int = 80,
    dims: int = 20,
    n_outliers: int = 2,
    separation: float = 6.0,
    seed: int = 0,
) -> ExpressionDataset:
    """Two unit-spread Gaussian clusters plus far-away contaminating points.

    Cluster means sit `separation` apart along the first axis. The
    cluster spread is the RMS radius sqrt(dims) of a unit Gaussian; each
    outlier lands beyond five spreads from both means, at a radius that
    grows with its index, and outlier labels alternate between the two
    classes.
    """
    if n_per_class < 10:
        raise ConfigurationError("n_per_class must be >= 10")
    if dims < 2:
        raise ConfigurationError("dims must be >= 2")
    if n_outliers < 0:
        raise ConfigurationError("n_outliers must be >= 0")
    rng = np.random.default_rng(seed)
    half = separation / 2.0
    mean0 = np.zeros(dims)
    mean0[0] = -half
    mean1 = np.zeros(dims)
    mean1[0] = +half
    X0 = rng.normal(size=(n_per_class, dims)) + mean0
    X1 = rng.normal(size=(n_per_class, dims)) + mean1
    blocks = [X0, X1]
    labels = [np.zeros(n_per_class, dtype=np.int64), np.ones(n_per_class, dtype=np.int64)]
    if n_outliers:
        direction = rng.normal(size=(n_outliers, dims))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        # radius from the midpoint; distance to either mean is then
        # >= 5*sqrt(dims) + 1 + i, clear of both clusters
        spread = np.sqrt(dims)
        radii = 5.0 * spread + abs(half) + 1.0 + np.arange(n_outliers, dtype=np.float64)
        blocks.append(direction * radii[:, None])
        labels.append(np.arange(n_outliers, dtype=np.int64) % 2)
    X = np.vstack(blocks)
    y = np.concatenate(labels)
    n = X.shape[0]
    return ExpressionDataset(
        X=X,
        labels=y,
        gene_ids=tuple(f"g{j:04d}" for j in range(dims)),
        sample_ids=tuple(f"s{i:04d}" for i in range(n)),
        class_names=("c0", "c1"),
    )
