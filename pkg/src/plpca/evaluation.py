"""Dimension sweeps, aggregate reports, and the outlier benchmark."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import ExpressionDataset, SplitPlan, make_splits, normalize, one_hot, synth_outliers
from .errors import ConfigurationError
from .metrics import confusion_matrix, knn_predict, macro_auc, macro_metrics
from .solver import (
    SolverConfig,
    build_regularizer,
    fit_projection,
    project,
    uses_labels,
    uses_regularizer,
)

METRIC_KEYS = ("acc", "macro_rec", "macro_pre", "macro_f1", "macro_auc")
PROJECTION_MODES = ("inductive", "transductive")


@dataclass(frozen=True)
class EvalReport:
    """Sweep outcome: per-dimension metric means and their grand means.

    per_dimension[k] holds the five metrics averaged over repetitions at
    subspace dimension k; means averages those rows over the sweep.
    confusions[k] keeps one confusion matrix per repetition.
    """

    method: str
    dims: tuple[int, ...]
    per_dimension: dict[int, dict[str, float]]
    means: dict[str, float]
    confusions: dict[int, tuple]
    auc_mode: str
    projection: str
    k_neighbors: int
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "dims": list(self.dims),
            "per_dimension": {
                str(k): {m: self.per_dimension[k][m] for m in METRIC_KEYS} for k in self.dims
            },
            "means": {m: self.means[m] for m in METRIC_KEYS},
            "confusions": {
                str(k): [c.tolist() for c in self.confusions[k]] for k in self.dims
            },
            "auc_mode": self.auc_mode,
            "projection": self.projection,
            "k_neighbors": self.k_neighbors,
            "flags": list(self.flags),
        }


def _annotate(err: Exception, rep: int, dim: int) -> Exception:
    return type(err)(f"repetition {rep}, dimension {dim}: {err}")


def sweep_dimensions(
    ds: ExpressionDataset,
    config: SolverConfig,
    dims,
    plan: SplitPlan,
    k_neighbors: int = 5,
    auc_mode: str = "hard",
    projection: str = "inductive",
) -> EvalReport:
    """Classify in the reduced space across subspace dimensions and splits.

    For every repetition of the plan and every dimension k, the method
    is fitted on the training rows only (inductive default) and the test
    rows are projected through the learned directions; a KNN vote in the
    reduced space yields a confusion matrix. Transductive mode fits the
    label-free methods on all rows and reads off their embedding, so
    test labels never influence either path.
    """
    dims = tuple(int(k) for k in dims)
    if len(dims) == 0 or len(set(dims)) != len(dims):
        raise ConfigurationError("dims must be a non-empty list of distinct integers")
    if projection not in PROJECTION_MODES:
        raise ConfigurationError(f"unknown projection mode {projection!r}")
    supervised = uses_labels(config.method)
    if projection == "transductive" and supervised:
        raise ConfigurationError(
            "transductive projection is limited to the label-free methods "
            "(pca, glpca, plpca_simple); the label term has no masked form here"
        )
    splits = make_splits(ds, plan)
    c = ds.n_classes
    min_train = min(tr.size for tr, _ in splits)
    cap = min(min_train, ds.n_features) if projection == "inductive" else min(
        ds.n_samples, ds.n_features
    )
    for k in dims:
        if not (1 <= k <= cap):
            raise ConfigurationError(f"dimension {k} outside [1, {cap}] for this data")

    acc: dict[int, list[dict[str, float]]] = {k: [] for k in dims}
    confusions: dict[int, list] = {k: [] for k in dims}
    flags: list[str] = []

    full_models: dict[int, np.ndarray] = {}
    if projection == "transductive":
        lap_full = build_regularizer(ds.X, config) if config.gamma != 0.0 else None
        for k in dims:
            try:
                model = fit_projection(ds.X, None, config.with_components(k), laplacian=lap_full)
            except Exception as e:  # annotate with the failing cell
                raise _annotate(e, -1, k) from e
            full_models[k] = model.q

    for rep, (tr, te) in enumerate(splits):
        Xtr, ytr = ds.X[tr], ds.labels[tr]
        Xte, yte = ds.X[te], ds.labels[te]
        if projection == "inductive":
            Y = one_hot(ytr, c) if supervised else None
            try:
                lap_tr = (
                    build_regularizer(Xtr, config)
                    if config.gamma != 0.0 and uses_regularizer(config.method)
                    else None
                )
            except Exception as e:  # name the repetition whose graph failed
                raise type(e)(f"repetition {rep}: {e}") from e
        for k in dims:
            if projection == "inductive":
                try:
                    model = fit_projection(Xtr, Y, config.with_components(k), laplacian=lap_tr)
                except Exception as e:
                    raise _annotate(e, rep, k) from e
                train_feats = model.q
                test_feats = project(model, Xte)
            else:
                Q = full_models[k]
                train_feats = Q[tr]
                test_feats = Q[te]
            preds, scores = knn_predict(train_feats, ytr, test_feats, k_neighbors, n_classes=c)
            conf = confusion_matrix(yte, preds, c)
            mm = macro_metrics(conf)
            auc, auc_flags = macro_auc(scores, yte, mode=auc_mode, y_pred=preds)
            row = mm.as_dict()
            row["macro_auc"] = auc
            acc[k].append(row)
            confusions[k].append(conf)
            for f in (*mm.flags, *auc_flags):
                tagged = f"rep {rep}, dim {k}: {f}"
                flags.append(tagged)

    per_dimension = {
        k: {m: float(np.mean([row[m] for row in acc[k]])) for m in METRIC_KEYS} for k in dims
    }
    means = {m: float(np.mean([per_dimension[k][m] for k in dims])) for m in METRIC_KEYS}
    return EvalReport(
        method=config.method,
        dims=dims,
        per_dimension=per_dimension,
        means=means,
        confusions={k: tuple(confusions[k]) for k in dims},
        auc_mode=auc_mode,
        projection=projection,
        k_neighbors=k_neighbors,
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# Synthetic outlier benchmark


# Benchmark solver settings. Without centering, the leading component of
# min-max scaled data tracks the overall mean, so target dimensions start
# at 2. Heavy row-sparsity (beta) destabilizes the reweighted iteration on
# contaminated data, hence the light weights; the zero last zeta weight
# drops the only filtration step whose edges reach the contaminants.
BENCH_DIMS = (2, 3, 5)
BENCH_BASE = dict(
    method="plpca_full",
    alpha=1e-2,
    beta=1e-2,
    gamma=0.1,
    zeta=(1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
)


def outlier_benchmark(
    n_outliers_list=(2, 4, 8),
    methods=None,
    n_per_class: int = 80,
    n_features: int = 20,
    separation: float = 6.0,
    seed: int = 7,
    dims=BENCH_DIMS,
    plan: SplitPlan | None = None,
    k_neighbors: int = 5,
    auc_mode: str = "hard",
    base_config: SolverConfig | None = None,
) -> dict:
    """Evaluate every method on contaminated two-class Gaussian data.

    Returns {(n_outliers, method): EvalReport}. The synthetic data is
    min-max normalized before evaluation, mirroring the expression
    pipeline. `plan` controls the train/test splits and defaults to five
    stratified 80/20 repetitions seeded by `seed`.
    """
    from .solver import METHODS  # full family by default

    if methods is None:
        methods = METHODS
    methods = [m for m in methods]
    if base_config is None:
        base_config = SolverConfig(**BENCH_BASE)
    if plan is None:
        plan = SplitPlan(repetitions=5, test_fraction=0.2, seed=seed, stratified=True)

    results = {}
    for n_out in n_outliers_list:
        ds = synth_outliers(
            n_per_class=n_per_class,
            dims=n_features,
            n_outliers=int(n_out),
            separation=separation,
            seed=seed,
        )
        ds = normalize(ds, "minmax")
        for method in methods:
            config = replace(base_config, method=method)
            results[(int(n_out), config.method)] = sweep_dimensions(
                ds, config, dims, plan, k_neighbors=k_neighbors, auc_mode=auc_mode
            )
    return results


# ---------------------------------------------------------------------------
# Tabular serialization (CSV text; callers write the files)

_TABLE_HEADER = ("mean_acc", "mean_macro_rec", "mean_macro_pre", "mean_macro_f1", "mean_macro_auc")


def _fmt(v: float) -> str:
    return repr(float(v))


def methods_table_csv(reports: dict[str, EvalReport]) -> str:
    """One row of sweep means per method, columns in the standard order."""
    lines = ["method," + ",".join(_TABLE_HEADER)]
    for method in sorted(reports):
        r = reports[method]
        lines.append(method + "," + ",".join(_fmt(r.means[m]) for m in METRIC_KEYS))
    return "\n".join(lines) + "\n"


def curves_csv(report: EvalReport) -> str:
    """Per-dimension metric rows for one method."""
    lines = ["dim," + ",".join(METRIC_KEYS)]
    for k in report.dims:
        row = report.per_dimension[k]
        lines.append(str(k) + "," + ",".join(_fmt(row[m]) for m in METRIC_KEYS))
    return "\n".join(lines) + "\n"


def benchmark_table_csv(results: dict) -> str:
    """Outlier benchmark rows: (contamination, method) -> sweep means."""
    lines = ["n_outliers,method," + ",".join(_TABLE_HEADER)]
    for n_out, method in sorted(results, key=lambda t: (t[0], t[1])):
        r = results[(n_out, method)]
        lines.append(
            f"{n_out},{method}," + ",".join(_fmt(r.means[m]) for m in METRIC_KEYS)
        )
    return "\n".join(lines) + "\n"
