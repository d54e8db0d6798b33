"""Command line interface.

Every command resolves its configuration as defaults < preset < config
file < flags, writes the fully resolved configuration next to its
outputs as config.json (the output directory itself is not recorded),
and writes all artifacts atomically. Re-running a command from an
emitted config.json reproduces the same bytes.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np

from .data import (
    SplitPlan,
    export_csv,
    ingest_csv,
    make_splits,
    normalize,
    one_hot,
    synth_outliers,
)
from .errors import (
    ConfigurationError,
    CSVParseError,
    InclusionError,
    LabelError,
    NumericalError,
)
from .evaluation import (
    BENCH_BASE,
    BENCH_DIMS,
    METRIC_KEYS,
    benchmark_table_csv,
    curves_csv,
    methods_table_csv,
    outlier_benchmark,
    sweep_dimensions,
)
from .ioutil import atomic_write_json, atomic_write_text
from .metrics import knn_predict, rs_scores
from .presets import preset
from .solver import SolverConfig, fit_projection, save_model, uses_labels

DEFAULT_DIMS = list(range(100, 4, -5)) + [1]

DEFAULTS: dict = {
    "dataset": None,
    "synth": None,
    "method": "plpca_full",
    "methods": None,
    "n_components": 2,
    "alpha": 1e-4,
    "beta": 0.5,
    "gamma": 1e-4,
    "tol": 1e-6,
    "max_iter": 200,
    "mu0": 1.0,
    "knn_k": 5,
    "eta": "auto",
    "n_filtrations": 6,
    "zeta": None,
    "direction": "as_text",
    "split": {
        "repetitions": 5,
        "test_fraction": 0.2,
        "seed": 0,
        "stratified": True,
        "mode": "repeated",
    },
    "dims": DEFAULT_DIMS,
    "k_neighbors": 5,
    "auc_mode": "hard",
    "projection": "inductive",
    "rs_dim": 100,
    "outlier_counts": [2, 4, 8],
    "grid": None,
    "seed": 0,
    "jobs": 1,
    "preset": None,
}

_DATASET_DEFAULTS = {
    "path": None,
    "orientation": "samples_by_genes",
    "labels": None,
    "has_header": "auto",
    "has_ids": "auto",
    "normalize": "minmax",
}
_SYNTH_DEFAULTS = {
    "n_per_class": 80,
    "dims": 20,
    "n_outliers": 2,
    "separation": 6.0,
    "seed": 0,
}

_ERROR_CATEGORIES = (
    (CSVParseError, "parse", 4),
    (LabelError, "labels", 4),
    (InclusionError, "inclusion", 3),
    (ConfigurationError, "config", 3),
    (NumericalError, "numerical", 5),
    (FileNotFoundError, "io", 2),
    (OSError, "io", 2),
)


def _merge_section(base: dict, override: dict, name: str) -> dict:
    out = dict(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigurationError(f"unknown key {name}.{key!r} in configuration")
        out[key] = value
    return out


def resolve_config(file_cfg: dict | None, preset_name: str | None, overrides: dict) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    layers = []
    if preset_name:
        layers.append(preset(preset_name))
        cfg["preset"] = preset_name
    if file_cfg:
        layers.append(file_cfg)
    layers.append(overrides)
    for layer in layers:
        for key, value in layer.items():
            if key == "out":
                continue  # never recorded; supplied per run
            if key not in DEFAULTS:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            if key in ("dataset", "synth", "split", "grid") and value is not None:
                base = {
                    "dataset": _DATASET_DEFAULTS,
                    "synth": _SYNTH_DEFAULTS,
                    "split": DEFAULTS["split"],
                    "grid": {},
                }[key]
                if key == "grid":
                    cfg[key] = dict(value)
                else:
                    current = cfg[key] if isinstance(cfg[key], dict) else dict(base)
                    cfg[key] = _merge_section(current, value, key)
            else:
                cfg[key] = value
    if "seed" in overrides:
        cfg["split"] = dict(cfg["split"], seed=overrides["seed"])
        if cfg["synth"] is not None:
            cfg["synth"] = dict(cfg["synth"], seed=overrides["seed"])
    return cfg


def _solver_config(cfg: dict, method: str | None = None, n_components: int | None = None):
    return SolverConfig(
        method=method or cfg["method"],
        n_components=n_components or cfg["n_components"],
        alpha=cfg["alpha"],
        beta=cfg["beta"],
        gamma=cfg["gamma"],
        tol=cfg["tol"],
        max_iter=cfg["max_iter"],
        mu0=cfg["mu0"],
        knn_k=cfg["knn_k"],
        eta=cfg["eta"],
        n_filtrations=cfg["n_filtrations"],
        zeta=tuple(cfg["zeta"]) if cfg["zeta"] is not None else None,
        direction=cfg["direction"],
    )


def _split_plan(cfg: dict) -> SplitPlan:
    s = cfg["split"]
    return SplitPlan(
        repetitions=s["repetitions"],
        test_fraction=s["test_fraction"],
        seed=s["seed"],
        stratified=s["stratified"],
        mode=s["mode"],
    )


def _load_dataset(cfg: dict):
    if cfg["dataset"] is not None and cfg["synth"] is not None:
        raise ConfigurationError("configure either dataset or synth, not both")
    if cfg["dataset"] is not None:
        d = cfg["dataset"]
        if not d.get("path"):
            raise ConfigurationError("dataset.path is required")
        ds = ingest_csv(
            d["path"],
            orientation=d["orientation"],
            label_source=d["labels"],
            has_header=d["has_header"],
            has_ids=d["has_ids"],
        )
        if d["normalize"] and d["normalize"] != "none":
            ds = normalize(ds, d["normalize"])
        return ds
    if cfg["synth"] is not None:
        s = cfg["synth"]
        ds = synth_outliers(
            n_per_class=s["n_per_class"],
            dims=s["dims"],
            n_outliers=s["n_outliers"],
            separation=s["separation"],
            seed=s["seed"],
        )
        return normalize(ds, "minmax")
    raise ConfigurationError("no data source configured (set dataset or synth)")


# ---------------------------------------------------------------------------
# Commands


def cmd_reduce(cfg: dict, out: str) -> int:
    ds = _load_dataset(cfg)
    config = _solver_config(cfg)
    Y = one_hot(ds.labels, ds.n_classes) if uses_labels(config.method) else None
    model = fit_projection(ds.X, Y, config)
    save_model(model, out, config=cfg)
    return 0


def cmd_evaluate(cfg: dict, out: str) -> int:
    ds = _load_dataset(cfg)
    plan = _split_plan(cfg)
    methods = cfg["methods"] or [cfg["method"]]
    reports = {}
    for method in methods:
        config = _solver_config(cfg, method=method)
        report = sweep_dimensions(
            ds,
            config,
            cfg["dims"],
            plan,
            k_neighbors=cfg["k_neighbors"],
            auc_mode=cfg["auc_mode"],
            projection=cfg["projection"],
        )
        reports[config.method] = report
    os.makedirs(out, exist_ok=True)
    for method, report in reports.items():
        atomic_write_json(os.path.join(out, f"report_{method}.json"), report.to_dict())
        atomic_write_text(os.path.join(out, f"curves_{method}.csv"), curves_csv(report))
    atomic_write_text(os.path.join(out, "table.csv"), methods_table_csv(reports))
    atomic_write_json(os.path.join(out, "config.json"), cfg)
    return 0


def _grid_cells(cfg: dict):
    grid = cfg["grid"] or {}
    allowed = ("alpha", "beta", "gamma", "zeta", "n_filtrations")
    for key in grid:
        if key not in allowed:
            raise ConfigurationError(f"grid key {key!r} not in {allowed}")
    keys = [k for k in allowed if k in grid]
    if not keys:
        raise ConfigurationError("grid is empty; nothing to search")
    values = [grid[k] for k in keys]
    for idx, combo in enumerate(product(*values)):
        yield idx, dict(zip(keys, combo))


def _run_grid_cell(args):
    idx, cfg, params = args
    cell_cfg = dict(cfg)
    for key, value in params.items():
        cell_cfg[key] = value
    try:
        ds = _load_dataset(cell_cfg)
        config = _solver_config(cell_cfg)
        report = sweep_dimensions(
            ds,
            config,
            cell_cfg["dims"],
            _split_plan(cell_cfg),
            k_neighbors=cell_cfg["k_neighbors"],
            auc_mode=cell_cfg["auc_mode"],
            projection=cell_cfg["projection"],
        )
        return idx, params, {m: report.means[m] for m in METRIC_KEYS}, None
    except Exception as e:  # failed cells become NaN rows
        return idx, params, None, f"{type(e).__name__}: {e}"


def cmd_gridsearch(cfg: dict, out: str) -> int:
    cells = [(idx, cfg, params) for idx, params in _grid_cells(cfg)]
    jobs = max(1, int(cfg["jobs"]))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_run_grid_cell, cells))
    else:
        raw = [_run_grid_cell(cell) for cell in cells]
    raw.sort(key=lambda r: r[0])  # aggregation independent of completion order

    def sort_key(row):
        idx, params, means, err = row
        if means is None:
            return (1, 0.0, 0.0, idx)
        return (0, -means["acc"], -means["macro_f1"], idx)

    ranked = sorted(raw, key=sort_key)
    param_keys = sorted({k for _, params, _, _ in raw for k in params})
    lines = ["rank,cell," + ",".join(param_keys) + ",mean_acc,mean_macro_rec,mean_macro_pre,mean_macro_f1,mean_macro_auc,error"]
    for rank, (idx, params, means, err) in enumerate(ranked, start=1):
        pvals = [json.dumps(params.get(k)).replace(",", ";") for k in param_keys]
        if means is None:
            mvals = ["nan"] * len(METRIC_KEYS)
        else:
            mvals = [repr(float(means[m])) for m in METRIC_KEYS]
        err_text = (err or "").replace(",", ";").replace("\n", " ")
        lines.append(
            f"{rank},{idx}," + ",".join(pvals) + "," + ",".join(mvals) + f",{err_text}"
        )
    os.makedirs(out, exist_ok=True)
    atomic_write_text(os.path.join(out, "grid.csv"), "\n".join(lines) + "\n")
    atomic_write_json(os.path.join(out, "config.json"), cfg)
    return 0 if all(err is None for _, _, _, err in raw) else 5


def cmd_bench_outliers(cfg: dict, out: str) -> int:
    # without a synth section the canonical benchmark data is used; --seed
    # then varies only the evaluation splits, not the data
    synth = cfg["synth"] or dict(_SYNTH_DEFAULTS, seed=7)
    # solver keys left at their global defaults fall back to the benchmark
    # settings; explicitly configured values win
    merged = dict(cfg)
    for key, value in BENCH_BASE.items():
        if key != "method" and cfg[key] == DEFAULTS[key]:
            merged[key] = list(value) if isinstance(value, tuple) else value
    base = _solver_config(merged)
    dims = cfg["dims"] if cfg["dims"] != DEFAULT_DIMS else list(BENCH_DIMS)
    methods = cfg["methods"]  # None means the whole family
    results = outlier_benchmark(
        n_outliers_list=tuple(cfg["outlier_counts"]),
        methods=methods,
        n_per_class=synth["n_per_class"],
        n_features=synth["dims"],
        separation=synth["separation"],
        seed=synth["seed"],
        dims=tuple(dims),
        plan=_split_plan(cfg),
        k_neighbors=cfg["k_neighbors"],
        auc_mode=cfg["auc_mode"],
        base_config=base,
    )
    os.makedirs(out, exist_ok=True)
    atomic_write_text(os.path.join(out, "outlier_table.csv"), benchmark_table_csv(results))
    atomic_write_json(os.path.join(out, "config.json"), cfg)
    return 0


def cmd_rs(cfg: dict, out: str) -> int:
    """Residue/similarity plot data at one subspace dimension.

    The reduction is fitted on all rows; per-sample predicted labels
    come from a stratified 5-fold KNN cross-prediction in the embedded
    space, so each sample is predicted from folds it did not vote in.
    """
    ds = _load_dataset(cfg)
    config = _solver_config(cfg, n_components=cfg["rs_dim"])
    Y = one_hot(ds.labels, ds.n_classes) if uses_labels(config.method) else None
    model = fit_projection(ds.X, Y, config)
    emb = model.q
    plan = SplitPlan(
        repetitions=5, seed=cfg["split"]["seed"], stratified=True, mode="kfold"
    )
    y_pred = np.empty(ds.n_samples, dtype=np.int64)
    for tr, te in make_splits(ds, plan):
        preds, _ = knn_predict(
            emb[tr], ds.labels[tr], emb[te], cfg["k_neighbors"], n_classes=ds.n_classes
        )
        y_pred[te] = preds
    scores = rs_scores(emb, ds.labels, y_pred)
    os.makedirs(out, exist_ok=True)
    for cls in range(ds.n_classes):
        members = np.flatnonzero(ds.labels == cls)
        lines = ["sample_id,residue,similarity,true,predicted"]
        for i in members:
            lines.append(
                f"{ds.sample_ids[i]},{repr(float(scores.r[i]))},{repr(float(scores.s[i]))},"
                f"{int(scores.y_true[i])},{int(scores.y_pred[i])}"
            )
        atomic_write_text(
            os.path.join(out, f"rs_{config.method}_class{cls}.csv"), "\n".join(lines) + "\n"
        )
    atomic_write_json(os.path.join(out, "config.json"), cfg)
    return 0


def cmd_synth(cfg: dict, out: str) -> int:
    synth = cfg["synth"] or _SYNTH_DEFAULTS
    ds = synth_outliers(
        n_per_class=synth["n_per_class"],
        dims=synth["dims"],
        n_outliers=synth["n_outliers"],
        separation=synth["separation"],
        seed=synth["seed"],
    )
    os.makedirs(out, exist_ok=True)
    data_path = os.path.join(out, "data.csv")
    labels_path = os.path.join(out, "labels.csv")
    export_csv(ds, data_path, labels_path)
    cfg = dict(cfg, synth=dict(synth))
    atomic_write_json(os.path.join(out, "config.json"), cfg)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plpca",
        description="Regularized PCA family reductions, evaluation, and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("reduce", "fit one configuration and write the projection model"),
        ("evaluate", "sweep dimensions over repeated splits and tabulate metrics"),
        ("gridsearch", "evaluate a hyperparameter grid and rank the cells"),
        ("bench-outliers", "run the synthetic contamination benchmark"),
        ("rs", "emit residue/similarity plot data per class"),
        ("synth", "generate and export a synthetic outlier dataset"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--preset", help="named hyperparameter preset")
        p.add_argument("--seed", type=int, help="override split/synthesis seed")
        p.add_argument("--jobs", type=int, help="worker processes for grid cells")
        p.add_argument("--method", help="method name override")
        p.add_argument(
            "--dims",
            help="comma-separated sweep dimensions (rs: the single embedding dimension)",
        )
        p.add_argument("--data", help="dataset CSV path override")
        p.add_argument("--labels", help="label file or row/column id override")
    return parser


_COMMANDS = {
    "reduce": cmd_reduce,
    "evaluate": cmd_evaluate,
    "gridsearch": cmd_gridsearch,
    "bench-outliers": cmd_bench_outliers,
    "rs": cmd_rs,
    "synth": cmd_synth,
}


def _overrides_from_args(args) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.method is not None:
        overrides["method"] = args.method
    if args.dims is not None:
        dims = [int(v) for v in str(args.dims).split(",") if v.strip() != ""]
        if not dims:
            raise ConfigurationError("--dims must list at least one integer")
        if args.command == "rs":
            overrides["rs_dim"] = dims[0]
        else:
            overrides["dims"] = dims
    dataset_override = {}
    if args.data is not None:
        dataset_override["path"] = args.data
    if args.labels is not None:
        dataset_override["labels"] = args.labels
    if dataset_override:
        overrides["dataset"] = dataset_override
    return overrides


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        file_cfg = None
        if args.config:
            if not os.path.exists(args.config):
                raise FileNotFoundError(f"config file not found: {args.config}")
            with open(args.config) as fh:
                try:
                    file_cfg = json.load(fh)
                except json.JSONDecodeError as e:
                    raise ConfigurationError(f"invalid JSON in {args.config}: {e}") from e
        cfg = resolve_config(file_cfg, args.preset, _overrides_from_args(args))
        return _COMMANDS[args.command](cfg, args.out)
    except Exception as e:  # map to a stable single-line category
        for exc_type, category, code in _ERROR_CATEGORIES:
            if isinstance(e, exc_type):
                print(f"error category={category}: {e}", file=sys.stderr)
                return code
        print(f"error category=internal: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
