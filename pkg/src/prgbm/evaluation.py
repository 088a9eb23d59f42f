"""Benchmark protocol: repeated random splits, MSE scoring, grid selection,
and wall-clock fit timing.

Each repeat draws a fresh 3/4 - 1/4 train/test split. Hyperparameters come
from a small documented grid; selection runs in one of two modes:

* ``paper`` (default) - every grid point is scored on all repeats and the
  one with the best mean test MSE is reported. This reproduces the
  headline-table protocol but leaks test information into the selection.
* ``nested`` - each repeat picks its grid point on an inner split of its
  own training part, then refits on the full training part.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boosting import GbmConfig, fit_gbm
from .dataset import Dataset, SeededRng, split_train_test
from .forest import ForestConfig, fit_forest
from .synth import GridSpec
from .tree import Deterministic, ExtremelyRandomized, PartiallyRandomized

__all__ = [
    "ConstantModel",
    "CvReport",
    "GRID_PRESETS",
    "HyperGrid",
    "MODEL_KINDS",
    "fit_model",
    "gap_jump_metric",
    "grid_configs",
    "mse",
    "run_protocol",
]


def mse(predictions, targets) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape or predictions.ndim != 1:
        raise ValueError(f"shape mismatch: {predictions.shape} vs {targets.shape}")
    if predictions.size == 0:
        raise ValueError("mse of empty vectors is undefined")
    d = predictions - targets
    return float(d @ d / d.size)


@dataclass(frozen=True)
class HyperGrid:
    """Candidate hyperparameter values shared by all model kinds.

    ``ensemble_size`` doubles as boosting stage count and forest tree count;
    ``learning_rate`` applies to boosting; ``n_random_splits`` is the K of
    the extremely randomized splitter.
    """

    ensemble_size: tuple = (200, 500)
    learning_rate: tuple = (0.1, 0.05)
    max_depth: tuple = (3, 5)
    n_random_splits: tuple = (1,)

    def __post_init__(self):
        for name in ("ensemble_size", "learning_rate", "max_depth",
                     "n_random_splits"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"grid axis {name} must be nonempty")


GRID_PRESETS = {
    "default": HyperGrid(),
    "quick": HyperGrid(ensemble_size=(100,), learning_rate=(0.1,),
                       max_depth=(3,), n_random_splits=(1,)),
}

MODEL_KINDS = ("constant", "rf", "ert", "gbm", "ert_gbm", "prgbm")


def grid_configs(grid: HyperGrid, kind: str) -> list[dict]:
    """Concrete hyperparameter dicts for one model kind, in grid order."""
    if kind == "constant":
        return [{}]
    if kind in ("gbm", "prgbm"):
        axes = [("ensemble_size", grid.ensemble_size),
                ("learning_rate", grid.learning_rate),
                ("max_depth", grid.max_depth)]
    elif kind == "ert_gbm":
        axes = [("ensemble_size", grid.ensemble_size),
                ("learning_rate", grid.learning_rate),
                ("max_depth", grid.max_depth),
                ("n_random_splits", grid.n_random_splits)]
    elif kind == "rf":
        axes = [("ensemble_size", grid.ensemble_size),
                ("max_depth", grid.max_depth)]
    elif kind == "ert":
        axes = [("ensemble_size", grid.ensemble_size),
                ("max_depth", grid.max_depth),
                ("n_random_splits", grid.n_random_splits)]
    else:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    names = [a[0] for a in axes]
    return [dict(zip(names, combo))
            for combo in itertools.product(*(a[1] for a in axes))]


@dataclass(frozen=True)
class ConstantModel:
    """Predicts the training target mean everywhere; the no-op baseline."""

    mean: float
    n_features: int

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return self.mean
        return np.full(x.shape[0], self.mean)


def fit_model(kind: str, params: dict, train: Dataset, rng: SeededRng):
    """Fit one model kind with grid parameters; returns an object with
    ``predict``."""
    if kind == "constant":
        return ConstantModel(float(train.targets.mean()), train.n_features)
    if kind in ("gbm", "prgbm", "ert_gbm"):
        splitter = {
            "gbm": Deterministic(),
            "prgbm": PartiallyRandomized(),
            "ert_gbm": ExtremelyRandomized(params.get("n_random_splits", 1)),
        }[kind]
        config = GbmConfig(n_stages=params["ensemble_size"],
                           learning_rate=params["learning_rate"],
                           max_depth=params["max_depth"],
                           splitter=splitter)
        return fit_gbm(train, config, rng)
    if kind == "rf":
        config = ForestConfig(n_trees=params["ensemble_size"],
                              max_depth=params["max_depth"],
                              bootstrap=True, splitter=Deterministic())
        return fit_forest(train, config, rng)
    if kind == "ert":
        config = ForestConfig(
            n_trees=params["ensemble_size"], max_depth=params["max_depth"],
            bootstrap=False,
            splitter=ExtremelyRandomized(params.get("n_random_splits", 1)))
        return fit_forest(train, config, rng)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


@dataclass
class CvReport:
    """Per-repeat test MSEs and fit times for the selected grid point."""

    model_name: str
    per_repeat_mse: np.ndarray
    mean_mse: float
    std_mse: float
    per_repeat_train_seconds: np.ndarray
    chosen_hyperparams: dict
    repeats: int
    selection_mode: str
    total_grid_seconds: float
    per_repeat_hyperparams: list | None = None


def _timed_fit(kind, params, train, rng, repeat_index):
    start = time.perf_counter()
    try:
        model = fit_model(kind, params, train, rng)
    except Exception as exc:
        raise RuntimeError(
            f"repeat {repeat_index}: fitting {kind} with {params} failed: {exc}"
        ) from exc
    return model, time.perf_counter() - start


def run_protocol(d: Dataset, model_kind: str, grid: HyperGrid, repeats: int,
                 seed, mode: str = "paper", n_threads: int = 1,
                 progress=None) -> CvReport:
    """Run the repeated-split benchmark for one model on one dataset.

    ``seed`` (an int or a SeededRng) drives everything: split draws and fit
    randomness are pre-split per repeat and per grid point, so reports are
    bit-identical for any ``n_threads``. Timing covers fitting only.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if mode not in ("paper", "nested"):
        raise ValueError(f"unknown selection mode {mode!r}")
    configs = grid_configs(grid, model_kind)
    root = seed if isinstance(seed, SeededRng) else SeededRng(seed)
    repeat_rngs = root.split(repeats)
    splits = []
    fit_rngs = []
    for r in range(repeats):
        split_rng, fit_root = repeat_rngs[r].split(2)
        splits.append(split_train_test(d, split_rng, repeat_index=r))
        fit_rngs.append(fit_root)

    def run_jobs(jobs):
        if n_threads > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                return list(pool.map(lambda j: j(), jobs))
        return [job() for job in jobs]

    if mode == "paper":
        per_config_rngs = [fit_root.split(len(configs)) for fit_root in fit_rngs]
        all_mse = np.empty((len(configs), repeats))
        all_sec = np.empty((len(configs), repeats))
        for ci, params in enumerate(configs):
            def job(r, params=params, ci=ci):
                def run():
                    sp = splits[r]
                    model, seconds = _timed_fit(model_kind, params, sp.train,
                                                per_config_rngs[r][ci], r)
                    err = mse(model.predict(sp.test.features), sp.test.targets)
                    if progress is not None:
                        progress(model_kind, params, r, err)
                    return err, seconds
                return run
            results = run_jobs([job(r) for r in range(repeats)])
            for r, (err, seconds) in enumerate(results):
                all_mse[ci, r] = err
                all_sec[ci, r] = seconds
        best = int(np.argmin(all_mse.mean(axis=1)))
        return CvReport(
            model_name=model_kind,
            per_repeat_mse=all_mse[best].copy(),
            mean_mse=float(all_mse[best].mean()),
            std_mse=float(all_mse[best].std()),
            per_repeat_train_seconds=all_sec[best].copy(),
            chosen_hyperparams=configs[best],
            repeats=repeats,
            selection_mode=mode,
            total_grid_seconds=float(all_sec.sum()),
        )

    # nested mode
    def nested_job(r):
        def run():
            sp = splits[r]
            inner_split_rng, inner_fit_root, refit_rng = fit_rngs[r].split(3)
            inner = split_train_test(sp.train, inner_split_rng)
            inner_rngs = inner_fit_root.split(len(configs))
            inner_scores = []
            inner_seconds = 0.0
            for ci, params in enumerate(configs):
                model, seconds = _timed_fit(model_kind, params, inner.train,
                                            inner_rngs[ci], r)
                inner_seconds += seconds
                inner_scores.append(
                    mse(model.predict(inner.test.features), inner.test.targets))
            best_ci = int(np.argmin(inner_scores))
            model, refit_seconds = _timed_fit(model_kind, configs[best_ci],
                                              sp.train, refit_rng, r)
            err = mse(model.predict(sp.test.features), sp.test.targets)
            if progress is not None:
                progress(model_kind, configs[best_ci], r, err)
            return err, refit_seconds, inner_seconds + refit_seconds, best_ci
        return run

    results = run_jobs([nested_job(r) for r in range(repeats)])
    errs = np.array([res[0] for res in results])
    secs = np.array([res[1] for res in results])
    choices = [configs[res[3]] for res in results]
    counts = {}
    for choice in choices:
        key = tuple(sorted(choice.items()))
        counts[key] = counts.get(key, 0) + 1
    modal = dict(max(counts.items(), key=lambda kv: kv[1])[0])
    return CvReport(
        model_name=model_kind,
        per_repeat_mse=errs,
        mean_mse=float(errs.mean()),
        std_mse=float(errs.std()),
        per_repeat_train_seconds=secs,
        chosen_hyperparams=modal,
        repeats=repeats,
        selection_mode=mode,
        total_grid_seconds=float(sum(res[2] for res in results)),
        per_repeat_hyperparams=choices,
    )


def gap_jump_metric(model, grid: GridSpec, gap) -> float:
    """Largest jump between adjacent grid predictions inside the gap.

    The model must take a single feature; "inside the gap" means the
    midpoint of the adjacent grid pair lies in the open interval.
    """
    gap_lo, gap_hi = float(gap[0]), float(gap[1])
    if not (grid.lo <= gap_lo < gap_hi <= grid.hi):
        raise ValueError(f"gap ({gap_lo}, {gap_hi}) outside grid range "
                         f"[{grid.lo}, {grid.hi}]")
    coords = grid.coordinates()
    preds = np.asarray(model.predict(coords[:, None]), dtype=np.float64)
    jumps = np.abs(np.diff(preds))
    mids = (coords[:-1] + coords[1:]) / 2.0
    inside = (mids > gap_lo) & (mids < gap_hi)
    if not inside.any():
        return 0.0
    return float(jumps[inside].max())


def write_report_csv(report: CvReport, path) -> None:
    """One row per repeat. Wall-clock times are deliberately excluded so the
    file is byte-stable for a fixed seed."""
    with open(path, "w", newline="\n") as fh:
        fh.write("repeat,mse\n")
        for r, err in enumerate(report.per_repeat_mse):
            fh.write(f"{r},{float(err)!r}\n")


def write_summary_csv(reports: dict, dataset_names, model_names, path) -> None:
    """Headline-table layout: rows are datasets, columns are model mean MSEs."""
    with open(path, "w", newline="\n") as fh:
        fh.write("dataset," + ",".join(model_names) + "\n")
        for ds in dataset_names:
            cells = [repr(float(reports[ds][mk].mean_mse)) for mk in model_names]
            fh.write(f"{ds}," + ",".join(cells) + "\n")


def write_times_csv(reports: dict, dataset_names, model_names, path) -> None:
    """Training-time table: total fit seconds including grid selection."""
    with open(path, "w", newline="\n") as fh:
        fh.write("dataset," + ",".join(model_names) + "\n")
        for ds in dataset_names:
            cells = [repr(float(reports[ds][mk].total_grid_seconds))
                     for mk in model_names]
            fh.write(f"{ds}," + ",".join(cells) + "\n")
