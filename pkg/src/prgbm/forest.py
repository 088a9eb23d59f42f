"""Averaged tree ensembles: bagged random forests and extra-trees forests."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, SeededRng
from .tree import Deterministic, ExtremelyRandomized, SplitterKind, Tree, build_tree

__all__ = ["ForestConfig", "ForestModel", "fit_forest", "predict_forest"]


@dataclass(frozen=True)
class ForestConfig:
    """Forest hyperparameters.

    ``mtry`` (features considered per node) applies to the deterministic
    splitter only; None means the regression default max(1, m // 3).
    The extra-trees configuration is ``bootstrap=False`` with the
    ``ExtremelyRandomized`` splitter.
    """

    n_trees: int = 100
    max_depth: int = 10
    min_samples_split: int = 2
    mtry: int | None = None
    bootstrap: bool = True
    splitter: SplitterKind = field(default_factory=Deterministic)
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.mtry is not None and self.mtry < 1:
            raise ValueError("mtry must be at least 1")


def random_forest_config(**kwargs) -> ForestConfig:
    return ForestConfig(bootstrap=True, splitter=Deterministic(), **kwargs)


def ert_forest_config(n_random_splits: int = 1, **kwargs) -> ForestConfig:
    return ForestConfig(bootstrap=False, mtry=None,
                        splitter=ExtremelyRandomized(n_random_splits), **kwargs)


@dataclass
class ForestModel:
    trees: list[Tree]
    config: ForestConfig
    n_features: int

    def predict(self, x):
        """Arithmetic mean of the member tree predictions."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, "
                             f"got shape {x.shape}")
        total = np.zeros(x.shape[0])
        for tree in self.trees:
            total += tree.predict(x)
        out = total / len(self.trees)
        return float(out[0]) if single else out


def predict_forest(model: ForestModel, x):
    return model.predict(x)


def fit_forest(train: Dataset, config: ForestConfig,
               rng: SeededRng | None = None, n_threads: int = 1) -> ForestModel:
    """Fit an averaged tree ensemble.

    Every tree gets its own pre-split rng child, so results are identical
    for any ``n_threads``. Bagged trees train on a size-n bootstrap resample;
    unbagged trees see the full sample.
    """
    if rng is None:
        rng = SeededRng(config.seed)
    m = train.n_features
    mtry = config.mtry
    if isinstance(config.splitter, Deterministic):
        if mtry is None:
            mtry = max(1, m // 3)
        if mtry > m:
            raise ValueError(f"mtry={mtry} exceeds {m} features")
    else:
        mtry = None
    children = rng.split(config.n_trees)

    def grow(child: SeededRng) -> Tree:
        X = train.features
        y = train.targets
        if config.bootstrap:
            sample = child.integers(0, train.n_examples, size=train.n_examples)
            X = X[sample]
            y = y[sample]
        return build_tree(X, y, config.splitter, config.max_depth,
                          config.min_samples_split, rng=child, mtry=mtry)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            trees = list(pool.map(grow, children))
    else:
        trees = [grow(child) for child in children]
    return ForestModel(trees, config, m)
