"""Stagewise gradient boosting on regression trees.

The model is a constant plus a sum of scaled trees. Each stage fits a tree
to the current residuals, line-searches the step coefficient against the
loss, applies shrinkage, and updates the running predictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, SeededRng, split_train_test
from .tree import Deterministic, SplitterKind, Tree, build_tree

__all__ = [
    "GbmConfig",
    "GbmModel",
    "NumericError",
    "SquaredError",
    "Stage",
    "fit_gbm",
    "line_search_gamma",
    "predict_gbm",
    "predict_gbm_staged",
]


class NumericError(ArithmeticError):
    """Raised when training predictions stop being finite."""


@dataclass(frozen=True)
class SquaredError:
    """l(y, z) = (y - z)^2 with its exact negative gradient 2(y - z)."""

    def value(self, targets, predictions):
        d = np.asarray(targets, dtype=np.float64) - predictions
        return d * d

    def negative_gradient(self, targets, predictions):
        return 2.0 * (np.asarray(targets, dtype=np.float64) - predictions)


@dataclass(frozen=True)
class GbmConfig:
    """Boosting hyperparameters.

    ``n_stages`` may be zero (the model is then just the constant init).
    ``early_stopping_rounds`` optionally holds out a quarter of the training
    rows and stops when validation MSE has not improved for that many stages;
    it is off by default.
    """

    n_stages: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_split: int = 2
    splitter: SplitterKind = field(default_factory=Deterministic)
    seed: int = 0
    early_stopping_rounds: int | None = None

    def __post_init__(self):
        if self.n_stages < 0:
            raise ValueError("n_stages must be non-negative")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be at least 2")
        if self.early_stopping_rounds is not None and self.early_stopping_rounds < 1:
            raise ValueError("early_stopping_rounds must be at least 1")


@dataclass(frozen=True)
class Stage:
    coefficient: float
    tree: Tree


@dataclass
class GbmModel:
    init: float
    stages: list[Stage]
    config: GbmConfig
    n_features: int

    def _check(self, x: np.ndarray):
        cols = x.shape[-1] if x.ndim else -1
        if cols != self.n_features:
            raise ValueError(f"expected {self.n_features} features, "
                             f"got input shape {x.shape}")

    def predict(self, x):
        """Prediction for one feature vector or a batch (rows)."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        self._check(x)
        if x.ndim == 1:
            out = self.init
            for stage in self.stages:
                out = out + stage.coefficient * stage.tree.predict(x)
            return float(out)
        out = np.full(x.shape[0], self.init)
        for stage in self.stages:
            out += stage.coefficient * stage.tree.predict(x)
        return out

    def predict_staged(self, x):
        """Partial-sum predictions after 0, 1, ..., n_stages stages.

        The last entry accumulates stages in the same order as ``predict``,
        so the two agree exactly.
        """
        x = np.ascontiguousarray(x, dtype=np.float64)
        self._check(x)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        out = np.empty((len(self.stages) + 1, x.shape[0]))
        out[0] = self.init
        for t, stage in enumerate(self.stages):
            out[t + 1] = out[t] + stage.coefficient * stage.tree.predict(x)
        return out[:, 0] if single else out


def predict_gbm(model: GbmModel, x):
    return model.predict(x)


def predict_gbm_staged(model: GbmModel, x):
    return model.predict_staged(x)


def _golden_section(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section search plus one parabolic polish.

    Pure golden section bottoms out at sqrt(eps)-scale positional accuracy
    (function differences drown in rounding near a smooth minimum), so the
    bracket is only shrunk to a modest width and a parabola through its
    endpoints and midpoint supplies the final estimate; for a quadratic
    objective that step is exact.
    """
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > max(tol, 1e-5 * (1.0 + abs(a) + abs(b))):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    mid = (a + b) / 2.0
    f1, f2, f3 = fn(a), fn(mid), fn(b)
    d21 = mid - a
    d23 = mid - b
    den = d21 * (f2 - f3) - d23 * (f2 - f1)
    if den != 0.0:
        vertex = mid - 0.5 * (d21 * d21 * (f2 - f3)
                              - d23 * d23 * (f2 - f1)) / den
        if np.isfinite(vertex) and a <= vertex <= b:
            return vertex
    return mid

# Search bracket for the general-loss line search; wide enough for any sane
# step since tree outputs are residual-scale.
GAMMA_BRACKET = (-1.0e6, 1.0e6)


def line_search_gamma(train: Dataset, current_predictions, tree: Tree,
                      loss=SquaredError()) -> float:
    """Step coefficient minimizing the training loss along the tree.

    Squared error has the closed form sum(h * (y - g)) / sum(h * h); other
    losses fall back to golden-section search on ``GAMMA_BRACKET``. A tree
    that outputs (numerically) nothing gets coefficient 0.
    """
    h = tree.predict(train.features)
    return _gamma_for(train.targets, np.asarray(current_predictions), h, loss)


def _gamma_for(y, pred, h, loss) -> float:
    denom = float(h @ h)
    if denom <= 0.0:
        return 0.0
    if isinstance(loss, SquaredError):
        return float(h @ (y - pred)) / denom
    lo, hi = GAMMA_BRACKET
    return float(_golden_section(
        lambda g: float(loss.value(y, pred + g * h).sum()), lo, hi))


def fit_gbm(train: Dataset, config: GbmConfig,
            rng: SeededRng | None = None) -> GbmModel:
    """Fit a boosted tree ensemble.

    The init is the target mean; each stage fits a tree to the residuals
    y - g(x) (the squared-loss gradient up to a factor the line search
    absorbs), scales its line-searched coefficient by the learning rate, and
    updates the running predictions.
    """
    if rng is None:
        rng = SeededRng(config.seed)
    loss = SquaredError()
    fit_set = train
    val_set = None
    if config.early_stopping_rounds is not None and train.n_examples >= 8:
        holdout = split_train_test(train, rng)
        fit_set, val_set = holdout.train, holdout.test

    X = fit_set.features
    y = fit_set.targets
    init = float(y.mean())
    pred = np.full(y.shape[0], init)
    stages: list[Stage] = []
    best_val = np.inf
    stall = 0
    val_pred = None
    if val_set is not None:
        val_pred = np.full(val_set.n_examples, init)
    for _ in range(config.n_stages):
        residuals = y - pred
        tree = build_tree(X, residuals, config.splitter, config.max_depth,
                          config.min_samples_split, rng=rng)
        h = tree.predict(X)
        coefficient = config.learning_rate * _gamma_for(y, pred, h, loss)
        pred = pred + coefficient * h
        if not np.isfinite(pred).all():
            raise NumericError(
                f"non-finite predictions after stage {len(stages) + 1}")
        stages.append(Stage(coefficient, tree))
        if val_set is not None:
            val_pred = val_pred + coefficient * tree.predict(val_set.features)
            val_mse = float(loss.value(val_set.targets, val_pred).mean())
            if val_mse < best_val:
                best_val = val_mse
                stall = 0
            else:
                stall += 1
                if stall >= config.early_stopping_rounds:
                    break
    return GbmModel(init, stages, config, train.n_features)
