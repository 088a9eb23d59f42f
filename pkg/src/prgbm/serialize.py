"""Model files: a versioned JSON header plus nested tree records.

One format serves boosting and forest models; ``model_kind`` tells them
apart. Floats go through ``repr`` (via the json module), so values
round-trip exactly.
"""

from __future__ import annotations

import json

from .boosting import GbmConfig, GbmModel, Stage
from .forest import ForestConfig, ForestModel
from .tree import Deterministic, ExtremelyRandomized, PartiallyRandomized, Tree

__all__ = ["load_model", "save_model"]

FORMAT_TAG = "prgbm-model"
FORMAT_VERSION = 1


def _splitter_to_dict(splitter) -> dict:
    if isinstance(splitter, Deterministic):
        return {"kind": "deterministic"}
    if isinstance(splitter, PartiallyRandomized):
        return {"kind": "partially_randomized"}
    if isinstance(splitter, ExtremelyRandomized):
        return {"kind": "extremely_randomized",
                "n_candidates": splitter.n_candidates}
    raise TypeError(f"unknown splitter {splitter!r}")


def _splitter_from_dict(data: dict):
    kind = data["kind"]
    if kind == "deterministic":
        return Deterministic()
    if kind == "partially_randomized":
        return PartiallyRandomized()
    if kind == "extremely_randomized":
        return ExtremelyRandomized(int(data["n_candidates"]))
    raise ValueError(f"unknown splitter kind {kind!r}")


def model_to_dict(model) -> dict:
    header = {"format": FORMAT_TAG, "version": FORMAT_VERSION}
    if isinstance(model, GbmModel):
        config = model.config
        header.update({
            "model_kind": "gbm",
            "n_features": model.n_features,
            "init": model.init,
            "config": {
                "n_stages": config.n_stages,
                "learning_rate": config.learning_rate,
                "max_depth": config.max_depth,
                "min_samples_split": config.min_samples_split,
                "splitter": _splitter_to_dict(config.splitter),
                "seed": config.seed,
            },
            "stages": [{"coefficient": s.coefficient, "tree": s.tree.to_dict()}
                       for s in model.stages],
        })
        return header
    if isinstance(model, ForestModel):
        config = model.config
        is_rf = isinstance(config.splitter, Deterministic)
        header.update({
            "model_kind": "random_forest" if is_rf else "ert_forest",
            "n_features": model.n_features,
            "config": {
                "n_trees": config.n_trees,
                "max_depth": config.max_depth,
                "min_samples_split": config.min_samples_split,
                "mtry": config.mtry,
                "bootstrap": config.bootstrap,
                "splitter": _splitter_to_dict(config.splitter),
                "seed": config.seed,
            },
            "trees": [t.to_dict() for t in model.trees],
        })
        return header
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(data: dict):
    if data.get("format") != FORMAT_TAG:
        raise ValueError("not a prgbm model file")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model file version {data.get('version')}")
    kind = data["model_kind"]
    n_features = int(data["n_features"])
    cfg = data["config"]
    if kind == "gbm":
        config = GbmConfig(
            n_stages=int(cfg["n_stages"]),
            learning_rate=float(cfg["learning_rate"]),
            max_depth=int(cfg["max_depth"]),
            min_samples_split=int(cfg["min_samples_split"]),
            splitter=_splitter_from_dict(cfg["splitter"]),
            seed=int(cfg["seed"]),
        )
        stages = [Stage(float(s["coefficient"]),
                        Tree.from_dict(s["tree"], config.max_depth, n_features))
                  for s in data["stages"]]
        return GbmModel(float(data["init"]), stages, config, n_features)
    if kind in ("random_forest", "ert_forest"):
        config = ForestConfig(
            n_trees=int(cfg["n_trees"]),
            max_depth=int(cfg["max_depth"]),
            min_samples_split=int(cfg["min_samples_split"]),
            mtry=None if cfg["mtry"] is None else int(cfg["mtry"]),
            bootstrap=bool(cfg["bootstrap"]),
            splitter=_splitter_from_dict(cfg["splitter"]),
            seed=int(cfg["seed"]),
        )
        trees = [Tree.from_dict(t, config.max_depth, n_features)
                 for t in data["trees"]]
        return ForestModel(trees, config, n_features)
    raise ValueError(f"unknown model_kind {kind!r}")


def save_model(model, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
