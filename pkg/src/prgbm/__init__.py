"""Gradient boosting and forest regression with pluggable split strategies.

The headline model draws one uniform-random threshold per feature at every
node and keeps the best-scoring feature, which both smooths predictions over
sparsely covered regions and removes the per-feature sort from split search.
Deterministic (CART-style midpoint) and extremely randomized splitters, plus
bagged-forest baselines, share the same tree machinery for comparison.
"""

from .backend import backend_name, compiled_available
from .boosting import (GbmConfig, GbmModel, NumericError, SquaredError, Stage,
                       fit_gbm, line_search_gamma, predict_gbm,
                       predict_gbm_staged)
from .dataset import (Dataset, DatasetError, SeededRng, TrainTestSplit,
                      load_csv, save_csv, split_train_test, uniform)
from .evaluation import (ConstantModel, CvReport, GRID_PRESETS, HyperGrid,
                         MODEL_KINDS, fit_model, gap_jump_metric, grid_configs,
                         mse, run_protocol)
from .forest import ForestConfig, ForestModel, fit_forest, predict_forest
from .serialize import load_model, save_model
from .synth import (GridSpec, cross_mask, grid_points, make_friedman,
                    make_linear_regression, make_one_dim_dataset,
                    make_sparse_uncorrelated, make_two_dim_cross_dataset,
                    one_dim_function, two_dim_function, write_pgm)
from .tree import (BuildStats, Deterministic, ExtremelyRandomized,
                   PartiallyRandomized, SplitCandidate, SplitRule, Tree,
                   best_deterministic_split, build_tree,
                   extremely_randomized_split, partially_randomized_split,
                   predict_tree, variance_reduction)

__version__ = "0.1.0"
