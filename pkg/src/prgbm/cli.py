"""Command-line front end: generate data, train/predict models, run the
benchmark protocol, and emit figure data.

Exit codes: 0 success, 2 usage, 3 data error, 4 numeric error, 5 I/O error.
Diagnostics go to stderr; stdout carries data only when ``-`` is the output
path.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from .backend import backend_name
from .boosting import GbmConfig, NumericError, fit_gbm
from .dataset import (DatasetError, SeededRng, load_csv, load_matrix_csv,
                      save_csv)
from .evaluation import (GRID_PRESETS, HyperGrid, MODEL_KINDS, mse,
                         run_protocol, write_report_csv, write_summary_csv,
                         write_times_csv)
from .forest import ForestConfig, fit_forest
from .serialize import load_model, save_model
from .synth import (GridSpec, cross_mask, make_friedman,
                    make_linear_regression, make_one_dim_dataset,
                    make_sparse_uncorrelated, make_two_dim_cross_dataset,
                    values_to_image, write_pgm)
from .tree import Deterministic, ExtremelyRandomized, PartiallyRandomized

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_IO = 5

GENERATORS = ("friedman1", "friedman2", "friedman3", "sparse", "linear",
              "one_dim", "cross")
BENCHMARK_DATASETS = ("friedman1", "friedman2", "friedman3", "sparse", "linear")


def _fail(kind: str, message: str) -> None:
    message = " ".join(str(message).split())
    print(f"error: {kind}: {message}", file=sys.stderr)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_gaps(text: str) -> list[tuple[float, float]]:
    if not text:
        return []
    gaps = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise DatasetError(f"bad gap {part!r}; expected lo:hi")
        gaps.append((float(lo), float(hi)))
    return gaps


def _parse_kv_file(path) -> dict:
    """Simple config format: one `key = value` per line, # comments."""
    values = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DatasetError(f"{path}: line {line_no}: expected key = value")
            values[key.strip()] = value.strip()
    return values


def _resolve_grid(spec: str) -> HyperGrid:
    if spec in GRID_PRESETS:
        return GRID_PRESETS[spec]
    raw = _parse_kv_file(spec)
    axes = {}
    casts = {"ensemble_size": int, "learning_rate": float, "max_depth": int,
             "n_random_splits": int}
    for key, text in raw.items():
        if key not in casts:
            raise DatasetError(f"{spec}: unknown grid axis {key!r}")
        axes[key] = tuple(casts[key](v) for v in text.split(","))
    return HyperGrid(**axes)


# Friedman 3's target is atan-ranged (variance ~0.1), so unit noise would
# drown it; 0.1 keeps the headline-table magnitudes meaningful.
_DATASET_NOISE_DEFAULTS = {"friedman3": 0.1}


def _named_dataset(name: str, rng: SeededRng, n=None, m=None, noise_sd=None):
    n = 100 if n is None else n
    if noise_sd is None:
        noise_sd = _DATASET_NOISE_DEFAULTS.get(name, 1.0)
    if name == "friedman1":
        return make_friedman(1, n, rng, noise_sd)
    if name == "friedman2":
        return make_friedman(2, n, rng, noise_sd)
    if name == "friedman3":
        return make_friedman(3, n, rng, noise_sd)
    if name == "sparse":
        return make_sparse_uncorrelated(n, rng, noise_sd)
    if name == "linear":
        return make_linear_regression(n, 100 if m is None else m, rng, noise_sd)
    raise DatasetError(f"unknown dataset {name!r}")


def _write_meta(path, payload: dict) -> None:
    payload = dict(payload)
    payload["created_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def cmd_generate(args) -> int:
    rng = SeededRng(args.seed)
    if args.generator == "one_dim":
        data = make_one_dim_dataset(args.n or 100, rng,
                                    0.0 if args.noise_sd is None else args.noise_sd,
                                    _parse_gaps(args.gaps))
        save_csv(data, args.out)
        return EXIT_OK
    if args.generator == "cross":
        grid = GridSpec(points_per_axis=args.points)
        train, full = make_two_dim_cross_dataset(grid, rng, args.cross_width)
        save_csv(train, args.out)
        if args.grid_out:
            save_csv(full, args.grid_out)
        return EXIT_OK
    data = _named_dataset(args.generator, rng, args.n, args.m, args.noise_sd)
    save_csv(data, args.out)
    return EXIT_OK


_TRAIN_DEFAULTS = {
    "stages": 100, "learning_rate": 0.1, "depth": 3, "min_samples_split": 2,
    "k": 1, "trees": 100, "mtry": None, "bootstrap": True, "seed": 0,
    "early_stopping_rounds": None,
}
_TRAIN_CASTS = {
    "stages": int, "learning_rate": float, "depth": int,
    "min_samples_split": int, "k": int, "trees": int, "mtry": int,
    "bootstrap": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "seed": int, "early_stopping_rounds": int,
}


def _train_settings(args) -> dict:
    settings = dict(_TRAIN_DEFAULTS)
    if args.config:
        for key, text in _parse_kv_file(args.config).items():
            if key not in _TRAIN_CASTS:
                raise DatasetError(f"{args.config}: unknown setting {key!r}")
            settings[key] = _TRAIN_CASTS[key](text)
    for key in _TRAIN_DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    if args.no_bootstrap:
        settings["bootstrap"] = False
    return settings


def cmd_train(args) -> int:
    s = _train_settings(args)
    data = load_csv(args.data, args.target)
    if args.model in ("gbm", "prgbm", "ert_gbm"):
        splitter = {"gbm": Deterministic(),
                    "prgbm": PartiallyRandomized(),
                    "ert_gbm": ExtremelyRandomized(s["k"])}[args.model]
        config = GbmConfig(n_stages=s["stages"],
                           learning_rate=s["learning_rate"],
                           max_depth=s["depth"],
                           min_samples_split=s["min_samples_split"],
                           splitter=splitter, seed=s["seed"],
                           early_stopping_rounds=s["early_stopping_rounds"])
        model = fit_gbm(data, config)
    else:
        splitter = Deterministic() if args.model == "rf" else ExtremelyRandomized(s["k"])
        config = ForestConfig(n_trees=s["trees"], max_depth=s["depth"],
                              min_samples_split=s["min_samples_split"],
                              mtry=s["mtry"],
                              bootstrap=s["bootstrap"] if args.model == "rf" else False,
                              splitter=splitter, seed=s["seed"])
        model = fit_forest(data, config)
    save_model(model, args.out)
    _log(f"trained {args.model} on {data.n_examples} rows "
         f"({data.n_features} features); wrote {args.out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    header, features = load_matrix_csv(args.data)
    if args.target is not None and args.target in header:
        keep = [i for i, name in enumerate(header) if name != args.target]
        features = features[:, keep]
    if features.shape[1] != model.n_features:
        raise DatasetError(f"model expects {model.n_features} features, "
                           f"data has {features.shape[1]}")
    preds = model.predict(features)
    lines = "prediction\n" + "".join(f"{float(p)!r}\n" for p in preds)
    if args.out == "-":
        sys.stdout.write(lines)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(lines)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    for model in models:
        if model not in MODEL_KINDS:
            raise DatasetError(f"unknown model {model!r}; choose from {MODEL_KINDS}")
    grid = _resolve_grid(args.grid)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_specs = [d.strip() for d in args.datasets.split(",") if d.strip()]
    data_rng = SeededRng(args.seed)
    datasets = []
    for spec in dataset_specs:
        child = data_rng.split(1)[0]
        if spec in BENCHMARK_DATASETS:
            datasets.append((spec, _named_dataset(spec, child, args.n, args.m,
                                                  args.noise_sd)))
        else:
            if args.target is None:
                raise DatasetError(f"loading {spec!r} needs --target")
            datasets.append((Path(spec).stem, load_csv(spec, args.target)))

    def progress(kind, params, repeat, err):
        _log(f"benchmark: model={kind} repeat={repeat} mse={err:.6g} "
             f"params={params}")

    reports: dict[str, dict] = {}
    for ds_name, data in datasets:
        reports[ds_name] = {}
        for model in models:
            _log(f"benchmark: dataset={ds_name} model={model} "
                 f"repeats={args.repeats} backend={backend_name}")
            report = run_protocol(data, model, grid, args.repeats, args.seed,
                                  mode=args.mode, n_threads=args.threads,
                                  progress=progress if args.verbose else None)
            reports[ds_name][model] = report
            write_report_csv(report,
                             out_dir / f"{ds_name}_{model}_repeats.csv")
            _log(f"benchmark: dataset={ds_name} model={model} "
                 f"mean_mse={report.mean_mse:.6g} chosen={report.chosen_hyperparams}")
    names = [ds for ds, _ in datasets]
    write_summary_csv(reports, names, models, out_dir / "summary.csv")
    if args.times:
        write_times_csv(reports, names, models, out_dir / "times.csv")
    return EXIT_OK


_GBM_VARIANTS = {
    "deterministic": Deterministic,
    "extremely_randomized": lambda: ExtremelyRandomized(1),
    "partially_randomized": PartiallyRandomized,
}


def _fit_gbm_variants(names, train, depth, stages, learning_rate, rng):
    rngs = dict(zip(_GBM_VARIANTS, rng.split(len(_GBM_VARIANTS))))
    models = {}
    for name in names:
        config = GbmConfig(n_stages=stages, learning_rate=learning_rate,
                           max_depth=depth, splitter=_GBM_VARIANTS[name]())
        models[name] = fit_gbm(train, config, rngs[name])
    return models


def cmd_figures(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = SeededRng(args.seed)
    if args.which == "fig3":
        return _figures_one_dim(args, out_dir, rng)
    if args.which == "fig4":
        return _figures_cross_data(args, out_dir, rng)
    return _figures_cross_predictions(args, out_dir, rng)


def _figures_one_dim(args, out_dir, rng) -> int:
    n = args.n or 100
    noise_sd = 0.0 if args.noise_sd is None else args.noise_sd
    gaps = _parse_gaps(args.gaps) if args.gaps else [(0.45, 0.55)]
    depth = args.depth or 5
    stages = args.stages or 100
    data_rng, fit_rng = rng.split(2)
    train = make_one_dim_dataset(n, data_rng, noise_sd, gaps)
    save_csv(train, out_dir / "fig3_train.csv")
    models = _fit_gbm_variants(("deterministic", "partially_randomized"),
                               train, depth, stages, args.learning_rate,
                               fit_rng)
    coords = GridSpec(0.0, 1.0, args.points or 200).coordinates()
    for name in ("deterministic", "partially_randomized"):
        preds = models[name].predict(coords[:, None])
        with open(out_dir / f"fig3_pred_{name}.csv", "w", newline="\n") as fh:
            fh.write("x,prediction\n")
            for x, p in zip(coords, preds):
                fh.write(f"{float(x)!r},{float(p)!r}\n")
    _write_meta(out_dir / "fig3_meta.json", {
        "n_train": n, "noise_sd": noise_sd, "gaps": gaps, "max_depth": depth,
        "n_stages": stages, "learning_rate": args.learning_rate,
        "grid_points": args.points or 200, "seed": args.seed,
    })
    return EXIT_OK


def _figures_cross_data(args, out_dir, rng) -> int:
    points = args.points or 100
    grid = GridSpec(points_per_axis=points)
    train, full = make_two_dim_cross_dataset(grid, rng, args.cross_width)
    write_pgm(out_dir / "fig4_function.pgm",
              values_to_image(full.targets, points))
    mask = cross_mask(grid, args.cross_width)
    write_pgm(out_dir / "fig4_cross.pgm",
              values_to_image(mask.astype(float), points))
    save_csv(train, out_dir / "fig4_train.csv")
    _write_meta(out_dir / "fig4_meta.json", {
        "points_per_axis": points, "cross_arm_width": args.cross_width,
        "n_train": train.n_examples, "seed": args.seed,
    })
    return EXIT_OK


def _figures_cross_predictions(args, out_dir, rng) -> int:
    points = args.points or 100
    depth = args.depth or 9
    stages = args.stages or 1000
    grid = GridSpec(points_per_axis=points)
    data_rng, fit_rng = rng.split(2)
    train, full = make_two_dim_cross_dataset(grid, data_rng, args.cross_width)
    models = _fit_gbm_variants(tuple(_GBM_VARIANTS), train, depth, stages,
                               args.learning_rate, fit_rng)
    mask = cross_mask(grid, args.cross_width)
    cross_mse = {}
    for name, model in models.items():
        preds = model.predict(full.features)
        write_pgm(out_dir / f"fig5_pred_{name}.pgm",
                  values_to_image(preds, points))
        cross_mse[name] = mse(preds[mask], full.targets[mask])
        _log(f"figures: fig5 {name}: cross-region mse={cross_mse[name]:.6g}")
    _write_meta(out_dir / "fig5_meta.json", {
        "points_per_axis": points, "cross_arm_width": args.cross_width,
        "max_depth": depth, "n_stages": stages,
        "learning_rate": args.learning_rate, "cross_region_mse": cross_mse,
        "n_train": train.n_examples, "seed": args.seed,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prgbm",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a synthetic dataset as CSV")
    p.add_argument("generator", choices=GENERATORS)
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.add_argument("--n", type=int, default=None, help="number of examples")
    p.add_argument("--m", type=int, default=None,
                   help="number of features (linear generator)")
    p.add_argument("--noise-sd", type=float, default=None,
                   help="noise standard deviation (default 1; friedman3 0.1; "
                        "demo generators 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gaps", default="",
                   help="coverage gaps lo:hi[,lo:hi...] for one_dim")
    p.add_argument("--points", type=int, default=100,
                   help="grid points per axis for cross")
    p.add_argument("--cross-width", type=float, default=0.2,
                   help="cross arm width as a fraction of the side")
    p.add_argument("--grid-out", default=None,
                   help="also write the full grid CSV (cross)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="fit a model on a CSV and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True, help="target column name or index")
    p.add_argument("--model", required=True,
                   choices=("gbm", "prgbm", "ert_gbm", "rf", "ert"))
    p.add_argument("--out", required=True, help="model file path")
    p.add_argument("--config", default=None,
                   help="key = value settings file; flags override it")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float,
                   default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--min-samples-split", dest="min_samples_split", type=int,
                   default=None)
    p.add_argument("--k", type=int, default=None,
                   help="candidate splits per node (ert models)")
    p.add_argument("--trees", type=int, default=None)
    p.add_argument("--mtry", type=int, default=None)
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--early-stopping-rounds", dest="early_stopping_rounds",
                   type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--target", default=None,
                   help="target column to drop if present")
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark",
                       help="repeated-split comparison of models on datasets")
    p.add_argument("--datasets", required=True,
                   help=f"comma list: {','.join(BENCHMARK_DATASETS)} or CSV paths")
    p.add_argument("--models", required=True,
                   help=f"comma list from: {','.join(MODEL_KINDS)}")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default="default",
                   help="grid preset (default, quick) or settings file")
    p.add_argument("--mode", choices=("paper", "nested"), default="paper")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--times", action="store_true",
                   help="also write wall-clock times.csv (not byte-stable)")
    p.add_argument("--verbose", action="store_true",
                   help="log one line per repeat")
    p.add_argument("--n", type=int, default=None,
                   help="rows for synthetic datasets")
    p.add_argument("--m", type=int, default=None,
                   help="features for the linear dataset")
    p.add_argument("--noise-sd", type=float, default=None)
    p.add_argument("--target", default=None, help="target column for CSV datasets")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("figures", help="emit figure data (CSV/PGM + metadata)")
    p.add_argument("which", choices=("fig3", "fig4", "fig5"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float,
                   default=0.1)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--noise-sd", type=float, default=None)
    p.add_argument("--gaps", default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--cross-width", type=float, default=0.2)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DatasetError as exc:
        _fail("data", exc)
        return EXIT_DATA
    except json.JSONDecodeError as exc:
        _fail("data", exc)
        return EXIT_DATA
    except NumericError as exc:
        _fail("numeric", exc)
        return EXIT_NUMERIC
    except ValueError as exc:
        _fail("numeric", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        _fail("io", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
