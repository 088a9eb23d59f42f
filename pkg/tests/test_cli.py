import json

import numpy as np

from prgbm import load_csv, load_model
from prgbm.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    return main(list(argv))


def test_help_exits_zero(capsys):
    assert run("--help") == EXIT_OK
    assert "benchmark" in capsys.readouterr().out


def test_unknown_subcommand_is_usage_error(capsys):
    assert run("transmogrify") == EXIT_USAGE


def test_generate_friedman1(tmp_path):
    out = tmp_path / "f1.csv"
    assert run("generate", "friedman1", "--n", "50", "--seed", "3",
               "--out", str(out)) == EXIT_OK
    d = load_csv(out, "y")
    assert d.n_examples == 50
    assert d.n_features == 10


def test_generate_one_dim_with_gaps(tmp_path):
    out = tmp_path / "d1.csv"
    assert run("generate", "one_dim", "--n", "200", "--gaps", "0.45:0.55",
               "--out", str(out)) == EXIT_OK
    d = load_csv(out, "y")
    x = d.features[:, 0]
    assert not np.any((x > 0.45) & (x < 0.55))


def test_generate_cross_with_grid(tmp_path):
    train = tmp_path / "train.csv"
    grid = tmp_path / "grid.csv"
    assert run("generate", "cross", "--points", "40", "--out", str(train),
               "--grid-out", str(grid)) == EXIT_OK
    assert load_csv(grid, "y").n_examples == 1600
    assert load_csv(train, "y").n_examples < 1600


def test_generate_to_stdout(capsys):
    assert run("generate", "friedman2", "--n", "5", "--out", "-") == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x1,x2,x3,x4,y"
    assert len(lines) == 6


def test_train_predict_round_trip(tmp_path):
    data = tmp_path / "data.csv"
    model_path = tmp_path / "model.json"
    preds_path = tmp_path / "preds.csv"
    assert run("generate", "friedman1", "--n", "60", "--out", str(data)) == EXIT_OK
    assert run("train", "--data", str(data), "--target", "y",
               "--model", "prgbm", "--stages", "20", "--depth", "3",
               "--seed", "5", "--out", str(model_path)) == EXIT_OK
    model = load_model(model_path)
    assert len(model.stages) == 20
    assert run("predict", "--model", str(model_path), "--data", str(data),
               "--target", "y", "--out", str(preds_path)) == EXIT_OK
    lines = preds_path.read_text().splitlines()
    assert lines[0] == "prediction"
    got = np.array([float(v) for v in lines[1:]])
    d = load_csv(data, "y")
    assert np.array_equal(got, model.predict(d.features))


def test_train_forest_and_config_file(tmp_path):
    data = tmp_path / "data.csv"
    run("generate", "sparse", "--n", "40", "--out", str(data))
    config = tmp_path / "settings.cfg"
    config.write_text("trees = 7\ndepth = 4\nseed = 2\n")
    model_path = tmp_path / "rf.json"
    assert run("train", "--data", str(data), "--target", "y", "--model", "rf",
               "--config", str(config), "--out", str(model_path)) == EXIT_OK
    model = load_model(model_path)
    assert len(model.trees) == 7
    assert model.config.max_depth == 4


def test_predict_dimension_mismatch_is_data_error(tmp_path):
    data = tmp_path / "data.csv"
    other = tmp_path / "other.csv"
    run("generate", "friedman1", "--n", "30", "--out", str(data))
    run("generate", "friedman2", "--n", "30", "--out", str(other))
    model_path = tmp_path / "m.json"
    run("train", "--data", str(data), "--target", "y", "--model", "gbm",
        "--stages", "5", "--out", str(model_path))
    assert run("predict", "--model", str(model_path), "--data", str(other),
               "--target", "y", "--out", "-") == EXIT_DATA


def test_missing_file_is_io_error(tmp_path):
    assert run("train", "--data", str(tmp_path / "nope.csv"), "--target", "y",
               "--model", "gbm", "--out", str(tmp_path / "m.json")) == EXIT_IO


def test_bad_cell_is_data_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,y\n1,2\nNaN,3\n")
    assert run("train", "--data", str(bad), "--target", "y", "--model", "gbm",
               "--out", str(tmp_path / "m.json")) == EXIT_DATA


def test_error_messages_are_single_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,y\n1,2\nNaN,3\n")
    run("train", "--data", str(bad), "--target", "y", "--model", "gbm",
        "--out", str(tmp_path / "m.json"))
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    assert err[0].startswith("error: data:")


def test_benchmark_smoke(tmp_path):
    out_dir = tmp_path / "bench"
    assert run("benchmark", "--datasets", "friedman1", "--models",
               "gbm,prgbm", "--repeats", "3", "--seed", "7", "--grid", "quick",
               "--out-dir", str(out_dir)) == EXIT_OK
    summary = (out_dir / "summary.csv").read_text().splitlines()
    assert summary[0] == "dataset,gbm,prgbm"
    assert summary[1].startswith("friedman1,")
    assert (out_dir / "friedman1_gbm_repeats.csv").exists()
    assert (out_dir / "friedman1_prgbm_repeats.csv").exists()
    assert not (out_dir / "times.csv").exists()


def test_benchmark_times_flag(tmp_path):
    out_dir = tmp_path / "bench"
    assert run("benchmark", "--datasets", "friedman1", "--models", "constant",
               "--repeats", "2", "--grid", "quick", "--times",
               "--out-dir", str(out_dir)) == EXIT_OK
    assert (out_dir / "times.csv").exists()


def test_benchmark_csv_dataset(tmp_path):
    data = tmp_path / "mine.csv"
    run("generate", "sparse", "--n", "40", "--out", str(data))
    out_dir = tmp_path / "bench"
    assert run("benchmark", "--datasets", str(data), "--models", "constant",
               "--repeats", "2", "--grid", "quick", "--target", "y",
               "--out-dir", str(out_dir)) == EXIT_OK
    summary = (out_dir / "summary.csv").read_text()
    assert summary.splitlines()[1].startswith("mine,")


def test_benchmark_unknown_model(tmp_path):
    assert run("benchmark", "--datasets", "friedman1", "--models", "zebra",
               "--out-dir", str(tmp_path)) == EXIT_DATA


def test_benchmark_grid_file(tmp_path):
    grid = tmp_path / "grid.cfg"
    grid.write_text(
        "ensemble_size = 5, 10\nlearning_rate = 0.2\nmax_depth = 2\n")
    out_dir = tmp_path / "bench"
    assert run("benchmark", "--datasets", "friedman1", "--models", "gbm",
               "--repeats", "2", "--grid", str(grid),
               "--out-dir", str(out_dir)) == EXIT_OK


def test_figures_fig3(tmp_path):
    out_dir = tmp_path / "figs"
    assert run("figures", "fig3", "--seed", "1", "--stages", "10",
               "--out-dir", str(out_dir)) == EXIT_OK
    train = load_csv(out_dir / "fig3_train.csv", "y")
    assert train.n_features == 1
    for name in ("deterministic", "partially_randomized"):
        lines = (out_dir / f"fig3_pred_{name}.csv").read_text().splitlines()
        assert lines[0] == "x,prediction"
        assert len(lines) == 201
    meta = json.loads((out_dir / "fig3_meta.json").read_text())
    assert meta["max_depth"] == 5
    assert meta["n_stages"] == 10


def test_figures_fig4(tmp_path):
    out_dir = tmp_path / "figs"
    assert run("figures", "fig4", "--points", "30",
               "--out-dir", str(out_dir)) == EXIT_OK
    img = (out_dir / "fig4_function.pgm").read_bytes()
    assert img.startswith(b"P5\n30 30\n255\n")
    assert (out_dir / "fig4_cross.pgm").exists()
    assert load_csv(out_dir / "fig4_train.csv", "y").n_features == 2


def test_figures_fig5_small(tmp_path):
    out_dir = tmp_path / "figs"
    assert run("figures", "fig5", "--points", "20", "--stages", "15",
               "--depth", "4", "--out-dir", str(out_dir)) == EXIT_OK
    for name in ("deterministic", "extremely_randomized",
                 "partially_randomized"):
        img = (out_dir / f"fig5_pred_{name}.pgm").read_bytes()
        assert img.startswith(b"P5\n20 20\n255\n")
    meta = json.loads((out_dir / "fig5_meta.json").read_text())
    assert set(meta["cross_region_mse"]) == {"deterministic",
                                             "extremely_randomized",
                                             "partially_randomized"}


def test_figures_fig5_default_setup(tmp_path):
    # full-size run: three 1000-stage depth-9 fits, takes ~30s
    out_dir = tmp_path / "figs"
    assert run("figures", "fig5", "--seed", "1",
               "--out-dir", str(out_dir)) == EXIT_OK
    for name in ("deterministic", "extremely_randomized",
                 "partially_randomized"):
        img = (out_dir / f"fig5_pred_{name}.pgm").read_bytes()
        assert img.startswith(b"P5\n100 100\n255\n")
        assert len(img) == len(b"P5\n100 100\n255\n") + 100 * 100
    meta = json.loads((out_dir / "fig5_meta.json").read_text())
    assert meta["n_stages"] == 1000
    assert meta["max_depth"] == 9
    assert meta["points_per_axis"] == 100


def test_outputs_byte_identical_across_reruns(tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert run("benchmark", "--datasets", "friedman1", "--models",
                   "gbm,prgbm", "--repeats", "3", "--seed", "11",
                   "--grid", "quick", "--out-dir", str(d)) == EXIT_OK
    for name in ("summary.csv", "friedman1_gbm_repeats.csv",
                 "friedman1_prgbm_repeats.csv"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
