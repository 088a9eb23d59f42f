import numpy as np
import pytest

from prgbm import (Dataset, DatasetError, SeededRng, load_csv, save_csv,
                   split_train_test, uniform)
from prgbm.dataset import load_matrix_csv


def test_dataset_construction_and_shape():
    d = Dataset([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], [1.0, 2.0, 3.0])
    assert d.n_examples == 3
    assert d.n_features == 2
    assert d.effective_feature_names() == ["x1", "x2"]


@pytest.mark.parametrize("features,targets", [
    ([[1.0, np.nan]], [1.0]),
    ([[1.0, 2.0]], [np.inf]),
    ([[1.0]], [1.0, 2.0]),
    (np.empty((0, 2)), []),
])
def test_dataset_rejects_bad_input(features, targets):
    with pytest.raises(DatasetError):
        Dataset(features, targets)


def test_dataset_is_immutable():
    d = Dataset([[1.0]], [2.0])
    with pytest.raises(ValueError):
        d.features[0, 0] = 9.0
    with pytest.raises(AttributeError):
        d.features = None


def test_load_csv_basic(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    d = load_csv(path, "y")
    assert d.n_examples == 3
    assert d.n_features == 2
    assert d.feature_names == ["a", "b"]
    assert np.array_equal(d.targets, [3.0, 6.0, 9.0])


def test_load_csv_target_by_index(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("a,b,c\n1,2,3\n")
    d = load_csv(path, 1)
    assert d.feature_names == ["a", "c"]
    assert d.targets[0] == 2.0


def test_load_csv_nan_cell_names_row_and_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,y\n1,2\nNaN,4\n")
    with pytest.raises(DatasetError, match=r"line 3.*'a'"):
        load_csv(path, "y")


def test_load_csv_unparseable_cell(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,y\n1,hello\n")
    with pytest.raises(DatasetError, match=r"'hello'.*line 2.*'y'"):
        load_csv(path, "y")


def test_load_csv_missing_target(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DatasetError, match="not found"):
        load_csv(path, "z")


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_csv(tmp_path / "nope.csv", "y")


def test_load_csv_duplicate_header(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("a,a\n1,2\n")
    with pytest.raises(DatasetError, match="duplicate"):
        load_csv(path, "a")


def test_load_matrix_csv(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("p,q\n0.25,2\n1,3\n")
    header, mat = load_matrix_csv(path)
    assert header == ["p", "q"]
    assert np.array_equal(mat, [[0.25, 2.0], [1.0, 3.0]])


def test_csv_round_trip_is_exact(tmp_path):
    rng = SeededRng(123)
    for case in range(20):
        n = int(rng.integers(1, 40))
        m = int(rng.integers(1, 6))
        # mix of awkward magnitudes to stress the float formatting
        scale = 10.0 ** rng.integers(-12, 12)
        d = Dataset(rng.normal(size=(n, m)) * scale, rng.normal(size=n),
                    [f"c{j}" for j in range(m)])
        path = tmp_path / f"rt{case}.csv"
        save_csv(d, path)
        assert load_csv(path, "y") == d


def test_save_csv_rejects_name_collision(tmp_path):
    d = Dataset([[1.0]], [2.0], ["y"])
    with pytest.raises(DatasetError, match="collides"):
        save_csv(d, tmp_path / "x.csv", target_name="y")


def test_split_sizes_n8():
    d = Dataset(np.arange(8.0)[:, None], np.arange(8.0))
    sp = split_train_test(d, SeededRng(0))
    assert sp.train.n_examples == 6
    assert sp.test.n_examples == 2


def test_split_sizes_diabetes_shape():
    # n=442 -> floor(3n/4)=331 train, 111 test
    d = Dataset(np.arange(442.0)[:, None], np.zeros(442) + 1.0)
    sp = split_train_test(d, SeededRng(5))
    assert sp.train.n_examples == 331
    assert sp.test.n_examples == 111


def test_split_is_partition():
    n = 23
    d = Dataset(np.arange(float(n))[:, None], np.arange(float(n)))
    sp = split_train_test(d, SeededRng(9))
    seen = np.concatenate([sp.train.features[:, 0], sp.test.features[:, 0]])
    assert sorted(seen) == list(range(n))


def test_split_determinism():
    d = Dataset(np.arange(40.0)[:, None], np.arange(40.0))
    a = split_train_test(d, SeededRng(7))
    b = split_train_test(d, SeededRng(7))
    assert a.train == b.train
    assert a.test == b.test


def test_split_requires_four_rows():
    d = Dataset([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0])
    with pytest.raises(DatasetError):
        split_train_test(d, SeededRng(0))


def test_split_test_frequency_is_uniform():
    n = 12
    d = Dataset(np.arange(float(n))[:, None], np.zeros(n))
    counts = np.zeros(n)
    rng = SeededRng(2024)
    repeats = 1000
    for _ in range(repeats):
        sp = split_train_test(d, rng)
        for v in sp.test.features[:, 0]:
            counts[int(v)] += 1
    expectation = (n - (3 * n) // 4) / n
    assert np.all(np.abs(counts / repeats - expectation) < 0.05)


def test_uniform_range_and_mean():
    rng = SeededRng(1)
    draws = np.array([uniform(rng, 0.0, 1.0) for _ in range(2000)])
    assert np.all((draws >= 0.0) & (draws < 1.0))
    big = rng.random(100_000)
    assert abs(big.mean() - 0.5) < 0.01


def test_uniform_rejects_degenerate_interval():
    rng = SeededRng(1)
    with pytest.raises(ValueError):
        uniform(rng, 2.0, 2.0)
    with pytest.raises(ValueError):
        uniform(rng, 3.0, 1.0)
    with pytest.raises(ValueError):
        uniform(rng, 0.0, np.inf)


def test_seeded_rng_same_seed_same_stream():
    a = SeededRng(99).random(10_000)
    b = SeededRng(99).random(10_000)
    assert np.array_equal(a, b)


def test_seeded_rng_split_is_stable():
    parent = SeededRng(4)
    children = parent.split(3)
    # later parent draws must not disturb what the children produce
    parent.random(1000)
    fresh = SeededRng(4).split(3)
    for c, f in zip(children, fresh):
        assert np.array_equal(c.random(100), f.random(100))


def test_seeded_rng_children_differ_from_parent():
    parent = SeededRng(4)
    child = parent.split(1)[0]
    assert not np.array_equal(parent.random(50), child.random(50))
