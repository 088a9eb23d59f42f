import math

import numpy as np
import pytest

from prgbm import (DatasetError, GridSpec, SeededRng, cross_mask, grid_points,
                   make_friedman, make_linear_regression, make_one_dim_dataset,
                   make_sparse_uncorrelated, make_two_dim_cross_dataset,
                   one_dim_function, two_dim_function, write_pgm)
from prgbm.synth import values_to_image


def test_one_dim_function_values():
    assert one_dim_function(0.0) == 0.0
    assert one_dim_function(1.0) == 1.0
    # boundary belongs to the sine branch
    assert one_dim_function(0.5) == pytest.approx(math.sin(2.5))
    assert math.sin(2.5) == pytest.approx(0.5984721441039565)


def test_one_dim_function_vectorized():
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    out = one_dim_function(x)
    assert np.allclose(out[:3], np.sin(5 * x[:3]))
    assert np.allclose(out[3:], x[3:])


def test_two_dim_function_values():
    assert two_dim_function(0.0, 0.0) == pytest.approx(math.sin(10.0))
    assert math.sin(10.0) == pytest.approx(-0.5440211108893698)


def test_two_dim_function_bounded():
    rng = SeededRng(0)
    x = rng.random(1000) * 10 - 5
    y = rng.random(1000) * 4 - 2
    out = two_dim_function(x, y)
    assert np.all((out >= -1.0) & (out <= 1.0))


def test_two_dim_function_periodic_in_x():
    rng = SeededRng(1)
    x = rng.random(100)
    y = rng.random(100)
    assert np.allclose(two_dim_function(x + np.pi / 5.0, y),
                       two_dim_function(x, y), atol=1e-9)


def test_one_dim_dataset_plain_coverage():
    d = make_one_dim_dataset(200, SeededRng(3))
    assert d.n_features == 1
    x = d.features[:, 0]
    assert np.all((x >= 0.0) & (x <= 1.0))
    assert np.array_equal(d.targets, one_dim_function(x))  # zero noise default


def test_one_dim_dataset_respects_gaps():
    d = make_one_dim_dataset(500, SeededRng(4), coverage_gaps=[(0.45, 0.55)])
    x = d.features[:, 0]
    assert not np.any((x > 0.45) & (x < 0.55))


def test_one_dim_dataset_gap_validation():
    rng = SeededRng(0)
    with pytest.raises(DatasetError):
        make_one_dim_dataset(10, rng, coverage_gaps=[(0.0, 1.0)])
    with pytest.raises(ValueError):
        make_one_dim_dataset(10, rng, coverage_gaps=[(0.2, 0.5), (0.4, 0.6)])
    with pytest.raises(ValueError):
        make_one_dim_dataset(10, rng, coverage_gaps=[(-0.1, 0.5)])


def _friedman1_formula(X):
    return (10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
            + 20.0 * (X[:, 2] - 0.5) ** 2 + 10.0 * X[:, 3] + 5.0 * X[:, 4])


def test_friedman1_hand_value():
    X = np.full((1, 10), 0.5)
    # 10*sin(pi/4) + 0 + 5 + 2.5
    assert _friedman1_formula(X)[0] == pytest.approx(14.571067811865476)


def test_friedman_shapes_match_benchmark_table():
    rng = SeededRng(0)
    assert make_friedman(1, 100, rng).features.shape == (100, 10)
    assert make_friedman(2, 100, rng).features.shape == (100, 4)
    assert make_friedman(3, 100, rng).features.shape == (100, 4)
    with pytest.raises(ValueError):
        make_friedman(4, 100, rng)


def test_friedman1_noiseless_matches_formula_exactly():
    d = make_friedman(1, 10_000, SeededRng(17), noise_sd=0.0)
    assert np.all(np.abs(d.targets - _friedman1_formula(d.features)) == 0.0)


def test_friedman2_3_input_ranges_and_formulas():
    d2 = make_friedman(2, 2000, SeededRng(8), noise_sd=0.0)
    X = d2.features
    assert np.all((X[:, 0] >= 0) & (X[:, 0] <= 100))
    assert np.all((X[:, 1] >= 40 * np.pi) & (X[:, 1] <= 560 * np.pi))
    assert np.all((X[:, 2] >= 0) & (X[:, 2] <= 1))
    assert np.all((X[:, 3] >= 1) & (X[:, 3] <= 11))
    inner = X[:, 1] * X[:, 2] - 1.0 / (X[:, 1] * X[:, 3])
    assert np.allclose(d2.targets, np.sqrt(X[:, 0] ** 2 + inner ** 2))

    d3 = make_friedman(3, 2000, SeededRng(9), noise_sd=0.0)
    X = d3.features
    inner = X[:, 1] * X[:, 2] - 1.0 / (X[:, 1] * X[:, 3])
    assert np.allclose(d3.targets, np.arctan(inner / X[:, 0]))


def test_sparse_uncorrelated():
    d = make_sparse_uncorrelated(100, SeededRng(5), noise_sd=0.0)
    assert d.features.shape == (100, 10)
    X = d.features
    assert np.allclose(d.targets,
                       X[:, 0] + 2 * X[:, 1] - 2 * X[:, 2] - 1.5 * X[:, 3])


def test_sparse_basis_vector_oracle():
    # formula at e1 gives exactly the first coefficient
    e1 = np.zeros(10)
    e1[0] = 1.0
    assert e1[0] + 2 * e1[1] - 2 * e1[2] - 1.5 * e1[3] == 1.0


def test_linear_regression_shape_and_determinism():
    a = make_linear_regression(100, 100, SeededRng(6))
    b = make_linear_regression(100, 100, SeededRng(6))
    assert a.features.shape == (100, 100)
    assert a == b


def test_generators_deterministic_given_seed():
    for maker in (lambda r: make_friedman(1, 50, r),
                  lambda r: make_sparse_uncorrelated(50, r),
                  lambda r: make_one_dim_dataset(50, r, 0.1, [(0.3, 0.4)])):
        assert maker(SeededRng(77)) == maker(SeededRng(77))


def test_cross_dataset_sizes():
    train, full = make_two_dim_cross_dataset(GridSpec(), SeededRng(2))
    assert full.n_examples == 100 * 100
    mask = cross_mask(GridSpec())
    assert mask.sum() == 3600  # two 20x100 arms overlapping in a 20x20 core
    assert train.n_examples == (10_000 - 3600) // 2


def test_cross_train_points_avoid_mask():
    grid = GridSpec()
    train, full = make_two_dim_cross_dataset(grid, SeededRng(3))
    mask = cross_mask(grid)
    masked_pts = {tuple(p) for p in full.features[mask]}
    for p in train.features:
        assert tuple(p) not in masked_pts


def test_cross_mask_rotation_symmetry():
    grid = GridSpec(points_per_axis=101)
    img = cross_mask(grid).reshape(101, 101)
    rotated = np.rot90(img)
    assert np.array_equal(img, rotated)


def test_grid_points_enumeration_order():
    grid = GridSpec(0.0, 1.0, 3)
    pts = grid_points(grid)
    # x varies fastest
    assert np.allclose(pts[:3, 0], [0.0, 0.5, 1.0])
    assert np.allclose(pts[:3, 1], [0.0, 0.0, 0.0])
    assert np.allclose(pts[3, :], [0.0, 0.5])


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, 1)


def test_write_pgm(tmp_path):
    img = np.array([[0.0, 1.0], [2.0, 3.0]])
    path = tmp_path / "img.pgm"
    write_pgm(path, img)
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n2 2\n255\n")
    assert raw[-4:] == bytes([0, 85, 170, 255])


def test_write_pgm_constant_image(tmp_path):
    path = tmp_path / "flat.pgm"
    write_pgm(path, np.full((3, 3), 7.0))
    assert path.read_bytes().endswith(bytes(9))


def test_values_to_image_flips_y():
    vals = np.arange(9.0)  # rows y=0,0.5,1 with x fastest
    img = values_to_image(vals, 3)
    assert np.array_equal(img[2], [0.0, 1.0, 2.0])  # bottom row is y=0
    assert np.array_equal(img[0], [6.0, 7.0, 8.0])
