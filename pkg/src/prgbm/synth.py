"""Synthetic regression data generators.

Covers the 1-D piecewise demo function (optionally with coverage gaps), the
2-D sine image with a cut-out cross, the Friedman 1-3 benchmark families,
sparse-uncorrelated data, and a dense linear-regression generator. All
generators are pure functions of (parameters, rng).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, DatasetError, SeededRng

__all__ = [
    "GridSpec",
    "cross_mask",
    "grid_points",
    "make_friedman",
    "make_linear_regression",
    "make_one_dim_dataset",
    "make_sparse_uncorrelated",
    "make_two_dim_cross_dataset",
    "one_dim_function",
    "two_dim_function",
    "write_pgm",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid, one axis (1-D) or both axes (2-D)."""

    lo: float = 0.0
    hi: float = 1.0
    points_per_axis: int = 100

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.points_per_axis < 2:
            raise ValueError("points_per_axis must be at least 2")

    def coordinates(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points_per_axis)


def one_dim_function(x):
    """sin(5x) on x <= 1/2, identity on x > 1/2. Accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(x <= 0.5, np.sin(5.0 * x), x)
    return float(out) if out.ndim == 0 else out


def two_dim_function(x, y):
    """sin(10 * (x + exp(1.1 * y))). Accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out = np.sin(10.0 * (x + np.exp(1.1 * y)))
    return float(out) if out.ndim == 0 else out


def make_one_dim_dataset(n: int, rng: SeededRng, noise_sd: float = 0.0,
                         coverage_gaps=()) -> Dataset:
    """Sample x uniformly on [0,1] minus the gap intervals; y = f(x) + noise.

    ``coverage_gaps`` is a list of disjoint open intervals (lo, hi) inside
    [0, 1] that receive no training points (rejection sampling).
    """
    if n < 1:
        raise ValueError("n must be positive")
    gaps = _validate_gaps(coverage_gaps)
    covered = sum(hi - lo for lo, hi in gaps)
    if covered >= 1.0 - 1e-12:
        raise DatasetError("coverage gaps exclude all of [0, 1]")
    xs = np.empty(0)
    while xs.size < n:
        batch = rng.random(max(2 * n, 64))
        for lo, hi in gaps:
            batch = batch[(batch <= lo) | (batch >= hi)]
        xs = np.concatenate([xs, batch])
    xs = xs[:n]
    noise = rng.normal(0.0, noise_sd, n)
    return Dataset(xs[:, None], one_dim_function(xs) + noise, ["x1"])


def _validate_gaps(coverage_gaps):
    gaps = sorted((float(lo), float(hi)) for lo, hi in coverage_gaps)
    prev_hi = -np.inf
    for lo, hi in gaps:
        if not (0.0 <= lo < hi <= 1.0):
            raise ValueError(f"gap ({lo}, {hi}) is not a sub-interval of [0, 1]")
        if lo < prev_hi:
            raise ValueError("coverage gaps must be disjoint")
        prev_hi = hi
    return gaps


def grid_points(grid: GridSpec) -> np.ndarray:
    """All (x, y) pairs of the square grid, x varying fastest."""
    c = grid.coordinates()
    xx, yy = np.meshgrid(c, c)
    return np.column_stack([xx.ravel(), yy.ravel()])


def cross_mask(grid: GridSpec, arm_width: float = 0.2) -> np.ndarray:
    """Boolean mask (aligned with grid_points) of a centered plus shape.

    Each arm spans the full image; ``arm_width`` is the arm thickness as a
    fraction of the side length. The shape is symmetric in x and y, so it is
    invariant under 90-degree grid rotation.
    """
    if not 0.0 < arm_width < 1.0:
        raise ValueError("arm_width must be a fraction in (0, 1)")
    pts = grid_points(grid)
    center = (grid.lo + grid.hi) / 2.0
    half = arm_width * (grid.hi - grid.lo) / 2.0
    return (np.abs(pts[:, 0] - center) <= half) | (np.abs(pts[:, 1] - center) <= half)


def make_two_dim_cross_dataset(grid: GridSpec, rng: SeededRng,
                               arm_width: float = 0.2) -> tuple[Dataset, Dataset]:
    """Training set and full grid for the cut-cross image benchmark.

    The full grid holds every grid point with the true function value. The
    training set removes the points under the cross mask, then keeps a
    uniformly chosen half (rounded down) of the remainder.
    """
    pts = grid_points(grid)
    values = two_dim_function(pts[:, 0], pts[:, 1])
    names = ["x1", "x2"]
    full_grid = Dataset(pts, values, names)
    keep = np.nonzero(~cross_mask(grid, arm_width))[0]
    perm = rng.permutation(keep.size)
    chosen = np.sort(keep[perm[: keep.size // 2]])
    train = Dataset(pts[chosen], values[chosen], names)
    return train, full_grid


def make_friedman(which: int, n: int, rng: SeededRng, noise_sd: float = 1.0) -> Dataset:
    """Friedman benchmark family 1, 2, or 3 with Normal(0, noise_sd) noise.

    Friedman 1: 10 features uniform on [0,1], five informative.
    Friedman 2/3: 4 features on the standard ranges x1 in [0,100],
    x2 in [40*pi, 560*pi], x3 in [0,1], x4 in [1,11].
    """
    if n < 1:
        raise ValueError("n must be positive")
    if which == 1:
        X = rng.random((n, 10))
        y = (10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
             + 20.0 * (X[:, 2] - 0.5) ** 2
             + 10.0 * X[:, 3] + 5.0 * X[:, 4])
    elif which in (2, 3):
        u = rng.random((n, 4))
        X = np.column_stack([
            100.0 * u[:, 0],
            40.0 * np.pi + (560.0 - 40.0) * np.pi * u[:, 1],
            u[:, 2],
            1.0 + 10.0 * u[:, 3],
        ])
        inner = X[:, 1] * X[:, 2] - 1.0 / (X[:, 1] * X[:, 3])
        if which == 2:
            y = np.sqrt(X[:, 0] ** 2 + inner ** 2)
        else:
            y = np.arctan(inner / X[:, 0])
    else:
        raise ValueError(f"which must be 1, 2 or 3, got {which}")
    y = y + rng.normal(0.0, noise_sd, n)
    return Dataset(X, y)


def make_sparse_uncorrelated(n: int, rng: SeededRng, noise_sd: float = 1.0) -> Dataset:
    """10 standard-normal features; only the first four drive the target."""
    if n < 1:
        raise ValueError("n must be positive")
    X = rng.normal(size=(n, 10))
    y = X[:, 0] + 2.0 * X[:, 1] - 2.0 * X[:, 2] - 1.5 * X[:, 3]
    y = y + rng.normal(0.0, noise_sd, n)
    return Dataset(X, y)


def make_linear_regression(n: int, m: int, rng: SeededRng,
                           noise_sd: float = 1.0) -> Dataset:
    """Dense linear target y = <w, x> + noise, w drawn once per dataset."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    X = rng.normal(size=(n, m))
    w = rng.normal(size=m)
    y = X @ w + rng.normal(0.0, noise_sd, n)
    return Dataset(X, y)


def values_to_image(values: np.ndarray, points_per_axis: int) -> np.ndarray:
    """Reshape grid-ordered values into an image (top row = largest y)."""
    img = np.asarray(values, dtype=np.float64).reshape(points_per_axis,
                                                       points_per_axis)
    return img[::-1]


def write_pgm(path, image: np.ndarray) -> None:
    """Write a 2-D array as binary 8-bit PGM, brightness affinely rescaled."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    lo = img.min()
    hi = img.max()
    if hi > lo:
        scaled = (img - lo) / (hi - lo) * 255.0
    else:
        scaled = np.zeros_like(img)
    data = np.rint(scaled).clip(0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
