"""Synthetic stand-ins for the KEEL benchmark datasets used by the suite.

The real repository files are not bundled, so each entry is generated as a
two-class Gaussian problem with the benchmark's instance and feature
counts. Centroid separation is fixed high enough that a nearest-neighbor
probe can recover the classes, which is all the suite needs from these
datasets. Generation is deterministic per dataset name.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

import numpy as np

from mdenc.data import Dataset

# name -> (n_instances, n_features)
BENCHMARK_SHAPES = {
    "australian": (690, 14),
    "banknote": (1372, 4),
    "breastcan": (683, 9),
    "breastcancoimbra": (116, 9),
    "bupa": (345, 6),
    "cryotherapy": (90, 6),
    "german": (1000, 24),
    "haberman": (306, 3),
    "heart": (270, 13),
    "ionosphere": (351, 34),
    "liver": (345, 6),
    "mammographic": (830, 5),
    "monk-2": (432, 6),
    "monkone": (556, 6),
    "phoneme": (5404, 5),
    "pima": (768, 8),
    "ring": (7400, 20),
    "sonar": (208, 60),
    "spambase": (4601, 57),
    "titanic": (2201, 3),
    "twonorm": (7400, 20),
    "wisconsin": (699, 9),
}

DEFAULT_SEPARATION = 4.0


def stable_seed(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:4], "big")


def make_benchmark_dataset(name: str, separation: float = DEFAULT_SEPARATION) -> Dataset:
    """Two unit-variance Gaussian clusters at the given centroid separation,
    shaped like the named benchmark dataset."""
    n_samples, n_features = BENCHMARK_SHAPES[name]
    rng = np.random.default_rng(np.random.SeedSequence(stable_seed(name)))
    corner = rng.integers(0, 2, size=n_features).astype(np.float64)
    direction = 1.0 - 2.0 * corner
    centroids = np.stack(
        [corner, corner + separation * direction / math.sqrt(n_features)]
    )
    n_second = n_samples // 2
    y = np.zeros(n_samples, dtype=np.int64)
    y[n_samples - n_second:] = 1
    X = centroids[y] + rng.standard_normal((n_samples, n_features))
    perm = rng.permutation(n_samples)
    return Dataset(
        name,
        X[perm],
        y[perm],
        tuple(f"f{i}" for i in range(n_features)),
        ("0", "1"),
    )


# ---------------------------------------------------------------------------
# Reference balanced-accuracy matrix (22 benchmark datasets x 5 methods) used
# as the regression fixture for mean_ranks, together with the mean-rank
# summary row that accompanies it. Scores are displayed at 3 decimals, which
# collapses four pairs into ties (german RETIRE/XGB, monkone STML/RETIRE,
# spambase STML/RETIRE, twonorm DI/RETIRE). The summary row is only
# consistent with the matrix when three of those pairs keep their
# sub-display-precision ordering: german XGB > RETIRE, spambase
# STML > RETIRE, twonorm RETIRE > DI (monkone is a true 1.000/1.000 tie).
# TIE_RESOLVED_BAC_MATRIX encodes those three orderings with a bump well
# below the displayed precision.

REFERENCE_METHODS = ("stml", "igtd", "di", "retire", "xgb")

REFERENCE_DATASETS = (
    "australian", "banknote", "breastcan", "breastcancoimbra", "bupa",
    "cryotherapy", "german", "haberman", "heart", "ionosphere", "liver",
    "mammographic", "monk-2", "monkone", "phoneme", "pima", "ring", "sonar",
    "spambase", "titanic", "twonorm", "wisconsin",
)

REFERENCE_BAC_MATRIX = np.array([
    [0.646, 0.650, 0.846, 0.829, 0.861],
    [0.986, 0.962, 0.918, 0.999, 0.994],
    [0.962, 0.880, 0.965, 0.966, 0.957],
    [0.594, 0.531, 0.593, 0.664, 0.703],
    [0.619, 0.502, 0.638, 0.631, 0.664],
    [0.846, 0.664, 0.599, 0.895, 0.857],
    [0.631, 0.525, 0.630, 0.671, 0.671],
    [0.574, 0.518, 0.599, 0.570, 0.586],
    [0.737, 0.676, 0.735, 0.793, 0.790],
    [0.843, 0.770, 0.889, 0.937, 0.897],
    [0.621, 0.490, 0.614, 0.631, 0.672],
    [0.811, 0.727, 0.747, 0.793, 0.802],
    [0.993, 0.672, 0.778, 0.995, 0.990],
    [1.000, 0.536, 0.743, 1.000, 0.999],
    [0.766, 0.515, 0.764, 0.840, 0.854],
    [0.655, 0.555, 0.679, 0.690, 0.706],
    [0.952, 0.899, 0.643, 0.961, 0.964],
    [0.546, 0.605, 0.796, 0.832, 0.807],
    [0.927, 0.538, 0.931, 0.927, 0.945],
    [0.694, 0.560, 0.682, 0.692, 0.684],
    [0.958, 0.947, 0.968, 0.968, 0.966],
    [0.947, 0.834, 0.953, 0.956, 0.945],
])

REFERENCE_MEAN_RANKS = np.array([2.932, 1.227, 2.682, 4.114, 4.045])

TIE_RESOLVED_BAC_MATRIX = REFERENCE_BAC_MATRIX.copy()
_BUMP = 1e-6
TIE_RESOLVED_BAC_MATRIX[6, 4] += _BUMP    # german: xgb above retire
TIE_RESOLVED_BAC_MATRIX[18, 0] += _BUMP   # spambase: stml above retire
TIE_RESOLVED_BAC_MATRIX[20, 3] += _BUMP   # twonorm: retire above di


def write_keel_file(ds: Dataset, path) -> Path:
    """Write a dataset in KEEL ``.dat`` form (all inputs real, nominal
    class output). Floats use repr so reloading is bit-exact."""
    path = Path(path)
    lines = [f"@relation {ds.name}"]
    for j, fname in enumerate(ds.feature_names):
        lo, hi = ds.X[:, j].min(), ds.X[:, j].max()
        lines.append(f"@attribute {fname} real [{lo!r}, {hi!r}]")
    lines.append(f"@attribute class {{{', '.join(ds.class_names)}}}")
    lines.append(f"@inputs {', '.join(ds.feature_names)}")
    lines.append("@outputs class")
    lines.append("@data")
    for row, label in zip(ds.X, ds.y):
        lines.append(", ".join([*(repr(float(v)) for v in row), ds.class_names[label]]))
    path.write_text("\n".join(lines) + "\n")
    return path
