"""The three tabular-to-image encoders behind one fit/encode surface.

* ``retire`` — scales each sample into guard bounds and rasterizes it as a
  binarized radar silhouette plus a border polygon marking radius 1.0.
* ``stml`` — writes each raw feature value as bitmap-font text into its
  cell of a near-square grid.
* ``igtd`` — assigns features to pixels by matching feature-distance ranks
  against pixel-distance ranks, then emits one grayscale intensity per
  feature (the only non-binarized encoder).

Fitting touches training data only; after fitting, ``encode`` is a pure
function of (model, sample) and may run concurrently across samples.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _font, scaling
from ._ranking import rank_average
from .data import Dataset
from .errors import CapacityError, FitError, ParameterError, ShapeError, StateError
from .raster import Canvas, PolarLayout, draw_polyline, fill_polygon, polar_layout, polar_vertices

KINDS = ("retire", "stml", "igtd")
DEFAULT_CANVAS = (224, 224)
DEFAULT_IGTD_MAX_ITERS = 1000
DEFAULT_IGTD_PATIENCE = 3


@dataclass(frozen=True)
class GridLayout:
    """Near-square cell grid; feature f occupies cell (f // cols, f % cols)."""

    rows: int
    cols: int
    n: int

    def cell_rect(self, f: int, width: int, height: int) -> tuple[int, int, int, int]:
        """(x0, y0, x1, y1) bounds of feature f's cell; the last row and
        column absorb the integer-division remainder."""
        r, c = divmod(f, self.cols)
        cell_w, cell_h = width // self.cols, height // self.rows
        x0, y0 = c * cell_w, r * cell_h
        x1 = width if c == self.cols - 1 else x0 + cell_w
        y1 = height if r == self.rows - 1 else y0 + cell_h
        return x0, y0, x1, y1


@dataclass(frozen=True)
class IgtdMapping:
    """Feature-to-cell bijection onto the first n cells of a rows x cols
    grid (surplus cells stay blank), with the optimizer's error trace."""

    rows: int
    cols: int
    assignment: np.ndarray
    error_trace: tuple[float, ...]

    def __post_init__(self):
        a = np.ascontiguousarray(self.assignment, dtype=np.int64)
        if a.ndim != 1 or len(set(a.tolist())) != a.size:
            raise ParameterError("assignment must be a permutation vector")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "error_trace", tuple(float(e) for e in self.error_trace))

    @property
    def n(self) -> int:
        return self.assignment.shape[0]


@dataclass(frozen=True)
class EncoderModel:
    """Fitted state of one encoder: kind tag, canvas size (width, height),
    scaler (None for stml) and the kind-specific layout."""

    kind: str
    canvas_size: tuple[int, int]
    scaler: scaling.ScalerParams | None
    layout: PolarLayout | GridLayout | IgtdMapping


def _require_kind(model, kind: str) -> None:
    if not isinstance(model, EncoderModel) or model.kind != kind or model.layout is None:
        raise StateError(f"model is not a fitted {kind} encoder")


def _as_vector(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise ShapeError(f"expected a feature vector of length {n}, got shape {x.shape}")
    return x


# ---------------------------------------------------------------------------
# retire

def fit_retire(ds_train: Dataset, l: float = scaling.DEFAULT_L,
               u: float = scaling.DEFAULT_U,
               size: tuple[int, int] = DEFAULT_CANVAS) -> EncoderModel:
    """Fit the guard-bound scaler on the training fold and fix the polar
    geometry (one vertex per feature, margin 4 px)."""
    scaler = scaling.fit(ds_train.X, l, u)
    layout = polar_layout(size[0], size[1], ds_train.n_features)
    return EncoderModel("retire", (int(size[0]), int(size[1])), scaler, layout)


def encode_retire(model: EncoderModel, x) -> Canvas:
    """Binarized radar silhouette of one sample plus the radius-1.0 border."""
    _require_kind(model, "retire")
    scaled = scaling.transform(model.scaler, _as_vector(x, model.layout.n))
    c = Canvas(*model.canvas_size)
    verts = polar_vertices(model.layout, scaled)
    if model.layout.n >= 3:
        fill_polygon(c, verts)
    else:
        draw_polyline(c, verts)  # single point or chord
    border = polar_vertices(model.layout, np.ones(model.layout.n))
    draw_polyline(c, border, closed=model.layout.n >= 3)
    return c


# ---------------------------------------------------------------------------
# stml

def format_value(v: float) -> str:
    """Four significant digits, e.g. 1.0 -> '1.000'; falls back to a
    compact scientific form when the fixed rendering does not fit in 7
    characters (123456.7 -> '1.235e5')."""
    s = f"{v:#.4g}"
    if "e" not in s and "E" not in s and len(s) <= 7:
        return s
    mantissa, _, exponent = f"{v:.3e}".partition("e")
    return f"{mantissa}e{int(exponent)}"


def fit_stml(ds_train: Dataset, size: tuple[int, int] = DEFAULT_CANVAS) -> EncoderModel:
    """Near-square glyph grid: rows = ceil(sqrt(N)), cols = ceil(N / rows)."""
    n = ds_train.n_features
    if n < 1:
        raise FitError("need at least 1 feature")
    rows = math.ceil(math.sqrt(n))
    cols = math.ceil(n / rows)
    width, height = int(size[0]), int(size[1])
    if width // cols < _font.GLYPH_WIDTH or height // rows < _font.GLYPH_HEIGHT:
        raise CapacityError(
            f"a {width}x{height} canvas cannot hold one "
            f"{_font.GLYPH_WIDTH}x{_font.GLYPH_HEIGHT} glyph per cell for {n} features"
        )
    return EncoderModel("stml", (width, height), None, GridLayout(rows, cols, n))


def encode_stml(model: EncoderModel, x) -> Canvas:
    """Render each raw feature value as centered glyph text in its cell at
    the largest integer scale that fits (minimum 1, clipped to the cell)."""
    _require_kind(model, "stml")
    layout = model.layout
    x = _as_vector(x, layout.n)
    width, height = model.canvas_size
    c = Canvas(width, height)
    for f in range(layout.n):
        x0, y0, x1, y1 = layout.cell_rect(f, width, height)
        text = format_value(float(x[f]))
        tw, th = _font.text_size(text)
        scale = max(1, min((x1 - x0) // tw, (y1 - y0) // th))
        px = x0 + (x1 - x0 - tw * scale) // 2
        py = y0 + (y1 - y0 - th * scale) // 2
        _font.draw_text(c.pixels, text, px, py, scale, clip=(x0, y0, x1, y1))
    return c


# ---------------------------------------------------------------------------
# igtd

def _column_distances(Xs: np.ndarray) -> np.ndarray:
    """Euclidean distances between feature columns of the scaled matrix."""
    gram = Xs.T @ Xs
    sq = np.diag(gram)
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def _cell_distances(rows: int, cols: int, n: int) -> np.ndarray:
    """Euclidean distances between the centers of the first n grid cells."""
    r, c = divmod(np.arange(n), cols)
    dr = r[:, None] - r[None, :]
    dc = c[:, None] - c[None, :]
    return np.sqrt((dr * dr + dc * dc).astype(np.float64))


def _pair_rank_matrix(dist: np.ndarray) -> np.ndarray:
    """Average ranks of the upper-triangle distances, symmetrized.

    Ranks are multiples of 0.5, so objective sums stay exact in float64.
    """
    n = dist.shape[0]
    iu = np.triu_indices(n, 1)
    ranks = rank_average(dist[iu])
    out = np.zeros_like(dist)
    out[iu] = ranks
    out[(iu[1], iu[0])] = ranks
    return out


def assignment_error(rank_feat: np.ndarray, rank_pix: np.ndarray,
                     assignment: np.ndarray) -> float:
    """Sum over feature pairs of |feature-distance rank - pixel-distance
    rank of the assigned cells|."""
    rp = rank_pix[np.ix_(assignment, assignment)]
    iu = np.triu_indices(rank_feat.shape[0], 1)
    return float(np.abs(rank_feat - rp)[iu].sum())


def _swap_delta(rank_feat, rank_pix, assignment, i: int, j: int) -> float:
    # pair (i, j) itself is unaffected because rank_pix is symmetric
    others = np.ones(assignment.shape[0], dtype=bool)
    others[i] = others[j] = False
    k = np.flatnonzero(others)
    ai, aj, ak = assignment[i], assignment[j], assignment[k]
    before = (np.abs(rank_feat[i, k] - rank_pix[ai, ak]).sum()
              + np.abs(rank_feat[j, k] - rank_pix[aj, ak]).sum())
    after = (np.abs(rank_feat[i, k] - rank_pix[aj, ak]).sum()
             + np.abs(rank_feat[j, k] - rank_pix[ai, ak]).sum())
    return float(after - before)


def _swap_descent(rank_feat, rank_pix, max_iters, patience, seed):
    # First-improvement descent with seeded restarts. Pixel-distance ranks
    # on near-square grids are heavily tied, so a single strict descent
    # stalls on plateau-induced local optima; each stalled descent is
    # retried from a fresh seeded permutation, keeping the incumbent best.
    # ``patience`` counts consecutive finished descents that failed to
    # improve the incumbent; the trace reports the running best per scan.
    n = rank_feat.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    assignment = np.arange(n)
    error = assignment_error(rank_feat, rank_pix, assignment)
    best_assignment, best_error = assignment.copy(), error
    trace = [best_error]
    descent_improved_best = False
    stale = 0
    for _ in range(max_iters):
        improved = False
        for p in rng.permutation(len(pairs)):
            i, j = pairs[p]
            delta = _swap_delta(rank_feat, rank_pix, assignment, i, j)
            if delta < 0.0:
                assignment[[i, j]] = assignment[[j, i]]
                error += delta
                improved = True
                break
        if error < best_error:
            best_error = error
            best_assignment = assignment.copy()
            descent_improved_best = True
        trace.append(best_error)
        if improved:
            continue
        stale = 0 if descent_improved_best else stale + 1
        if stale >= patience:
            break
        assignment = rng.permutation(n)
        error = assignment_error(rank_feat, rank_pix, assignment)
        descent_improved_best = False
    return best_assignment, trace


def fit_igtd(ds_train: Dataset, max_iters: int = DEFAULT_IGTD_MAX_ITERS,
             patience: int = DEFAULT_IGTD_PATIENCE, seed: int = 0,
             l: float = scaling.DEFAULT_L, u: float = scaling.DEFAULT_U) -> EncoderModel:
    """Search a feature-to-pixel assignment by restarted first-improvement
    swap descent on the rank-discrepancy objective.

    The grid is the smallest near-square with rows * cols >= N. Feature
    distances are Euclidean between scaled training columns; pixel
    distances are Euclidean between cell centers; both are converted to
    average ranks over the feature pairs. Every scan visits the pairs in a
    seed-shuffled order and applies the first swap that strictly lowers
    the objective; a stalled descent restarts from a seeded random
    permutation (the incumbent best is kept), and the search stops after
    ``patience`` consecutive descents without improvement or ``max_iters``
    scans in total.
    """
    n = ds_train.n_features
    if n < 2:
        raise FitError("need at least 2 features")
    if max_iters < 1 or patience < 1:
        raise ParameterError("max_iters and patience must be >= 1")
    scaler = scaling.fit(ds_train.X, l, u)
    scaled = scaling.transform(scaler, ds_train.X)
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    rank_feat = _pair_rank_matrix(_column_distances(scaled))
    rank_pix = _pair_rank_matrix(_cell_distances(rows, cols, n))
    assignment, trace = _swap_descent(rank_feat, rank_pix, max_iters, patience, seed)
    mapping = IgtdMapping(rows, cols, assignment, tuple(trace))
    return EncoderModel("igtd", (cols, rows), scaler, mapping)


def encode_igtd(model: EncoderModel, x) -> Canvas:
    """One grayscale pixel per feature: round(255 * scaled value) in its
    assigned cell; unassigned cells stay 0. The canvas is the grid itself,
    one pixel per cell, and is the only non-binarized encoder output."""
    _require_kind(model, "igtd")
    mapping = model.layout
    scaled = scaling.transform(model.scaler, _as_vector(x, mapping.n))
    img = np.zeros((mapping.rows, mapping.cols), dtype=np.uint8)
    r, c = divmod(mapping.assignment, mapping.cols)
    img[r, c] = np.rint(255.0 * scaled).astype(np.uint8)
    return Canvas(mapping.cols, mapping.rows, img)


# ---------------------------------------------------------------------------
# generic surface

def fit(kind: str, ds_train: Dataset, *, l: float = scaling.DEFAULT_L,
        u: float = scaling.DEFAULT_U, size: tuple[int, int] = DEFAULT_CANVAS,
        igtd_max_iters: int = DEFAULT_IGTD_MAX_ITERS,
        igtd_patience: int = DEFAULT_IGTD_PATIENCE, seed: int = 0) -> EncoderModel:
    if kind == "retire":
        return fit_retire(ds_train, l, u, size)
    if kind == "stml":
        return fit_stml(ds_train, size)
    if kind == "igtd":
        return fit_igtd(ds_train, igtd_max_iters, igtd_patience, seed, l, u)
    raise ParameterError(f"unknown encoder kind {kind!r}")


def encode(model: EncoderModel, x) -> Canvas:
    if not isinstance(model, EncoderModel):
        raise StateError("not a fitted encoder model")
    if model.kind == "retire":
        return encode_retire(model, x)
    if model.kind == "stml":
        return encode_stml(model, x)
    if model.kind == "igtd":
        return encode_igtd(model, x)
    raise StateError(f"unknown encoder kind {model.kind!r}")


def _encode_rows(job) -> list[Canvas]:
    model, rows = job
    return [encode(model, row) for row in rows]


def encode_batch(model: EncoderModel, X, jobs: int = 1) -> list[Canvas]:
    """Encode matrix rows in order. With jobs > 1 the rows are mapped over
    a process pool in contiguous chunks; output ordering is preserved."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("encode_batch expects a 2-d matrix of rows")
    if jobs <= 1 or X.shape[0] < 2 * jobs:
        return [encode(model, row) for row in X]
    chunks = np.array_split(X, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(_encode_rows, [(model, chunk) for chunk in chunks])
        return [canvas for part in parts for canvas in part]


# ---------------------------------------------------------------------------
# serialization

def model_to_dict(model: EncoderModel) -> dict:
    doc = {
        "kind": model.kind,
        "canvas_size": list(model.canvas_size),
        "scaler": None if model.scaler is None else scaling.to_dict(model.scaler),
    }
    layout = model.layout
    if model.kind == "retire":
        doc["layout"] = {"cx": layout.cx, "cy": layout.cy, "rmax": layout.rmax, "n": layout.n}
    elif model.kind == "stml":
        doc["layout"] = {"rows": layout.rows, "cols": layout.cols, "n": layout.n}
    elif model.kind == "igtd":
        doc["layout"] = {
            "rows": layout.rows,
            "cols": layout.cols,
            "assignment": layout.assignment.tolist(),
            "error_trace": list(layout.error_trace),
        }
    else:
        raise StateError(f"unknown encoder kind {model.kind!r}")
    return doc


def model_from_dict(doc: dict) -> EncoderModel:
    kind = doc.get("kind")
    layout_doc = doc.get("layout")
    if kind not in KINDS or not isinstance(layout_doc, dict):
        raise StateError("document does not describe a fitted encoder model")
    scaler = None if doc.get("scaler") is None else scaling.from_dict(doc["scaler"])
    size = tuple(int(v) for v in doc["canvas_size"])
    if kind == "retire":
        layout = PolarLayout(float(layout_doc["cx"]), float(layout_doc["cy"]),
                             float(layout_doc["rmax"]), int(layout_doc["n"]))
    elif kind == "stml":
        layout = GridLayout(int(layout_doc["rows"]), int(layout_doc["cols"]),
                            int(layout_doc["n"]))
    else:
        layout = IgtdMapping(int(layout_doc["rows"]), int(layout_doc["cols"]),
                             np.asarray(layout_doc["assignment"], dtype=np.int64),
                             tuple(layout_doc["error_trace"]))
    return EncoderModel(kind, size, scaler, layout)


def save_model(model: EncoderModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2))


def load_model(path) -> EncoderModel:
    return model_from_dict(json.loads(Path(path).read_text()))
