"""Two-sample evaluation metrics for generated imagery.

Operates on feature embeddings and class-probability rows produced by an
external extractor.  Implements six metrics (earth mover's distance,
Fréchet distance, inception score, 1-NN accuracy, kernel MMD, mode
score), the real-vs-real reference baseline protocol, and the mean-error
model ranking.  Estimator choices are fixed for determinism: biased MMD
V-statistic with median-heuristic bandwidth, exact-assignment EMD,
eigendecomposition matrix square root with negative-eigenvalue clipping,
and index-order tie breaking for 1-NN.

File format: "AGF1", a little-endian binary matrix container (16-byte
header: magic ``AGF1``, u16 version=1, u8 kind, u8 pad, u32 rows,
u32 dims; then rows*dims float32, row-major).  CSV with a
``dim0,dim1,...`` header row is accepted as a fallback.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist, pdist

METRIC_ORDER = ("emd", "fid", "inception", "knn", "mmd", "mode")

AGF1_MAGIC = b"AGF1"
AGF1_VERSION = 1
KIND_FEATURES = 0
KIND_PROBABILITIES = 1
_HEADER = struct.Struct("<4sHBBII")


class GanMetricsError(ValueError):
    """Raised for invalid metric inputs or unreadable metric files."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FeatureSet:
    """n rows of d-dimensional real embeddings, one row per sample."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise GanMetricsError(f"features must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise GanMetricsError(f"degenerate feature matrix {arr.shape}")
        if not np.isfinite(arr).all():
            raise GanMetricsError("features contain non-finite entries")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ProbabilityMatrix:
    """n rows of k class probabilities; every row sums to 1 within 1e-6."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise GanMetricsError(f"probabilities must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise GanMetricsError(f"degenerate probability matrix {arr.shape}")
        if not np.isfinite(arr).all():
            raise GanMetricsError("probabilities contain non-finite entries")
        if (arr < 0).any() or (arr > 1).any():
            raise GanMetricsError("probabilities must lie in [0, 1]")
        sums = arr.sum(axis=1)
        bad = np.abs(sums - 1.0) > 1e-6
        if bad.any():
            idx = int(np.argmax(bad))
            raise GanMetricsError(
                f"probability row {idx} sums to {sums[idx]:.8f}, expected 1")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def classes(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class MetricVector:
    """The six metric values in fixed (emd, fid, inception, knn, mmd, mode) order."""

    emd: float
    fid: float
    inception: float
    knn: float
    mmd: float
    mode: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in METRIC_ORDER)

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_ORDER}


def _as_features(x) -> FeatureSet:
    return x if isinstance(x, FeatureSet) else FeatureSet(np.asarray(x))


def _as_probs(p) -> ProbabilityMatrix:
    return p if isinstance(p, ProbabilityMatrix) else ProbabilityMatrix(np.asarray(p))


def _check_pair(x: FeatureSet, y: FeatureSet, min_rows: int = 2) -> None:
    if x.dims != y.dims:
        raise GanMetricsError(f"dimension mismatch: {x.dims} vs {y.dims}")
    if x.rows < min_rows or y.rows < min_rows:
        raise GanMetricsError(f"need at least {min_rows} rows per set")


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    # KL(p || q) with natural log and the 0*log(0/q) := 0 convention.
    support = p > 0
    if (q[support] == 0).any():
        return math.inf
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def inception_score(probs, splits: int = 1) -> float:
    """exp of the mean per-row KL divergence from the class marginal.

    With ``splits`` > 1 the rows are cut into contiguous chunks, scored
    independently, and averaged (the common convention; off by default
    because the full-set score is what gets compared to baselines).
    """
    probs = _as_probs(probs)
    if splits < 1:
        raise GanMetricsError(f"splits must be >= 1, got {splits}")
    if splits == 1:
        marginal = probs.data.mean(axis=0)
        kls = [_kl(row, marginal) for row in probs.data]
        mean_kl = sum(kls) / len(kls)
        return math.exp(mean_kl) if math.isfinite(mean_kl) else math.inf
    if splits > probs.rows:
        raise GanMetricsError(f"cannot cut {probs.rows} rows into {splits} splits")
    chunks = np.array_split(probs.data, splits, axis=0)
    return float(np.mean([inception_score(ProbabilityMatrix(c)) for c in chunks]))


def mode_score(probs_generated, probs_real) -> float:
    """Inception-score variant penalizing marginal drift from the real set.

    exp( mean_rows KL(row || p*) - KL(p_gen_marginal || p*) ), with p*
    the real set's class marginal.
    """
    gen = _as_probs(probs_generated)
    real = _as_probs(probs_real)
    if gen.classes != real.classes:
        raise GanMetricsError(
            f"class count mismatch: {gen.classes} vs {real.classes}")
    p_star = real.data.mean(axis=0)
    p_gen = gen.data.mean(axis=0)
    kls = [_kl(row, p_star) for row in gen.data]
    mean_kl = sum(kls) / len(kls)
    exponent = mean_kl - _kl(p_gen, p_star)
    return math.exp(exponent) if math.isfinite(exponent) else math.inf


def kernel_mmd(x, y) -> float:
    """Kernel maximum mean discrepancy (biased V-statistic, RBF kernel).

    Bandwidth follows the median heuristic: sigma is the median pairwise
    Euclidean distance over the pooled set.  All points identical makes
    sigma 0; the discrepancy is then 0 by definition.
    """
    x, y = _as_features(x), _as_features(y)
    _check_pair(x, y, min_rows=1)
    pooled = np.vstack([x.data, y.data])
    sigma = float(np.median(pdist(pooled)))
    if sigma == 0.0:
        return 0.0
    gamma = 1.0 / (2.0 * sigma * sigma)

    def kernel_mean(a, b):
        sq = cdist(a, b, metric="sqeuclidean")
        return float(np.exp(-gamma * sq).mean())

    mmd_sq = (kernel_mean(x.data, x.data) + kernel_mean(y.data, y.data)
              - 2.0 * kernel_mean(x.data, y.data))
    return math.sqrt(max(mmd_sq, 0.0))


def wasserstein(x, y) -> float:
    """Exact 1-Wasserstein distance between equal-size empirical sets.

    Solved as a minimum-cost perfect matching under Euclidean ground
    cost; the distance is the matching cost divided by n.
    """
    x, y = _as_features(x), _as_features(y)
    _check_pair(x, y, min_rows=1)
    if x.rows != y.rows:
        raise GanMetricsError(
            f"exact solver needs equal sizes, got {x.rows} vs {y.rows}; "
            "resample both sets to a common n")
    cost = cdist(x.data, y.data)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / x.rows)


def _sqrt_eigvals(sym: np.ndarray) -> np.ndarray:
    # Eigendecomposition of a symmetric matrix; sampling noise can push
    # eigenvalues slightly negative, so clip at 0 before the root.
    vals = np.linalg.eigvalsh((sym + sym.T) / 2.0)
    return np.sqrt(np.clip(vals, 0.0, None))


def _psd_sqrt(sym: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((sym + sym.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(x, y) -> float:
    """Fréchet distance between Gaussian fits of two feature sets.

    ||mu_x - mu_y||^2 + Tr(Sx + Sy - 2 (Sx Sy)^(1/2)), with the cross
    term computed from the symmetrized product Sx^(1/2) Sy Sx^(1/2) so
    the square root is taken of a PSD matrix.
    """
    x, y = _as_features(x), _as_features(y)
    _check_pair(x, y)
    if x.rows <= x.dims or y.rows <= y.dims:
        warnings.warn(
            f"fid: fewer rows than dims ({x.rows}x{x.dims} vs {y.rows}x{y.dims}); "
            "covariance estimates will be rank-deficient", stacklevel=2)
    mu_x = x.data.mean(axis=0)
    mu_y = y.data.mean(axis=0)
    cov_x = np.cov(x.data, rowvar=False).reshape(x.dims, x.dims)
    cov_y = np.cov(y.data, rowvar=False).reshape(y.dims, y.dims)
    if not (np.isfinite(cov_x).all() and np.isfinite(cov_y).all()):
        raise GanMetricsError("covariance contains non-finite entries")
    root_x = _psd_sqrt(cov_x)
    cross = _sqrt_eigvals(root_x @ cov_y @ root_x).sum()
    value = (float(np.sum((mu_x - mu_y) ** 2))
             + float(np.trace(cov_x) + np.trace(cov_y) - 2.0 * cross))
    return max(value, 0.0)


def one_nn_accuracy(x, y) -> float:
    """Leave-one-out 1-NN accuracy on the pooled two-sample set.

    Rows of x are labeled real, rows of y generated.  Distance ties are
    broken toward the lower pooled index, so the result is deterministic.
    Values near 0.5 mean the sets are indistinguishable.
    """
    x, y = _as_features(x), _as_features(y)
    _check_pair(x, y)
    pooled = np.vstack([x.data, y.data])
    labels = np.concatenate([np.zeros(x.rows, dtype=np.int64),
                             np.ones(y.rows, dtype=np.int64)])
    dist = cdist(pooled, pooled)
    np.fill_diagonal(dist, np.inf)
    # argmin returns the first minimum, which implements the tie rule.
    nearest = np.argmin(dist, axis=1)
    return float((labels[nearest] == labels).mean())


def reference_baseline(real_features, real_probs, repeats: int = 20,
                       split: float = 0.5, seed: int = 42) -> MetricVector:
    """Real-vs-real metric levels, the target all models are scored against.

    Each repeat draws two disjoint seeded subsets of the real rows
    (each a ``split`` fraction) and evaluates all six metrics between
    them, treating one side as real and the other as generated.  The
    per-metric mean over repeats is returned.
    """
    feats = _as_features(real_features)
    probs = _as_probs(real_probs)
    if feats.rows != probs.rows:
        raise GanMetricsError(
            f"features ({feats.rows}) and probabilities ({probs.rows}) row "
            "counts differ")
    if repeats < 1:
        raise GanMetricsError(f"repeats must be >= 1, got {repeats}")
    if not 0.0 < split <= 0.5:
        raise GanMetricsError(f"split must be in (0, 0.5], got {split}")
    half = int(feats.rows * split)
    if half < 2:
        raise GanMetricsError(
            f"{feats.rows} rows at split {split} leave fewer than 2 per side")
    rng = np.random.default_rng(seed)
    totals = np.zeros(len(METRIC_ORDER))
    for _ in range(repeats):
        perm = rng.permutation(feats.rows)
        side_a, side_b = perm[:half], perm[half:2 * half]
        fa = FeatureSet(feats.data[side_a])
        fb = FeatureSet(feats.data[side_b])
        pa = ProbabilityMatrix(probs.data[side_a])
        pb = ProbabilityMatrix(probs.data[side_b])
        totals += np.array([wasserstein(fa, fb), fid(fa, fb),
                            inception_score(pb), one_nn_accuracy(fa, fb),
                            kernel_mmd(fa, fb), mode_score(pb, pa)])
    means = totals / repeats
    return MetricVector(*(float(v) for v in means))


def evaluate_all(real_features, gen_features, real_probs, gen_probs) -> MetricVector:
    """All six metrics between a real and a generated set."""
    return MetricVector(
        emd=wasserstein(real_features, gen_features),
        fid=fid(real_features, gen_features),
        inception=inception_score(gen_probs),
        knn=one_nn_accuracy(real_features, gen_features),
        mmd=kernel_mmd(real_features, gen_features),
        mode=mode_score(gen_probs, real_probs),
    )


def error_vector(model: MetricVector, reference: MetricVector) -> MetricVector:
    """Per-metric absolute difference between model and reference levels."""
    return MetricVector(*(abs(m - r) for m, r in
                          zip(model.as_tuple(), reference.as_tuple())))


def model_mean_error(errors) -> float:
    """Arithmetic mean of the six per-metric errors (the ranking scalar).

    Accepts a MetricVector or any six-value sequence in metric order.
    """
    if isinstance(errors, MetricVector):
        values = errors.as_tuple()
    else:
        values = tuple(float(v) for v in errors)
        if len(values) != len(METRIC_ORDER):
            raise GanMetricsError(
                f"mean error needs {len(METRIC_ORDER)} values, got {len(values)}")
    if not all(math.isfinite(v) for v in values):
        raise GanMetricsError("mean error requires six finite values")
    return sum(values) / len(values)


def save_agf1(path: str | Path, data: np.ndarray, kind: int) -> Path:
    """Write a matrix in the AGF1 binary container (float32, row-major)."""
    if kind not in (KIND_FEATURES, KIND_PROBABILITIES):
        raise GanMetricsError(f"unknown AGF1 kind {kind}")
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.float32))
    if arr.ndim != 2:
        raise GanMetricsError(f"AGF1 payload must be 2-D, got shape {arr.shape}")
    rows, dims = arr.shape
    path = Path(path)
    header = _HEADER.pack(AGF1_MAGIC, AGF1_VERSION, kind, 0, rows, dims)
    payload = arr.astype("<f4").tobytes(order="C")
    path.write_bytes(header + payload)
    return path


def load_agf1(path: str | Path) -> tuple[np.ndarray, int]:
    """Read an AGF1 file; returns (rows x dims float32 array, kind)."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise GanMetricsError(f"{path}: truncated AGF1 header")
    magic, version, kind, pad, rows, dims = _HEADER.unpack_from(blob)
    if magic != AGF1_MAGIC:
        raise GanMetricsError(f"{path}: bad magic {magic!r}")
    if version != AGF1_VERSION:
        raise GanMetricsError(f"{path}: unsupported AGF1 version {version}")
    if kind not in (KIND_FEATURES, KIND_PROBABILITIES):
        raise GanMetricsError(f"{path}: unknown AGF1 kind {kind}")
    if pad != 0:
        raise GanMetricsError(f"{path}: nonzero pad byte {pad}")
    expected = _HEADER.size + rows * dims * 4
    if len(blob) != expected:
        raise GanMetricsError(
            f"{path}: payload is {len(blob) - _HEADER.size} bytes, "
            f"expected {rows}x{dims} float32 ({expected - _HEADER.size})")
    arr = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(rows, dims)
    return arr.copy(), kind


def load_matrix(path: str | Path) -> tuple[np.ndarray, int | None]:
    """Load AGF1 or fallback CSV (header ``dim0,dim1,...``); CSV has no kind."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise GanMetricsError(f"cannot read {path}: {exc}") from exc
    if head == AGF1_MAGIC:
        return load_agf1(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dim0"):
        raise GanMetricsError(
            f"{path}: neither AGF1 (bad magic) nor CSV with a 'dim0,...' header")
    try:
        arr = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]],
                       dtype=np.float64)
    except ValueError as exc:
        raise GanMetricsError(f"{path}: malformed CSV row: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise GanMetricsError(f"{path}: CSV contains no data rows")
    if arr.shape[1] != len(lines[0].split(",")):
        raise GanMetricsError(f"{path}: CSV rows do not match header width")
    return arr, None


def save_csv(path: str | Path, data: np.ndarray) -> Path:
    """Write the CSV fallback format with its ``dim0,dim1,...`` header."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise GanMetricsError(f"CSV payload must be 2-D, got shape {arr.shape}")
    path = Path(path)
    header = ",".join(f"dim{i}" for i in range(arr.shape[1]))
    rows = [",".join(repr(float(v)) for v in row) for row in arr]
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return path
