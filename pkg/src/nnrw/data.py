"""Benchmark dataset loading, normalization, splitting, and target coding.

Three loaders cover the benchmark suite:

  satimage  Statlog satellite image: whitespace-separated integers, 36
            attributes then a class label per line; official train/test
            files (4,435 / 2,000 lines).  Raw labels {1,2,3,4,5,7} (class
            6 is absent from the distribution) are remapped in sorted
            order to 0..5.
  letter    UCI letter recognition: 20,000 comma-separated lines, capital
            letter A-Z first, then 16 integer features in [0, 15].
  mnist     IDX image/label pairs, big-endian; pixels are scaled by 1/255
            at load time.  Plain or .gz files are accepted.

Loaded datasets are immutable; feature normalization is a separate step
so that test data is always mapped with statistics of the training set.
"""

import gzip
import os
import struct
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, DataError

SATIMAGE_RAW_LABELS = (1, 2, 3, 4, 5, 7)
SATIMAGE_TRAIN_SIZE = 4435
SATIMAGE_TEST_SIZE = 2000
LETTER_SIZE = 20000
MNIST_IMAGE_MAGIC = 2051
MNIST_LABEL_MAGIC = 2049


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (L, N), integer labels (L,) in [0, P), class count P.

    feature_min/feature_max record the per-feature affine map applied by
    `normalize`; they stay None on raw datasets.
    """

    X: np.ndarray
    y: np.ndarray
    n_classes: int
    feature_min: Optional[np.ndarray] = None
    feature_max: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DataError("features (L, N) and labels (L,) disagree: %s vs %s"
                            % (X.shape, y.shape))
        if not np.all(np.isfinite(X)):
            raise DataError("dataset features contain non-finite values")
        if y.size and (y.min() < 0 or y.max() >= self.n_classes):
            raise DataError("labels outside [0, %d)" % self.n_classes)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    train_count: int
    test_count: int
    seed: int

    def __post_init__(self):
        if self.train_count < 1 or self.test_count < 1:
            raise ConfigError("split counts must be positive")


def _open_maybe_gzip(path):
    path = str(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rb")
    return open(path, "rb")


def load_satimage(train_path, test_path) -> Tuple[Dataset, Dataset]:
    """Load the official Statlog satimage train/test pair."""
    train = _parse_satimage_file(train_path, SATIMAGE_TRAIN_SIZE)
    test = _parse_satimage_file(test_path, SATIMAGE_TEST_SIZE)
    return train, test


def _parse_satimage_file(path, expected_rows) -> Dataset:
    try:
        raw = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError("cannot parse satimage file %s: %s" % (path, exc)) from None
    if raw.shape[1] != 37:
        raise DataError("satimage line has %d fields, expected 36 attributes + label"
                        % raw.shape[1])
    if raw.shape[0] != expected_rows:
        raise DataError("satimage file %s has %d samples, expected %d"
                        % (path, raw.shape[0], expected_rows))
    labels = raw[:, 36].astype(np.int64)
    seen = tuple(sorted(set(labels.tolist())))
    if seen != SATIMAGE_RAW_LABELS:
        raise DataError("satimage label set %s differs from expected %s"
                        % (seen, SATIMAGE_RAW_LABELS))
    remap = {raw_label: i for i, raw_label in enumerate(SATIMAGE_RAW_LABELS)}
    y = np.asarray([remap[v] for v in labels.tolist()], dtype=np.int64)
    return Dataset(raw[:, :36], y, n_classes=len(SATIMAGE_RAW_LABELS))


def load_letter(path) -> Dataset:
    """Load the UCI letter recognition file (single CSV, split separately)."""
    features = []
    labels = []
    try:
        with open(path, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError("cannot read letter file %s: %s" % (path, exc)) from None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 17:
            raise DataError("letter line %d has %d fields, expected 17" % (lineno, len(parts)))
        letter = parts[0].strip()
        if len(letter) != 1 or not "A" <= letter <= "Z":
            raise DataError("letter line %d: bad class %r" % (lineno, parts[0]))
        try:
            row = [float(int(p)) for p in parts[1:]]
        except ValueError:
            raise DataError("letter line %d: non-integer feature" % lineno) from None
        labels.append(ord(letter) - ord("A"))
        features.append(row)
    if len(features) != LETTER_SIZE:
        raise DataError("letter file has %d samples, expected %d"
                        % (len(features), LETTER_SIZE))
    return Dataset(np.asarray(features), np.asarray(labels), n_classes=26)


def _read_be32(fh, what):
    raw = fh.read(4)
    if len(raw) != 4:
        raise DataError("IDX file truncated while reading %s" % what)
    return struct.unpack(">I", raw)[0]


def load_mnist_idx(images_path, labels_path) -> Dataset:
    """Load an IDX image/label file pair; pixels scaled by 1/255."""
    with _open_maybe_gzip(images_path) as fh:
        magic = _read_be32(fh, "image magic")
        if magic != MNIST_IMAGE_MAGIC:
            raise DataError("bad image magic %d in %s (expected %d)"
                            % (magic, images_path, MNIST_IMAGE_MAGIC))
        count = _read_be32(fh, "image count")
        rows = _read_be32(fh, "row count")
        cols = _read_be32(fh, "column count")
        payload = fh.read()
    expected = count * rows * cols
    if len(payload) != expected:
        raise DataError("image payload is %d bytes, header implies %d"
                        % (len(payload), expected))
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows * cols)

    with _open_maybe_gzip(labels_path) as fh:
        magic = _read_be32(fh, "label magic")
        if magic != MNIST_LABEL_MAGIC:
            raise DataError("bad label magic %d in %s (expected %d)"
                            % (magic, labels_path, MNIST_LABEL_MAGIC))
        label_count = _read_be32(fh, "label count")
        label_payload = fh.read()
    if len(label_payload) != label_count:
        raise DataError("label payload is %d bytes, header says %d"
                        % (len(label_payload), label_count))
    if label_count != count:
        raise DataError("image file has %d samples but label file has %d"
                        % (count, label_count))
    labels = np.frombuffer(label_payload, dtype=np.uint8).astype(np.int64)
    if labels.max() > 9:
        raise DataError("label byte %d outside 0-9" % labels.max())
    return Dataset(pixels.astype(np.float64) / 255.0, labels, n_classes=10)


def random_split(d: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Seeded uniform permutation split: first train_count, next test_count."""
    total = spec.train_count + spec.test_count
    if total > len(d):
        raise ConfigError("split needs %d samples but dataset has %d" % (total, len(d)))
    perm = np.random.default_rng(spec.seed).permutation(len(d))
    train_idx = perm[:spec.train_count]
    test_idx = perm[spec.train_count:total]
    return (
        Dataset(d.X[train_idx], d.y[train_idx], d.n_classes),
        Dataset(d.X[test_idx], d.y[test_idx], d.n_classes),
    )


def normalize(train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset]:
    """Min-max scale both sets with per-feature statistics of `train`.

    Train features land in [0, 1]; test features may fall outside.
    Constant training features map to 0 everywhere.
    """
    if len(train) == 0:
        raise DataError("cannot normalize with an empty training set")
    lo = train.X.min(axis=0)
    hi = train.X.max(axis=0)
    span = hi - lo
    safe_span = np.where(span > 0, span, 1.0)

    def apply(d: Dataset) -> Dataset:
        scaled = (d.X - lo) / safe_span
        scaled[:, span == 0] = 0.0
        return Dataset(scaled, d.y, d.n_classes, feature_min=lo, feature_max=hi)

    return apply(train), apply(test)


def one_hot(y, n_classes: int, pos: float = 1.0, neg: float = 0.0) -> np.ndarray:
    """Target matrix with `pos` at the label column and `neg` elsewhere."""
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 1:
        raise DataError("labels must be 1-D")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise DataError("label %d outside [0, %d)" % (y.max(), n_classes))
    T = np.full((y.shape[0], n_classes), float(neg))
    T[np.arange(y.shape[0]), y] = float(pos)
    return T


@dataclass(frozen=True)
class BenchmarkData:
    """Raw (un-normalized) benchmark data as loaded from disk.

    Fixed-split benchmarks fill train/test; letter ships as one pool
    that is re-split per trial.
    """

    name: str
    train: Optional[Dataset] = None
    test: Optional[Dataset] = None
    pool: Optional[Dataset] = None


BENCHMARK_FILES = {
    "satimage": ("satimage/sat.trn", "satimage/sat.tst"),
    "letter": ("letter/letter-recognition.data",),
    "mnist": ("mnist/train-images-idx3-ubyte", "mnist/train-labels-idx1-ubyte",
              "mnist/t10k-images-idx3-ubyte", "mnist/t10k-labels-idx1-ubyte"),
}

# Expected sha256 of the decompressed payloads, for fetch verification.
# The mnist digests correspond to the canonical IDX files (whose md5s are
# 6bbc9ace..., a25bea73..., 2646ac64..., 27ae3e4e...); the text datasets
# have no canonical digest published, so fetch verifies their structure
# via the loaders and prints the downloaded digest instead.
KNOWN_SHA256 = {
    "mnist/train-images-idx3-ubyte": "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db",
    "mnist/train-labels-idx1-ubyte": "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5",
    "mnist/t10k-images-idx3-ubyte": "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7",
    "mnist/t10k-labels-idx1-ubyte": "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2",
}


def resolve_data_file(data_dir, relpath: str) -> str:
    """Find `relpath` under `data_dir`, accepting a .gz variant."""
    for candidate in (os.path.join(str(data_dir), relpath),
                      os.path.join(str(data_dir), relpath + ".gz")):
        if os.path.isfile(candidate):
            return candidate
    raise DataError("dataset file %s not found under %s (run `nnrw fetch` or "
                    "point --data-dir/NNRW_DATA_DIR at the data directory)"
                    % (relpath, data_dir))


def load_benchmark(name: str, data_dir) -> BenchmarkData:
    """Load one of the named benchmarks from a data directory."""
    if name == "satimage":
        train, test = load_satimage(resolve_data_file(data_dir, BENCHMARK_FILES[name][0]),
                                    resolve_data_file(data_dir, BENCHMARK_FILES[name][1]))
        return BenchmarkData(name, train=train, test=test)
    if name == "letter":
        return BenchmarkData(name, pool=load_letter(
            resolve_data_file(data_dir, BENCHMARK_FILES[name][0])))
    if name == "mnist":
        paths = [resolve_data_file(data_dir, p) for p in BENCHMARK_FILES[name]]
        train = load_mnist_idx(paths[0], paths[1])
        test = load_mnist_idx(paths[2], paths[3])
        return BenchmarkData(name, train=train, test=test)
    raise ConfigError("unknown dataset %r (expected satimage, letter, or mnist)" % name)


def save_dataset_csv(d: Dataset, path) -> None:
    """Canonical internal CSV: one row per sample, full-precision features, label last."""
    with open(path, "w") as fh:
        fh.write("# n_classes=%d\n" % d.n_classes)
        for row, label in zip(d.X, d.y):
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write(",%d\n" % label)


def load_dataset_csv(path) -> Dataset:
    """Inverse of `save_dataset_csv`; features and labels round-trip exactly."""
    features = []
    labels = []
    n_classes = None
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                try:
                    n_classes = int(line.split("=", 1)[1])
                except (IndexError, ValueError):
                    raise DataError("bad header on line %d of %s" % (lineno, path)) from None
                continue
            parts = line.split(",")
            try:
                features.append([float(v) for v in parts[:-1]])
                labels.append(int(parts[-1]))
            except ValueError:
                raise DataError("bad row on line %d of %s" % (lineno, path)) from None
    if n_classes is None:
        raise DataError("missing n_classes header in %s" % path)
    return Dataset(np.asarray(features), np.asarray(labels), n_classes)
