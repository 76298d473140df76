"""Sparse labeled datasets in the ``label index:value ...`` text format.

Indices are 1-based on disk and 0-based in memory.  Rows are stored in CSR
arrays, so memory is proportional to the number of stored entries only.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

Label = Union[int, str]


class DatasetFormatError(ValueError):
    def __init__(self, msg: str, lineno: int):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclasses.dataclass
class SparseDataset:
    indptr: np.ndarray        # int64, length n + 1
    indices: np.ndarray       # int64, 0-based feature ids
    data: np.ndarray          # float64
    labels: np.ndarray        # int64 class ids in [0, num_classes)
    num_features: int
    num_classes: int
    label_map: Dict[Label, int]
    centers: Optional[np.ndarray] = None   # ground truth for synthetic data

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def rows(self) -> List[Tuple[int, List[Tuple[int, float]]]]:
        out = []
        for i in range(self.n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            feats = [(int(j), float(v)) for j, v in zip(self.indices[lo:hi], self.data[lo:hi])]
            out.append((int(self.labels[i]), feats))
        return out

    def row_norms_sq(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(rows, weights=self.data * self.data, minlength=self.n)

    def to_dense(self) -> np.ndarray:
        X = np.zeros((self.n, self.num_features))
        for i in range(self.n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            X[i, self.indices[lo:hi]] = self.data[lo:hi]
        return X

    def subset(self, rows) -> "SparseDataset":
        rows = np.asarray(rows, dtype=np.int64)
        indptr = [0]
        idx, val = [], []
        for i in rows:
            lo, hi = self.indptr[i], self.indptr[i + 1]
            idx.append(self.indices[lo:hi])
            val.append(self.data[lo:hi])
            indptr.append(indptr[-1] + hi - lo)
        return SparseDataset(
            np.asarray(indptr, dtype=np.int64),
            np.concatenate(idx) if idx else np.zeros(0, dtype=np.int64),
            np.concatenate(val) if val else np.zeros(0),
            self.labels[rows].copy(), self.num_features, self.num_classes,
            dict(self.label_map), self.centers)

    def __eq__(self, other):
        if not isinstance(other, SparseDataset):
            return NotImplemented
        return (self.num_features == other.num_features
                and self.num_classes == other.num_classes
                and self.label_map == other.label_map
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data)
                and np.array_equal(self.labels, other.labels))


def _parse_label(tok: str) -> Label:
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_dataset(lines: Iterable[str], num_features: Optional[int] = None) -> SparseDataset:
    """Parse an iterable of text lines (e.g. an open file)."""
    label_map: Dict[Label, int] = {}
    labels: List[int] = []
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    max_index = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        toks = line.split()
        if not toks:
            continue
        lab = _parse_label(toks[0])
        if lab not in label_map:
            label_map[lab] = len(label_map)
        labels.append(label_map[lab])
        prev = 0
        for tok in toks[1:]:
            key, sep, val = tok.partition(":")
            if not sep:
                raise DatasetFormatError(f"malformed token {tok!r}", lineno)
            try:
                j = int(key)
            except ValueError:
                raise DatasetFormatError(f"bad feature index in {tok!r}", lineno) from None
            try:
                x = float(val)
            except ValueError:
                raise DatasetFormatError(f"non-numeric value in {tok!r}", lineno) from None
            if j < 1:
                raise DatasetFormatError(f"feature index must be >= 1 in {tok!r}", lineno)
            if not math.isfinite(x):
                raise DatasetFormatError(f"non-finite value in {tok!r}", lineno)
            if j <= prev:
                raise DatasetFormatError(f"non-increasing feature index {j} after {prev}", lineno)
            prev = j
            indices.append(j - 1)
            data.append(x)
        max_index = max(max_index, prev - 1)
        indptr.append(len(indices))
    m = max_index + 1
    if num_features is not None:
        if num_features < m:
            raise ValueError(f"num_features={num_features} but index {m} present")
        m = int(num_features)
    return SparseDataset(
        np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64),
        np.asarray(data, dtype=float), np.asarray(labels, dtype=np.int64),
        m, len(label_map), label_map)


def loads(text: str, num_features: Optional[int] = None) -> SparseDataset:
    return parse_dataset(text.splitlines(), num_features)


def load(path, num_features: Optional[int] = None) -> SparseDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_dataset(fh, num_features)


def dumps(ds: SparseDataset) -> str:
    """Canonical text form: original labels, 1-based sorted indices, ``%.17g``."""
    inverse = {v: k for k, v in ds.label_map.items()}
    out = []
    for i in range(ds.n):
        lo, hi = ds.indptr[i], ds.indptr[i + 1]
        toks = [str(inverse[int(ds.labels[i])])]
        toks += ["%d:%.17g" % (j + 1, v) for j, v in zip(ds.indices[lo:hi], ds.data[lo:hi])]
        out.append(" ".join(toks))
    return "\n".join(out) + ("\n" if out else "")


def dump(ds: SparseDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(ds))


def train_test_split(ds: SparseDataset, test_fraction: float, seed: int):
    """Seeded row-level split into ``(train, test)``."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(ds.n)
    k = int(round(test_fraction * ds.n))
    return ds.subset(np.sort(perm[k:])), ds.subset(np.sort(perm[:k]))


def synth_multiclass(n: int, m: int, h: int, seed: int, separability: float = 2.0,
                     density: float = 0.3) -> SparseDataset:
    """Noisy sparse examples around ``h`` unit-norm sparse class centers.

    Each example is ``separability * center + noise`` (noise of unit expected
    norm on the center's support plus a few random features), scaled to
    unit norm.  ``separability = inf`` returns the centers themselves.  The
    centers are attached as ``dataset.centers`` (shape ``(h, m)``).
    """
    if min(n, m, h) < 1:
        raise ValueError("n, m and h must be positive")
    gen = np.random.Generator(np.random.PCG64(seed))
    k = max(1, int(round(density * m)))
    centers = np.zeros((h, m))
    supports = []
    for c in range(h):
        supp = np.sort(gen.choice(m, size=k, replace=False))
        vals = gen.standard_normal(k)
        centers[c, supp] = vals / np.linalg.norm(vals)
        supports.append(supp)
    labels = gen.integers(0, h, size=n)
    extra = max(1, k // 3)
    indptr = [0]
    indices, data = [], []
    for i in range(n):
        y = labels[i]
        supp = np.union1d(supports[y], gen.choice(m, size=extra, replace=False))
        if math.isinf(separability):
            x = centers[y, supp].copy()
        else:
            noise = gen.standard_normal(supp.size) / np.sqrt(supp.size)
            x = separability * centers[y, supp] + noise
        nx = np.linalg.norm(x)
        if nx > 0:
            x /= nx
        keep = x != 0.0
        indices.append(supp[keep])
        data.append(x[keep])
        indptr.append(indptr[-1] + int(keep.sum()))
    return SparseDataset(
        np.asarray(indptr, dtype=np.int64),
        np.concatenate(indices).astype(np.int64), np.concatenate(data),
        labels.astype(np.int64), m, h, {c: c for c in range(h)}, centers)
