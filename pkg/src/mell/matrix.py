"""Exact sparse matrices with rational entries.

Values are stored as ``int`` when integral and as :class:`fractions.Fraction`
otherwise, so the common all-ones coupling scheme never pays for Fraction
arithmetic.
"""

from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Rational = Union[int, Fraction]


def normalize(x) -> Rational:
    """Return ``x`` as an int if it is integral, else as a Fraction."""
    if isinstance(x, int):
        return x
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return x


class SparseRationalMatrix:
    """Immutable coordinate-format matrix over the rationals.

    Entries are kept sorted by ``(row, col)``; zeros are never stored.
    """

    __slots__ = ("n_rows", "n_cols", "_cols")

    def __init__(self, n_rows: int, n_cols: int, columns: Mapping[int, Mapping[int, Rational]] | None = None):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix shape must be non-negative")
        self.n_rows = n_rows
        self.n_cols = n_cols
        cols: dict[int, dict[int, Rational]] = {}
        for c, col in (columns or {}).items():
            if not 0 <= c < n_cols:
                raise IndexError(f"column {c} out of range for {n_cols} columns")
            clean = {}
            for r, v in col.items():
                if not 0 <= r < n_rows:
                    raise IndexError(f"row {r} out of range for {n_rows} rows")
                if v:
                    clean[r] = normalize(v)
            if clean:
                cols[c] = clean
        self._cols = cols

    # construction

    @classmethod
    def from_entries(cls, n_rows: int, n_cols: int, entries: Iterable[tuple[int, int, Rational]]) -> "SparseRationalMatrix":
        cols: dict[int, dict[int, Rational]] = defaultdict(dict)
        for r, c, v in entries:
            if r in cols[c]:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            cols[c][r] = v
        return cls(n_rows, n_cols, cols)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "SparseRationalMatrix":
        return cls(n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> "SparseRationalMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseRationalMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        return cls.from_entries(
            n_rows, n_cols, ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v)
        )

    @classmethod
    def from_columns(cls, n_rows: int, vectors: Sequence[Sequence]) -> "SparseRationalMatrix":
        """Matrix whose columns are the given dense vectors."""
        return cls(n_rows, len(vectors), {c: {r: v for r, v in enumerate(vec) if v} for c, vec in enumerate(vectors)})

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self._cols.values())

    def column(self, c: int) -> dict[int, Rational]:
        return dict(self._cols.get(c, {}))

    def columns(self) -> dict[int, dict[int, Rational]]:
        return {c: dict(col) for c, col in self._cols.items()}

    def rows(self) -> dict[int, dict[int, Rational]]:
        out: dict[int, dict[int, Rational]] = defaultdict(dict)
        for c, col in self._cols.items():
            for r, v in col.items():
                out[r][c] = v
        return dict(out)

    @property
    def entries(self) -> list[tuple[int, int, Rational]]:
        return sorted((r, c, v) for c, col in self._cols.items() for r, v in col.items())

    def __getitem__(self, rc: tuple[int, int]) -> Rational:
        r, c = rc
        return self._cols.get(c, {}).get(r, 0)

    def is_zero(self) -> bool:
        return not self._cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseRationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        return hash((self.shape, tuple(self.entries)))

    def __repr__(self) -> str:
        return f"SparseRationalMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"

    # algebra

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(self.n_cols, self.n_rows, self.rows())

    T = property(transpose)

    def __neg__(self) -> "SparseRationalMatrix":
        return self.scale(-1)

    def scale(self, k: Rational) -> "SparseRationalMatrix":
        return SparseRationalMatrix(
            self.n_rows, self.n_cols, {c: {r: v * k for r, v in col.items()} for c, col in self._cols.items()}
        )

    def __add__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        cols = {c: dict(col) for c, col in self._cols.items()}
        for c, col in other._cols.items():
            target = cols.setdefault(c, {})
            for r, v in col.items():
                target[r] = target.get(r, 0) + v
        return SparseRationalMatrix(self.n_rows, self.n_cols, cols)

    def __sub__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        return self + (-other)

    def __matmul__(self, other):
        if isinstance(other, SparseRationalMatrix):
            return self.matmul(other)
        return self.apply(other)

    def matmul(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = {}
        mine = self._cols
        for c, col in other._cols.items():
            acc: dict[int, Rational] = {}
            for k, b in col.items():
                left = mine.get(k)
                if left is None:
                    continue
                for r, a in left.items():
                    acc[r] = acc.get(r, 0) + a * b
            cols[c] = acc
        return SparseRationalMatrix(self.n_rows, other.n_cols, cols)

    def apply(self, vec: Sequence) -> list[Rational]:
        """Dense matrix-vector product."""
        if len(vec) != self.n_cols:
            raise ValueError(f"vector of length {len(vec)} for {self.n_cols} columns")
        out: list[Rational] = [0] * self.n_rows
        for c, col in self._cols.items():
            x = vec[c]
            if x:
                for r, a in col.items():
                    out[r] += a * x
        return [normalize(v) for v in out]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseRationalMatrix":
        rpos = {r: i for i, r in enumerate(rows)}
        out = {}
        for j, c in enumerate(cols):
            col = self._cols.get(c)
            if col:
                out[j] = {rpos[r]: v for r, v in col.items() if r in rpos}
        return SparseRationalMatrix(len(rows), len(cols), out)

    def is_symmetric(self) -> bool:
        return self.n_rows == self.n_cols and self == self.transpose()

    # conversion

    def to_dense(self) -> list[list[Rational]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for c, col in self._cols.items():
            for r, v in col.items():
                out[r][c] = v
        return out

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=float)
        for c, col in self._cols.items():
            for r, v in col.items():
                out[r, c] = float(v)
        return out

    def to_coo(self) -> list[list[int]]:
        """Rows of ``[row, col, numerator, denominator]``."""
        out = []
        for r, c, v in self.entries:
            v = Fraction(v)
            out.append([r, c, v.numerator, v.denominator])
        return out

    def to_json(self, **meta) -> str:
        payload = dict(meta)
        payload.update(n_rows=self.n_rows, n_cols=self.n_cols, entries=self.to_coo())
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SparseRationalMatrix":
        data = json.loads(text)
        return cls.from_entries(
            data["n_rows"], data["n_cols"], ((r, c, Fraction(p, q)) for r, c, p, q in data["entries"])
        )


def block(grid: Sequence[Sequence[SparseRationalMatrix | None]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> SparseRationalMatrix:
    """Assemble a block matrix; ``None`` cells are zero blocks."""
    row_off = [0]
    for s in row_sizes:
        row_off.append(row_off[-1] + s)
    col_off = [0]
    for s in col_sizes:
        col_off.append(col_off[-1] + s)
    cols: dict[int, dict[int, Rational]] = defaultdict(dict)
    for i, line in enumerate(grid):
        for j, m in enumerate(line):
            if m is None:
                continue
            if m.shape != (row_sizes[i], col_sizes[j]):
                raise ValueError(f"block ({i}, {j}) has shape {m.shape}, expected {(row_sizes[i], col_sizes[j])}")
            for c, col in m._cols.items():
                target = cols[c + col_off[j]]
                for r, v in col.items():
                    target[r + row_off[i]] = v
    return SparseRationalMatrix(row_off[-1], col_off[-1], cols)
