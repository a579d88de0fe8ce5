"""Dense matrices over GF(2^l): elimination, solving, and subset-rank metrics.

Everything here is exact desk-scale arithmetic (Gaussian elimination with
deterministic pivoting: first nonzero entry, lowest row index).  The subset
metrics kruskal_rank / gamma_rank / lambda_rank enumerate row subsets
exhaustively and are capped at 24 rows.

Matrices serialize to a plain text block: a header line ``q rows cols``
followed by row-major integer entries; blank lines and ``#`` comments are
ignored on load.
"""

from itertools import combinations

import numpy as np

from .gf import Field, field_new

SUBSET_ROW_CAP = 24  # exhaustive subset enumeration beyond this is hopeless


class FfMatrix:
    """An immutable rows x cols matrix with entries in a Field."""

    __slots__ = ("field", "_a")

    def __init__(self, field: Field, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("entries must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= field.order):
            raise ValueError(f"entries must lie in [0, {field.order})")
        a.setflags(write=False)
        self.field = field
        self._a = a

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, field: Field, n: int) -> "FfMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "FfMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    # -- basics --------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    def entry(self, i: int, j: int) -> int:
        return int(self._a[i, j])

    def to_lists(self):
        return self._a.tolist()

    def to_array(self) -> np.ndarray:
        """Read-only int64 view of the entries."""
        return self._a

    def row_submatrix(self, indices) -> "FfMatrix":
        return FfMatrix(self.field, self._a[list(indices), :])

    def transpose(self) -> "FfMatrix":
        return FfMatrix(self.field, self._a.T)

    def vstack(self, other: "FfMatrix") -> "FfMatrix":
        if other.field != self.field or other.cols != self.cols:
            raise ValueError("vstack needs matching field and width")
        return FfMatrix(self.field, np.vstack([self._a, other._a]))

    def __eq__(self, other):
        return (
            isinstance(other, FfMatrix)
            and self.field == other.field
            and self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __repr__(self):
        return f"FfMatrix(q={self.field.order}, {self.rows}x{self.cols})"

    def __matmul__(self, other: "FfMatrix") -> "FfMatrix":
        if not isinstance(other, FfMatrix):
            return NotImplemented
        if other.field != self.field:
            raise ValueError("mixed fields")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        left = self.to_lists()
        right = other.to_lists()
        out = [[0] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            li = left[i]
            oi = out[i]
            for k in range(self.cols):
                v = li[k]
                if v == 0:
                    continue
                rk = right[k]
                for j in range(other.cols):
                    if rk[j]:
                        oi[j] ^= f.mul(v, rk[j])
        return FfMatrix(f, out)

    # -- elimination ---------------------------------------------------------

    def _rref(self, work):
        """Reduce a list-of-lists in place; return the pivot column list."""
        f = self.field
        mul, inv = f.mul, f.inv
        nrows = len(work)
        ncols = len(work[0]) if nrows else 0
        pivots = []
        r = 0
        for c in range(ncols):
            pr = None
            for i in range(r, nrows):
                if work[i][c]:
                    pr = i
                    break
            if pr is None:
                continue
            work[r], work[pr] = work[pr], work[r]
            pv = inv(work[r][c])
            if pv != 1:
                row = work[r]
                for j in range(c, ncols):
                    if row[j]:
                        row[j] = mul(pv, row[j])
            prow = work[r]
            for i in range(nrows):
                if i != r and work[i][c]:
                    fac = work[i][c]
                    row = work[i]
                    for j in range(c, ncols):
                        if prow[j]:
                            row[j] ^= mul(fac, prow[j])
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return pivots

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        work = self.to_lists()
        return len(self._rref(work))

    def solve(self, b: "FfMatrix") -> "FfMatrix | None":
        """Unique X with self @ X == b, or None (inconsistent/underdetermined)."""
        x = self._solve_general(b, require_unique=True)
        return x

    def solve_any(self, b: "FfMatrix") -> "FfMatrix | None":
        """A particular X with self @ X == b (free unknowns 0), or None."""
        return self._solve_general(b, require_unique=False)

    def _solve_general(self, b, require_unique):
        if not isinstance(b, FfMatrix) or b.field != self.field:
            raise ValueError("rhs must be an FfMatrix over the same field")
        if b.rows != self.rows:
            raise ValueError("rhs row count mismatch")
        n, k = self.cols, b.cols
        work = [list(ra) + list(rb) for ra, rb in zip(self.to_lists(), b.to_lists())]
        if not work:
            return FfMatrix.zeros(self.field, n, k)
        f = self.field
        mul, inv = f.mul, f.inv
        nrows = len(work)
        pivots = []
        r = 0
        for c in range(n):  # only eliminate over the coefficient columns
            pr = None
            for i in range(r, nrows):
                if work[i][c]:
                    pr = i
                    break
            if pr is None:
                continue
            work[r], work[pr] = work[pr], work[r]
            pv = inv(work[r][c])
            if pv != 1:
                row = work[r]
                for j in range(c, n + k):
                    if row[j]:
                        row[j] = mul(pv, row[j])
            prow = work[r]
            for i in range(nrows):
                if i != r and work[i][c]:
                    fac = work[i][c]
                    row = work[i]
                    for j in range(c, n + k):
                        if prow[j]:
                            row[j] ^= mul(fac, prow[j])
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        for i in range(r, nrows):  # zero coefficient row, nonzero rhs?
            if any(work[i][n:]):
                return None
        if require_unique and len(pivots) < n:
            return None
        out = [[0] * k for _ in range(n)]
        for ridx, c in enumerate(pivots):
            out[c] = work[ridx][n:]
        return FfMatrix(self.field, out)

    def invert(self) -> "FfMatrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices can be inverted")
        x = self.solve(FfMatrix.identity(self.field, self.rows))
        if x is None:
            raise ValueError("matrix is singular")
        return x

    # -- subset-rank metrics ---------------------------------------------------

    def _check_subset_cap(self):
        if self.rows > SUBSET_ROW_CAP:
            raise ValueError(
                f"subset metrics are exhaustive; capped at {SUBSET_ROW_CAP} rows"
            )

    def kruskal_rank(self) -> int:
        """Largest r such that every set of r rows is linearly independent."""
        self._check_subset_cap()
        limit = min(self.rows, self.cols)
        for r in range(1, limit + 1):
            for idx in combinations(range(self.rows), r):
                if self.row_submatrix(idx).rank() < r:
                    return r - 1
        return limit

    def gamma_rank(self, i: int) -> int:
        """Smallest g such that every set of g rows has rank at least i.

        Raises ValueError when no such g exists (the full matrix has rank
        below i) or when i is out of range.
        """
        self._check_subset_cap()
        if not 1 <= i <= min(self.rows, self.cols):
            raise ValueError(f"i must be in [1, {min(self.rows, self.cols)}]")
        if self.rank() < i:
            raise ValueError(f"undefined: full row set has rank below {i}")
        for g in range(i, self.rows + 1):
            if all(
                self.row_submatrix(idx).rank() >= i
                for idx in combinations(range(self.rows), g)
            ):
                return g
        raise AssertionError("unreachable: full set has rank >= i")

    def lambda_rank(self, i: int) -> int | None:
        """Smallest l such that every set of l rows spans unit vector e_i.

        Returns None when even the full row set does not span e_i.
        """
        self._check_subset_cap()
        if not 0 <= i < self.cols:
            raise ValueError(f"column index must be in [0, {self.cols})")
        if not self._spans_unit(range(self.rows), i):
            return None
        for lam in range(1, self.rows + 1):
            if all(
                self._spans_unit(idx, i)
                for idx in combinations(range(self.rows), lam)
            ):
                return lam
        raise AssertionError("unreachable: full set spans e_i")

    def _spans_unit(self, row_indices, i):
        sub = self.row_submatrix(row_indices)
        unit = [[0] * self.cols]
        unit[0][i] = 1
        aug = sub.vstack(FfMatrix(self.field, unit))
        return aug.rank() == sub.rank()

    # -- serialization -----------------------------------------------------------

    def dump(self) -> str:
        lines = [f"{self.field.order} {self.rows} {self.cols}"]
        for row in self.to_lists():
            lines.append(" ".join(str(v) for v in row))
        return "\n".join(lines) + "\n"


def load_matrix(text: str, field: Field | None = None) -> FfMatrix:
    """Parse the ``q rows cols`` + entries format produced by dump()."""
    tokens = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens.extend(line.split())
    if len(tokens) < 3:
        raise ValueError("matrix text needs a 'q rows cols' header")
    q, rows, cols = (int(t) for t in tokens[:3])
    if field is None:
        ell = q.bit_length() - 1
        if q != 1 << ell:
            raise ValueError(f"q must be a power of two, got {q}")
        field = field_new(ell)
    elif field.order != q:
        raise ValueError(f"header q={q} does not match field order {field.order}")
    body = tokens[3:]
    if len(body) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(body)}")
    vals = [int(t) for t in body]
    entries = [vals[r * cols:(r + 1) * cols] for r in range(rows)]
    return FfMatrix(field, entries)
