"""Dense linear algebra over a GFField.

Matrices are 2-D numpy int64 arrays of element encodings; every routine
takes the field as its first argument.  Elimination pivots on the first
nonzero entry in scan order, so all results are deterministic functions of
the input.
"""

from __future__ import annotations

import numpy as np

from hermipir.fields import GFField


def as_matrix(field: GFField, data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if arr.size and (arr.min() < 0 or arr.max() >= field.order):
        raise ValueError("entries are not valid element encodings")
    return arr


def rref(field: GFField, mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    r = as_matrix(field, mat).copy()
    n_rows, n_cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        nz = np.flatnonzero(r[row:, col])
        if nz.size == 0:
            continue
        lead = row + int(nz[0])
        if lead != row:
            r[[row, lead]] = r[[lead, row]]
        r[row] = field.mul_arr(r[row], field.inv(int(r[row, col])))
        others = np.flatnonzero(r[:, col])
        others = others[others != row]
        if others.size:
            factors = r[others, col][:, None]
            r[others] = field.sub_arr(r[others], field.mul_arr(factors, r[row][None, :]))
        pivots.append(col)
        row += 1
    return r, pivots


def rank(field: GFField, mat) -> int:
    return len(rref(field, mat)[1])


def solve_prefix(field: GFField, mat, rhs, prefix_len: int) -> np.ndarray:
    """First `prefix_len` coordinates of the solutions of mat @ s = rhs.

    The system may be underdetermined in its trailing coordinates; the call
    succeeds exactly when the system is consistent and every one of the
    first `prefix_len` coordinates takes the same value in all solutions.
    Raises ValueError otherwise.
    """
    m = as_matrix(field, mat)
    b = np.asarray(rhs, dtype=np.int64).reshape(-1)
    if b.shape[0] != m.shape[0]:
        raise ValueError("right-hand side length does not match row count")
    if not 0 <= prefix_len <= m.shape[1]:
        raise ValueError("prefix length out of range")
    aug = np.concatenate([m, b[:, None]], axis=1)
    r, pivots = rref(field, aug)
    n_cols = m.shape[1]
    if n_cols in pivots:
        raise ValueError("inconsistent system: no solution exists")
    pivot_rows = {col: i for i, col in enumerate(pivots)}
    free_cols = [c for c in range(n_cols) if c not in pivot_rows]
    out = np.zeros(prefix_len, dtype=np.int64)
    for j in range(prefix_len):
        if j not in pivot_rows:
            raise ValueError(f"prefix coordinate {j} is not determined by the system")
        i = pivot_rows[j]
        if any(r[i, c] != 0 for c in free_cols):
            raise ValueError(f"prefix coordinate {j} is not unique across solutions")
        out[j] = r[i, n_cols]
    return out


class _RowBasis:
    """Incremental row-space basis used for greedy independent-row selection."""

    def __init__(self, field: GFField, n_cols: int):
        self.field = field
        self.rows: list[np.ndarray] = []
        self.pivot_cols: list[int] = []
        self.n_cols = n_cols

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        f = self.field
        v = vec.copy()
        for basis_row, col in zip(self.rows, self.pivot_cols):
            c = int(v[col])
            if c:
                v = f.sub_arr(v, f.mul_arr(np.int64(c), basis_row))
        return v

    def try_add(self, vec: np.ndarray) -> bool:
        v = self.reduce(vec)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        col = int(nz[0])
        v = self.field.mul_arr(v, self.field.inv(int(v[col])))
        self.rows.append(v)
        self.pivot_cols.append(col)
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def select_full_rank_rows(field: GFField, mat, target_rank: int, pad_to: int) -> list[int]:
    """Deterministic greedy row selection.

    Scans rows in order, keeping each row that enlarges the row space, until
    `target_rank` independent rows are found; then pads the selection with
    the lowest-index unused rows up to `pad_to` total.  Returns sorted row
    indices.  Raises ValueError when the matrix cannot supply the requested
    rank or the pad size exceeds the number of rows.
    """
    m = as_matrix(field, mat)
    n_rows = m.shape[0]
    if pad_to > n_rows:
        raise ValueError(f"cannot select {pad_to} rows from {n_rows}")
    if target_rank > pad_to:
        raise ValueError("target rank exceeds requested selection size")
    basis = _RowBasis(field, m.shape[1])
    chosen: list[int] = []
    for i in range(n_rows):
        if basis.rank == target_rank:
            break
        if basis.try_add(m[i]):
            chosen.append(i)
    if basis.rank < target_rank:
        raise ValueError(f"matrix rank {basis.rank} is below the requested {target_rank}")
    used = set(chosen)
    for i in range(n_rows):
        if len(chosen) == pad_to:
            break
        if i not in used:
            chosen.append(i)
            used.add(i)
    return sorted(chosen)


class ColumnSpace:
    """Column space of a matrix with O(rank * height) membership tests."""

    def __init__(self, field: GFField, mat):
        m = as_matrix(field, mat)
        self._basis = _RowBasis(field, m.shape[0])
        for j in range(m.shape[1]):
            self._basis.try_add(m[:, j])

    @property
    def rank(self) -> int:
        return self._basis.rank

    def contains(self, vec) -> bool:
        v = np.asarray(vec, dtype=np.int64).reshape(-1)
        return not np.flatnonzero(self._basis.reduce(v)).size


def in_column_space(field: GFField, mat, vecs) -> bool:
    """True iff every column of `vecs` lies in the column space of `mat`."""
    m = as_matrix(field, mat)
    v = np.asarray(vecs, dtype=np.int64)
    if v.ndim == 1:
        v = v[:, None]
    base = rank(field, m)
    return rank(field, np.concatenate([m, v], axis=1)) == base


def right_kernel_basis(field: GFField, mat) -> np.ndarray:
    """Rows span {v : mat @ v = 0}; shape (n_cols - rank, n_cols)."""
    m = as_matrix(field, mat)
    r, pivots = rref(field, m)
    n_cols = m.shape[1]
    free = [c for c in range(n_cols) if c not in pivots]
    out = np.zeros((len(free), n_cols), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = field.neg(int(r[i, fc]))
    return out
