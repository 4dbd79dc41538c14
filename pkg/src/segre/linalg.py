"""Small exact linear algebra over the Gaussian rationals.

Plain Gaussian elimination on lists of lists of ``GaussianRational``.  The
matrices in this engine are tiny (a handful of rows and columns, or a few
hundred for annihilator kernels), so clarity and exactness win over any
clever pivoting or fraction-free tricks.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .series import ZERO, ONE, GaussianRational

Matrix = List[List[GaussianRational]]


def copy_matrix(matrix: Sequence[Sequence[GaussianRational]]) -> Matrix:
    return [list(row) for row in matrix]


def rank_with_pivots(matrix: Sequence[Sequence[GaussianRational]]) -> Tuple[int, List[int], List[int]]:
    """Exact rank plus the row and column indices of the pivot positions.

    The pivot rows/columns index an invertible r x r submatrix of the input.
    """
    work = copy_matrix(matrix)
    if not work:
        return 0, [], []
    n_rows, n_cols = len(work), len(work[0])
    pivot_rows: List[int] = []
    pivot_cols: List[int] = []
    row_order = list(range(n_rows))
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if work[i][col]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        row_order[r], row_order[pivot] = row_order[pivot], row_order[r]
        pivot_rows.append(row_order[r])
        pivot_cols.append(col)
        inv = work[r][col].inverse()
        for i in range(r + 1, n_rows):
            factor = work[i][col]
            if not factor:
                continue
            scaled = factor * inv
            for j in range(col, n_cols):
                work[i][j] = work[i][j] - scaled * work[r][j]
        r += 1
        if r == n_rows:
            break
    return r, sorted(pivot_rows), pivot_cols


def rank(matrix: Sequence[Sequence[GaussianRational]]) -> int:
    return rank_with_pivots(matrix)[0]


def rref(matrix: Sequence[Sequence[GaussianRational]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    work = copy_matrix(matrix)
    if not work:
        return work, []
    n_rows, n_cols = len(work), len(work[0])
    pivot_cols: List[int] = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if work[i][col]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = work[r][col].inverse()
        work[r] = [entry * inv for entry in work[r]]
        for i in range(n_rows):
            if i == r or not work[i][col]:
                continue
            factor = work[i][col]
            work[i] = [a - factor * b for a, b in zip(work[i], work[r])]
        pivot_cols.append(col)
        r += 1
        if r == n_rows:
            break
    reduced = [row for row in work if any(row)]
    return reduced, pivot_cols


def nullspace(matrix: Sequence[Sequence[GaussianRational]], n_cols: Optional[int] = None) -> Matrix:
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    if not matrix:
        if n_cols is None:
            raise ValueError("empty matrix needs an explicit column count")
        return [[ONE if i == j else ZERO for i in range(n_cols)] for j in range(n_cols)]
    n_cols = len(matrix[0])
    reduced, pivot_cols = rref(matrix)
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(n_cols) if c not in pivot_set]
    basis: Matrix = []
    for free in free_cols:
        vec = [ZERO] * n_cols
        vec[free] = ONE
        for row, pcol in zip(reduced, pivot_cols):
            vec[pcol] = -row[free]
        basis.append(vec)
    return basis


def invert(matrix: Sequence[Sequence[GaussianRational]]) -> Matrix:
    """Inverse of a square matrix; raises ValueError when singular."""
    n = len(matrix)
    work = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(matrix)]
    reduced, pivot_cols = rref(work)
    if pivot_cols != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in reduced]


def span_dimension(vectors: Sequence[Sequence[GaussianRational]]) -> int:
    return rank(list(vectors)) if vectors else 0


def sparse_kernel(columns: Sequence[dict]) -> List[dict]:
    """Kernel combinations of sparsely given columns.

    Each column is a dict mapping orderable row keys to nonzero entries.
    Columns are reduced incrementally against the independent ones seen so
    far; every column that reduces to zero yields one kernel vector, given
    as a dict {column index: coefficient}.  Output order is deterministic.
    """
    basis: List[Tuple[object, dict, dict]] = []
    kernel: List[dict] = []
    for index, column in enumerate(columns):
        vec = dict(column)
        combination = {index: ONE}
        for pivot, basis_vec, basis_comb in basis:
            factor = vec.get(pivot)
            if not factor:
                continue
            for key, value in basis_vec.items():
                new = vec.get(key, ZERO) - factor * value
                if new:
                    vec[key] = new
                else:
                    vec.pop(key, None)
            for key, value in basis_comb.items():
                new = combination.get(key, ZERO) - factor * value
                if new:
                    combination[key] = new
                else:
                    combination.pop(key, None)
        if vec:
            pivot = min(vec)
            inv = vec[pivot].inverse()
            basis.append(
                (
                    pivot,
                    {k: v * inv for k, v in vec.items()},
                    {k: v * inv for k, v in combination.items()},
                )
            )
        else:
            kernel.append(combination)
    return kernel


def sparse_rref(rows: Sequence[dict]) -> List[dict]:
    """Reduced row echelon form of sparse rows keyed by orderable column keys."""
    reduced: List[dict] = []
    for row in rows:
        vec = dict(row)
        for other in reduced:
            pivot = min(other)
            factor = vec.get(pivot)
            if not factor:
                continue
            for key, value in other.items():
                new = vec.get(key, ZERO) - factor * value
                if new:
                    vec[key] = new
                else:
                    vec.pop(key, None)
        if vec:
            pivot = min(vec)
            inv = vec[pivot].inverse()
            reduced.append({k: v * inv for k, v in vec.items()})
    # back-substitute so every pivot column is cleared from the other rows
    reduced.sort(key=lambda r: min(r))
    for i in range(len(reduced) - 1, -1, -1):
        pivot = min(reduced[i])
        for j in range(i):
            factor = reduced[j].get(pivot)
            if not factor:
                continue
            for key, value in reduced[i].items():
                new = reduced[j].get(key, ZERO) - factor * value
                if new:
                    reduced[j][key] = new
                else:
                    reduced[j].pop(key, None)
    return reduced


class SpanTracker:
    """Incremental exact span: feed vectors, learn which ones grow the span."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self._rows: Matrix = []
        self._pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add(self, vector: Sequence[GaussianRational]) -> bool:
        """Reduce against the current basis; returns True if the span grew."""
        if len(vector) != self.dimension:
            raise ValueError("vector length does not match tracker dimension")
        vec = list(vector)
        for row, pivot in zip(self._rows, self._pivots):
            if vec[pivot]:
                factor = vec[pivot]
                vec = [a - factor * b for a, b in zip(vec, row)]
        lead = next((i for i, entry in enumerate(vec) if entry), None)
        if lead is None:
            return False
        inv = vec[lead].inverse()
        vec = [entry * inv for entry in vec]
        self._rows.append(vec)
        self._pivots.append(lead)
        return True
