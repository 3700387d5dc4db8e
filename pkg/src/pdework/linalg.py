"""Dense, tridiagonal and CSR linear algebra.

Three solver paths are provided: the Thomas algorithm for tridiagonal
systems, conjugate gradients for sparse SPD systems, and LU with partial
pivoting for small dense systems.  Vectors and dense matrices are plain
float64 numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractError, NumericalError, SingularSystemError, StructuralError

THOMAS_PIVOT_TOL = 1e-14
SYMMETRY_TOL = 1e-12


def _as_vector(x, name="x") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise StructuralError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise StructuralError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix stored as its three diagonals."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if n == 0 or len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise StructuralError(
                f"inconsistent diagonal lengths {len(self.sub)}, {n}, {len(self.sup)}"
            )

    @property
    def n(self) -> int:
        return len(self.diag)

    def toarray(self) -> np.ndarray:
        return (
            np.diag(np.asarray(self.diag, float))
            + np.diag(np.asarray(self.sub, float), -1)
            + np.diag(np.asarray(self.sup, float), 1)
        )

    def matvec(self, x) -> np.ndarray:
        x = _as_vector(x)
        if len(x) != self.n:
            raise StructuralError(f"vector length {len(x)} != {self.n}")
        y = np.asarray(self.diag, float) * x
        y[1:] += np.asarray(self.sub, float) * x[:-1]
        y[:-1] += np.asarray(self.sup, float) * x[1:]
        return y


@dataclass(frozen=True)
class CsrMatrix:
    """Square compressed-sparse-row matrix."""

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.row_ptr[-1])

    def row_indices(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.n), np.diff(self.row_ptr))

    def triplets(self):
        return self.row_indices(), self.col_idx.copy(), self.values.copy()

    def toarray(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        np.add.at(dense, (self.row_indices(), self.col_idx), self.values)
        return dense

    def diagonal(self) -> np.ndarray:
        rows = self.row_indices()
        d = np.zeros(self.n)
        on_diag = rows == self.col_idx
        d[rows[on_diag]] = self.values[on_diag]
        return d

    def transpose(self) -> "CsrMatrix":
        rows, cols, vals = self.triplets()
        return csr_from_arrays(cols, rows, vals, self.n)

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        # A - A^T on the union pattern
        rows, cols, vals = self.triplets()
        d = csr_from_arrays(
            np.concatenate([rows, cols]),
            np.concatenate([cols, rows]),
            np.concatenate([vals, -vals]),
            self.n,
        )
        scale = max(1.0, float(np.max(np.abs(self.values), initial=0.0)))
        return bool(np.max(np.abs(d.values), initial=0.0) <= tol * scale)

    def __matmul__(self, x):
        return spmv(self, x)


def csr_from_arrays(rows, cols, vals, n: int) -> CsrMatrix:
    """Build a CSR matrix from parallel index/value arrays (duplicates summed)."""
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    vals = np.asarray(vals, dtype=float).ravel()
    if not (len(rows) == len(cols) == len(vals)):
        raise StructuralError("rows, cols and values must have equal length")
    if n < 1:
        raise StructuralError(f"dimension must be positive, got {n}")
    if len(rows) and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
        raise StructuralError(f"entry index outside [0, {n})")

    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if len(rows):
        new_slot = np.ones(len(rows), dtype=bool)
        new_slot[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new_slot)
        # reduceat sums each run left to right, so the result is order-stable
        touched = np.add.reduceat((vals != 0).astype(np.int64), starts) > 0
        vals = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
        # a slot that received a nonzero and summed to zero is dropped;
        # a slot that only ever held explicit zeros is kept
        keep = (vals != 0) | ~touched
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(row_ptr, rows + 1, 1)
    row_ptr = np.cumsum(row_ptr)
    return CsrMatrix(n=n, row_ptr=row_ptr, col_idx=cols, values=vals)


def csr_from_triplets(entries, n: int) -> CsrMatrix:
    """CSR matrix from an iterable of ``(row, col, value)`` triples.

    Duplicate slots are summed and columns are sorted within each row.  A slot
    that only ever received explicit zeros is still stored.
    """
    entries = list(entries)
    if entries:
        rows, cols, vals = zip(*entries)
    else:
        rows, cols, vals = (), (), ()
    for r, c in zip(rows, cols):
        if int(r) != r or int(c) != c:
            raise StructuralError(f"non-integer index ({r}, {c})")
    return csr_from_arrays(rows, cols, vals, n)


def spmv(A: CsrMatrix, x) -> np.ndarray:
    """Sparse matrix-vector product ``A @ x``."""
    x = _as_vector(x)
    if len(x) != A.n:
        raise StructuralError(f"vector length {len(x)} != matrix dimension {A.n}")
    products = A.values * x[A.col_idx]
    return np.bincount(A.row_indices(), weights=products, minlength=A.n)


def thomas_solve(T: Tridiagonal, b) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution."""
    b = _as_vector(b, "b")
    n = T.n
    if len(b) != n:
        raise StructuralError(f"rhs length {len(b)} != {n}")
    a = np.asarray(T.sub, float)
    d = np.asarray(T.diag, float)
    c = np.asarray(T.sup, float)

    cp = np.zeros(n)
    dp = np.zeros(n)
    pivot = d[0]
    if abs(pivot) < THOMAS_PIVOT_TOL:
        raise SingularSystemError("zero pivot at row 0")
    if n > 1:
        cp[0] = c[0] / pivot
    dp[0] = b[0] / pivot
    for i in range(1, n):
        pivot = d[i] - a[i - 1] * cp[i - 1]
        if abs(pivot) < THOMAS_PIVOT_TOL:
            raise SingularSystemError(f"zero pivot at row {i}")
        if i < n - 1:
            cp[i] = c[i] / pivot
        dp[i] = (b[i] - a[i - 1] * dp[i - 1]) / pivot

    x = dp
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


class CGResult(NamedTuple):
    x: np.ndarray
    iterations: int
    relative_residual: float
    converged: bool


def cg_solve(A: CsrMatrix, b, tol: float = 1e-10, max_iter: int | None = None, x0=None) -> CGResult:
    """Conjugate gradients for a symmetric positive definite CSR system.

    Stops when ``||b - A x|| <= tol * ||b||``.  If ``max_iter`` (default
    ``10 * n``) is exhausted, the iterate with the smallest residual seen is
    returned with ``converged=False``.
    """
    b = _as_vector(b, "b")
    if len(b) != A.n:
        raise StructuralError(f"rhs length {len(b)} != matrix dimension {A.n}")
    if not A.is_symmetric():
        raise ContractError("conjugate gradients requires a symmetric matrix")
    if max_iter is None:
        max_iter = 10 * A.n

    x = np.zeros(A.n) if x0 is None else _as_vector(x0, "x0").copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return CGResult(np.zeros(A.n), 0, 0.0, True)

    r = b - spmv(A, x)
    rel = np.linalg.norm(r) / bnorm
    if rel <= tol:
        return CGResult(x, 0, float(rel), True)
    p = r.copy()
    rr = r @ r
    best_x, best_rel = x.copy(), rel

    for it in range(1, max_iter + 1):
        Ap = spmv(A, p)
        curvature = p @ Ap
        if not curvature > 0.0:
            raise NumericalError(f"CG breakdown at iteration {it}: p^T A p = {curvature:g}")
        alpha = rr / curvature
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = r @ r
        rel = np.sqrt(rr_new) / bnorm
        if rel < best_rel:
            best_x, best_rel = x.copy(), rel
        if rel <= tol:
            true_rel = np.linalg.norm(b - spmv(A, x)) / bnorm
            return CGResult(x, it, float(max(true_rel, 0.0)), True)
        p = r + (rr_new / rr) * p
        rr = rr_new

    true_rel = np.linalg.norm(b - spmv(A, best_x)) / bnorm
    return CGResult(best_x, max_iter, float(true_rel), False)


def lu_factor(A, pivot_tol: float = 1e-14):
    """In-place Doolittle LU with partial pivoting.

    Returns ``(LU, perm)`` where ``A[perm] = L @ U`` with unit-lower ``L``
    stored strictly below the diagonal of ``LU``.
    """
    LU = np.array(A, dtype=float)
    if LU.ndim != 2 or LU.shape[0] != LU.shape[1]:
        raise StructuralError(f"LU needs a square matrix, got shape {LU.shape}")
    n = LU.shape[0]
    perm = np.arange(n)
    threshold = pivot_tol * max(1.0, float(np.max(np.abs(LU), initial=0.0)))
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if abs(LU[p, k]) < threshold:
            raise SingularSystemError(f"pivot {LU[p, k]:.3e} below threshold in column {k}")
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(A, b) -> np.ndarray:
    """Solve a dense square system with partial-pivoting LU."""
    b = _as_vector(b, "b")
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != len(b):
        raise StructuralError(f"matrix shape {A.shape} incompatible with rhs length {len(b)}")
    LU, perm = lu_factor(A)
    n = len(b)
    y = b[perm].copy()
    for i in range(1, n):
        y[i] -= LU[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - LU[i, i + 1:] @ y[i + 1:]) / LU[i, i]
    return y
