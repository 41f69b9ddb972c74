"""Tridiagonal and compressed-sparse-row systems, solvers, and structure checks.

The direct solvers are deliberately small: Thomas elimination for tridiagonal
systems and LAPACK banded elimination for the narrow-band matrices produced by
the 2D discretizations.  Wide-band systems fall back to BiCGSTAB with diagonal
preconditioning.  A sign/dominance check flags matrices that fail the usual
sufficient conditions for being an M-matrix, which is the structural property
behind oscillation-free solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg


class NumericalError(RuntimeError):
    """A solve produced no acceptable result."""


class ZeroPivotError(NumericalError):
    def __init__(self, index: int):
        super().__init__(f"zero pivot at elimination step {index}")
        self.index = index


class IterationLimitError(NumericalError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"iterative solver hit the {iterations}-iteration cap "
            f"(last relative residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


@dataclass
class TridiagonalSystem:
    """Tridiagonal matrix plus right-hand side, interior unknowns only."""

    lower: np.ndarray   # (n-1,) sub-diagonal
    diag: np.ndarray    # (n,)   main diagonal
    upper: np.ndarray   # (n-1,) super-diagonal
    rhs: np.ndarray     # (n,)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.diag.size
        if n < 1:
            raise ValueError("empty system")
        if self.lower.size != n - 1 or self.upper.size != n - 1 or self.rhs.size != n:
            raise ValueError("inconsistent tridiagonal array lengths")
        for arr in (self.lower, self.diag, self.upper, self.rhs):
            if not np.all(np.isfinite(arr)):
                raise ValueError("system entries must be finite")

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.lower * x[:-1]
        y[:-1] += self.upper * x[1:]
        return y


@dataclass
class SparseSystem:
    """Square CSR matrix plus right-hand side.

    Column indices are strictly increasing within each row and explicit zeros
    are dropped on construction.  The unknown ordering is whatever the
    assembler used (lexicographic over interior grid points or over free
    vertices for the discretizations in this package).
    """

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        mat = scipy.sparse.csr_matrix(
            (np.asarray(self.data, dtype=float),
             np.asarray(self.indices, dtype=np.int64),
             np.asarray(self.indptr, dtype=np.int64)),
            shape=(len(self.rhs), len(self.rhs)),
        )
        mat.sort_indices()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        self.indptr = mat.indptr
        self.indices = mat.indices
        self.data = mat.data
        self.rhs = np.asarray(self.rhs, dtype=float)
        if not np.all(np.isfinite(self.data)) or not np.all(np.isfinite(self.rhs)):
            raise ValueError("system entries must be finite")
        if self.indices.size and self.indices.max() >= self.n:
            raise ValueError("column index out of range for a square matrix")

    @classmethod
    def from_coo(cls, rows, cols, values, rhs) -> "SparseSystem":
        mat = scipy.sparse.coo_matrix(
            (values, (rows, cols)), shape=(len(rhs), len(rhs))).tocsr()
        return cls(mat.indptr, mat.indices, mat.data, rhs)

    @property
    def n(self) -> int:
        return self.rhs.size

    def to_csr(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def bandwidth(self) -> int:
        if self.indices.size == 0:
            return 0
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return int(np.abs(rows - self.indices).max())


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas elimination.  Raises ZeroPivotError naming the failing step."""
    n = sys.n
    gamma = np.empty(n - 1) if n > 1 else np.empty(0)
    z = np.empty(n)
    piv = sys.diag[0]
    if piv == 0.0:
        raise ZeroPivotError(0)
    z[0] = sys.rhs[0] / piv
    for i in range(1, n):
        gamma[i - 1] = sys.upper[i - 1] / piv
        piv = sys.diag[i] - sys.lower[i - 1] * gamma[i - 1]
        if piv == 0.0:
            raise ZeroPivotError(i)
        z[i] = (sys.rhs[i] - sys.lower[i - 1] * z[i - 1]) / piv
    x = np.empty(n)
    x[-1] = z[-1]
    for i in range(n - 2, -1, -1):
        x[i] = z[i] - gamma[i] * x[i + 1]
    _check_residual(sys.matvec(x) - sys.rhs, _tridiag_inf_norm(sys), x, sys.rhs, 1e-12)
    return x


def solve_sparse(sys: SparseSystem, tol: float = 1e-10, method: str = "auto") -> np.ndarray:
    """Solve a CSR system to the requested relative residual.

    Narrow-band matrices (bandwidth at most twice the typical grid dimension,
    inferred from the unknown count) go to direct banded elimination;
    everything else goes to BiCGSTAB with diagonal preconditioning, capped at
    20 iterations per unknown.
    """
    if method not in ("auto", "banded", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    n = sys.n
    bw = sys.bandwidth()
    if method == "auto":
        method = "banded" if bw <= 2 * (math.isqrt(n) + 2) else "iterative"

    if method == "banded":
        x = _solve_banded(sys, bw)
    else:
        x = _solve_bicgstab(sys, tol)

    a_norm = _csr_inf_norm(sys)
    resid = sys.to_csr() @ x - sys.rhs
    _check_residual(resid, a_norm, x, sys.rhs, tol)
    return x


def _solve_banded(sys: SparseSystem, bw: int) -> np.ndarray:
    n = sys.n
    ab = np.zeros((2 * bw + 1, n))
    coo = sys.to_csr().tocoo()
    ab[bw + coo.row - coo.col, coo.col] = coo.data
    try:
        return scipy.linalg.solve_banded((bw, bw), ab, sys.rhs)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"banded elimination failed: {exc}") from exc


def _solve_bicgstab(sys: SparseSystem, tol: float) -> np.ndarray:
    mat = sys.to_csr()
    diag = mat.diagonal()
    if np.any(diag == 0.0):
        raise NumericalError("diagonal preconditioner needs a zero-free diagonal")
    precond = scipy.sparse.linalg.LinearOperator(
        mat.shape, matvec=lambda v: v / diag)
    maxiter = 20 * sys.n
    x, info = scipy.sparse.linalg.bicgstab(
        mat, sys.rhs, rtol=max(tol * 1e-3, 1e-14), atol=0.0,
        maxiter=maxiter, M=precond)
    if info != 0:
        resid = mat @ x - sys.rhs
        rel = _relative_residual(resid, _csr_inf_norm(sys), x, sys.rhs)
        raise IterationLimitError(rel, maxiter)
    return x


@dataclass
class MMatrixReport:
    """Outcome of the sign/dominance sufficient conditions."""

    is_candidate: bool
    violations: list = field(default_factory=list)


def is_m_matrix(sys) -> MMatrixReport:
    """Check positive diagonal, non-positive off-diagonals, weak row dominance.

    Strict dominance is required in at least one row.  Every violating entry
    is reported.  The conditions are sufficient, not necessary; they hold for
    all stabilized schemes assembled in this package.
    """
    if isinstance(sys, TridiagonalSystem):
        rows = _tridiag_rows(sys)
    elif isinstance(sys, SparseSystem):
        rows = _csr_rows(sys)
    else:
        raise TypeError("expected a TridiagonalSystem or SparseSystem")

    violations = []
    any_strict = False
    for i, entries in rows:
        diag_val = 0.0
        off_sum = 0.0
        scale = max((abs(v) for _, v in entries), default=0.0)
        for j, val in entries:
            if j == i:
                diag_val = val
            else:
                if val > 1e-13 * scale:
                    violations.append(f"off-diagonal ({i}, {j}) = {val!r} is positive")
                off_sum += abs(val)
        if diag_val <= 0.0:
            violations.append(f"diagonal ({i}, {i}) = {diag_val!r} is not positive")
        slack = abs(diag_val) - off_sum
        if slack < -1e-12 * max(scale, 1.0):
            violations.append(f"row {i} is not weakly diagonally dominant")
        elif slack > 1e-12 * max(scale, 1.0):
            any_strict = True
    if not any_strict:
        violations.append("no row is strictly diagonally dominant")
    return MMatrixReport(is_candidate=not violations, violations=violations)


def tridiagonal_to_sparse(sys: TridiagonalSystem) -> SparseSystem:
    """Re-express a tridiagonal system in CSR form."""
    n = sys.n
    rows, cols, vals = [], [], []
    for i in range(n):
        if i > 0:
            rows.append(i); cols.append(i - 1); vals.append(sys.lower[i - 1])
        rows.append(i); cols.append(i); vals.append(sys.diag[i])
        if i < n - 1:
            rows.append(i); cols.append(i + 1); vals.append(sys.upper[i])
    return SparseSystem.from_coo(rows, cols, vals, sys.rhs.copy())


def format_coo(sys) -> str:
    """Coordinate text dump: "i j value" per nonzero, then "rhs i value" lines."""
    if isinstance(sys, TridiagonalSystem):
        sys = tridiagonal_to_sparse(sys)
    lines = []
    for i in range(sys.n):
        for k in range(sys.indptr[i], sys.indptr[i + 1]):
            lines.append(f"{i} {sys.indices[k]} {float(sys.data[k])!r}")
    lines += [f"rhs {i} {float(v)!r}" for i, v in enumerate(sys.rhs)]
    return "\n".join(lines) + "\n"


def _tridiag_rows(sys: TridiagonalSystem):
    for i in range(sys.n):
        entries = []
        if i > 0:
            entries.append((i - 1, sys.lower[i - 1]))
        entries.append((i, sys.diag[i]))
        if i < sys.n - 1:
            entries.append((i + 1, sys.upper[i]))
        yield i, entries


def _csr_rows(sys: SparseSystem):
    for i in range(sys.n):
        lo, hi = sys.indptr[i], sys.indptr[i + 1]
        yield i, list(zip(sys.indices[lo:hi], sys.data[lo:hi]))


def _tridiag_inf_norm(sys: TridiagonalSystem) -> float:
    row_sums = np.abs(sys.diag).copy()
    row_sums[1:] += np.abs(sys.lower)
    row_sums[:-1] += np.abs(sys.upper)
    return float(row_sums.max())


def _csr_inf_norm(sys: SparseSystem) -> float:
    if sys.data.size == 0:
        return 0.0
    mat = sys.to_csr()
    return float(np.abs(mat).sum(axis=1).max())


def _relative_residual(resid, a_norm, x, rhs) -> float:
    denom = a_norm * np.abs(x).max(initial=0.0) + np.abs(rhs).max(initial=0.0)
    if denom == 0.0:
        return float(np.abs(resid).max(initial=0.0))
    return float(np.abs(resid).max(initial=0.0) / denom)


def _check_residual(resid, a_norm, x, rhs, tol) -> None:
    rel = _relative_residual(resid, a_norm, x, rhs)
    if not rel <= tol:
        raise NumericalError(f"solve left relative residual {rel:.3e} above {tol:.1e}")
