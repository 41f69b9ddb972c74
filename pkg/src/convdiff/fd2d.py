"""Upwind finite differences for -eps Lap(u) + b . grad(u) = f on the unit square.

The scheme combines the per-axis nonuniform central second difference with
backward differences for the convective terms (b1, b2 >= 0), giving at most
five nonzeros per row.  Unknowns are ordered lexicographically over the
interior grid points (y index outer, x index inner) and Dirichlet data is
eliminated into the right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convdiff.linalg import SparseSystem, solve_sparse
from convdiff.mesh import TensorMesh2D
from convdiff.problems import ProblemSpec2D


@dataclass(frozen=True)
class Grid2DSolution:
    """Nodal values on a tensor mesh; values[i, j] sits at (x_i, y_j)."""

    mesh: TensorMesh2D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.mesh.shape:
            raise ValueError("values must match the grid shape")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def assemble_upwind_2d(p: ProblemSpec2D, m: TensorMesh2D) -> SparseSystem:
    """Five-point upwind system over the interior grid points.

    Requires nonnegative convection components (layers at the x = 1 and/or
    y = 1 edges); a zero component simply drops that upwind term.
    """
    b1, b2 = p.b
    if b1 < 0.0 or b2 < 0.0:
        raise ValueError("convection components must be nonnegative")
    x = m.x_mesh.nodes
    y = m.y_mesh.nodes
    hx = m.x_mesh.widths
    hy = m.y_mesh.widths
    nx = m.x_mesh.n
    ny = m.y_mesh.n
    if nx < 2 or ny < 2:
        raise ValueError("need at least one interior grid point per axis")

    n_unknowns = (nx - 1) * (ny - 1)
    rows, cols, vals = [], [], []
    rhs = np.zeros(n_unknowns)

    def index(i, j):
        return (j - 1) * (nx - 1) + (i - 1)

    for j in range(1, ny):
        kl, kr = hy[j - 1], hy[j]
        kbar = 0.5 * (kl + kr)
        for i in range(1, nx):
            hl, hr = hx[i - 1], hx[i]
            hbar = 0.5 * (hl + hr)
            row = index(i, j)

            cw = -p.eps / (hl * hbar) - b1 / hl
            ce = -p.eps / (hr * hbar)
            cs = -p.eps / (kl * kbar) - b2 / kl
            cn = -p.eps / (kr * kbar)
            cc = (p.eps * (1.0 / hl + 1.0 / hr) / hbar
                  + p.eps * (1.0 / kl + 1.0 / kr) / kbar
                  + b1 / hl + b2 / kl)

            rows.append(row); cols.append(row); vals.append(cc)
            rhs[row] = p.f(x[i], y[j])

            for coef, ii, jj in ((cw, i - 1, j), (ce, i + 1, j),
                                 (cs, i, j - 1), (cn, i, j + 1)):
                if ii in (0, nx) or jj in (0, ny):
                    rhs[row] -= coef * p.g(x[ii], y[jj])
                else:
                    rows.append(row); cols.append(index(ii, jj)); vals.append(coef)

    return SparseSystem.from_coo(rows, cols, vals, rhs)


def solve_2d(p: ProblemSpec2D, m: TensorMesh2D) -> Grid2DSolution:
    """Assemble, solve, and write the Dirichlet data back onto the grid."""
    interior = solve_sparse(assemble_upwind_2d(p, m))
    nx = m.x_mesh.n
    ny = m.y_mesh.n
    values = np.empty((nx + 1, ny + 1))
    x = m.x_mesh.nodes
    y = m.y_mesh.nodes
    for i in (0, nx):
        for j in range(ny + 1):
            values[i, j] = p.g(x[i], y[j])
    for j in (0, ny):
        for i in range(nx + 1):
            values[i, j] = p.g(x[i], y[j])
    values[1:-1, 1:-1] = interior.reshape(ny - 1, nx - 1).T
    return Grid2DSolution(m, values)


def format_grid_values(x: np.ndarray, y: np.ndarray, values: np.ndarray) -> str:
    """Space-separated "x y value" triples, blank line between constant-y rows."""
    blocks = []
    for j in range(y.size):
        blocks.append("\n".join(
            f"{float(x[i])!r} {float(y[j])!r} {float(values[i, j])!r}"
            for i in range(x.size)))
    return "\n\n".join(blocks) + "\n"


def format_grid_solution(sol: Grid2DSolution) -> str:
    return format_grid_values(sol.mesh.x_mesh.nodes, sol.mesh.y_mesh.nodes, sol.values)
