"""Piecewise-linear Galerkin and streamline-diffusion finite elements.

The weak form is eps (grad u, grad v) + (u_b, v + delta v_b) = (f, v + delta v_b)
with u_b = b . grad(u) and a per-element stabilization weight delta >= 0,
which adds artificial diffusion along the flow direction only.  delta = 0
recovers the plain Galerkin method; the packaged default activates
delta = h_K / 2 exactly on elements whose Peclet number exceeds one, so the
fine elements of a layer-adapted mesh stay unstabilized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from convdiff.linalg import SparseSystem, solve_sparse
from convdiff.mesh import Triangulation
from convdiff.problems import ProblemSpec2D

DELTA_TAGS = ("galerkin_zero", "coarse_half_h", "user_constant")


@dataclass(frozen=True)
class DeltaStrategy:
    """Rule producing the per-element stabilization weight."""

    tag: str
    constant: float = 0.0

    def __post_init__(self):
        if self.tag not in DELTA_TAGS:
            raise ValueError(f"unknown delta strategy {self.tag!r}")
        if self.tag == "user_constant" and self.constant < 0.0:
            raise ValueError("stabilization constant must be nonnegative")


GALERKIN = DeltaStrategy("galerkin_zero")
COARSE_HALF_H = DeltaStrategy("coarse_half_h")


def user_constant(c: float) -> DeltaStrategy:
    return DeltaStrategy("user_constant", float(c))


@dataclass(frozen=True)
class FemSpace:
    """Triangulation with interior unknowns and cached element geometry."""

    triangulation: Triangulation
    free_vertices: np.ndarray   # ascending indices of interior vertices
    areas: np.ndarray           # (T,)
    gradients: np.ndarray       # (T, 3, 2) constant basis gradients


def build_space(tri: Triangulation) -> FemSpace:
    areas = np.empty(len(tri.triangles))
    gradients = np.empty((len(tri.triangles), 3, 2))
    for k, t in enumerate(tri.triangles):
        areas[k], gradients[k] = _triangle_geometry(tri.vertices[t])
    free = np.flatnonzero(~tri.is_boundary)
    return FemSpace(tri, free, areas, gradients)


def _triangle_geometry(coords: np.ndarray):
    """Signed area and the three constant basis gradients of a triangle."""
    (x0, y0), (x1, y1), (x2, y2) = coords
    area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
    if area2 <= 0.0:
        raise ValueError("triangle is degenerate or negatively oriented")
    grads = np.array([
        [y1 - y2, x2 - x1],
        [y2 - y0, x0 - x2],
        [y0 - y1, x1 - x0],
    ]) / area2
    return 0.5 * area2, grads


def triangle_diameter(coords: np.ndarray) -> float:
    """Longest edge length."""
    (x0, y0), (x1, y1), (x2, y2) = coords
    return max(math.hypot(x1 - x0, y1 - y0),
               math.hypot(x2 - x1, y2 - y1),
               math.hypot(x0 - x2, y0 - y2))


def choose_delta(coords: np.ndarray, eps: float, b, strategy: DeltaStrategy) -> float:
    """Stabilization weight for one element.

    "coarse_half_h" gives h_K / 2 when the element Peclet number
    |b| h_K / (2 eps) exceeds one and zero otherwise; h_K is the diameter.
    """
    if strategy.tag == "galerkin_zero":
        return 0.0
    if strategy.tag == "user_constant":
        return strategy.constant
    h_k = triangle_diameter(coords)
    b_norm = math.hypot(float(b[0]), float(b[1]))
    if b_norm * h_k / (2.0 * eps) > 1.0:
        return 0.5 * h_k
    return 0.0


def local_sdfem(coords: np.ndarray, eps: float, b, delta_k: float, f):
    """Element matrix and load for one triangle.

    The load uses the three-vertex quadrature rule (exact for linear
    integrands), on the plain and on the streamline-weighted test function.
    """
    area, grads = _triangle_geometry(coords)
    bvec = np.array([float(b[0]), float(b[1])])
    bg = grads @ bvec                                    # b . grad(phi_i), constant
    mat = (eps * area * (grads @ grads.T)
           + (area / 3.0) * np.tile(bg, (3, 1))
           + delta_k * area * np.outer(bg, bg))
    fv = np.array([float(f(xx, yy)) for xx, yy in coords])
    load = (area / 3.0) * fv + delta_k * bg * (area / 3.0) * fv.sum()
    return mat, load


def assemble_fem(p: ProblemSpec2D, tri: Triangulation, strategy: DeltaStrategy) -> SparseSystem:
    """Element-by-element accumulation over the free (interior) vertices.

    Dirichlet data enters by nodal lifting: the interpolant of g is
    subtracted, which moves boundary columns onto the right-hand side.
    """
    n_vert = len(tri.vertices)
    free = np.flatnonzero(~tri.is_boundary)
    vert_to_free = np.full(n_vert, -1, dtype=np.int64)
    vert_to_free[free] = np.arange(free.size)

    g_vals = np.zeros(n_vert)
    for v in np.flatnonzero(tri.is_boundary):
        g_vals[v] = p.g(tri.vertices[v, 0], tri.vertices[v, 1])

    rows, cols, vals = [], [], []
    rhs = np.zeros(free.size)
    for t in tri.triangles:
        coords = tri.vertices[t]
        delta_k = choose_delta(coords, p.eps, p.b, strategy)
        mat, load = local_sdfem(coords, p.eps, p.b, delta_k, p.f)
        for a in range(3):
            ra = vert_to_free[t[a]]
            if ra < 0:
                continue
            rhs[ra] += load[a]
            for c in range(3):
                rc = vert_to_free[t[c]]
                if rc < 0:
                    rhs[ra] -= mat[a, c] * g_vals[t[c]]
                else:
                    rows.append(ra); cols.append(rc); vals.append(mat[a, c])
    return SparseSystem.from_coo(rows, cols, vals, rhs)


def solve_fem(p: ProblemSpec2D, tri: Triangulation, strategy: DeltaStrategy) -> np.ndarray:
    """Nodal values over all vertices; boundary vertices carry interpolated g."""
    system = assemble_fem(p, tri, strategy)
    free_values = solve_sparse(system)
    out = np.empty(len(tri.vertices))
    boundary = tri.is_boundary
    out[boundary] = [p.g(xx, yy) for xx, yy in tri.vertices[boundary]]
    out[~boundary] = free_values
    return out


def values_on_grid(tri: Triangulation, values: np.ndarray) -> np.ndarray:
    """Reshape per-vertex values of a tensor-grid triangulation to [i, j] layout."""
    if tri.grid_shape is None:
        raise ValueError("triangulation does not come from a tensor grid")
    nx, ny = tri.grid_shape
    return np.asarray(values, dtype=float).reshape(ny + 1, nx + 1).T
