"""Layer-adapted meshes on [0, 1], tensor-product meshes, and triangulations.

Three 1D mesh families are provided: uniform, piecewise-uniform with a
coarse/fine transition point near the outflow boundary x = 1, and graded
meshes whose node distribution inverts the exponential layer profile.
Tensor products of the piecewise-uniform meshes cover the unit square, and
each mesh rectangle can be bisected into two triangles for use with a
piecewise-linear finite element method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MESH_KINDS = ("uniform", "shishkin", "bakhvalov")


@dataclass(frozen=True)
class Mesh1D:
    """Partition of [0, 1] into ``n`` intervals.

    ``lam`` is the offset of the coarse/fine transition point from the layer
    boundary x = 1 (0 when the mesh has no transition point).  Instances are
    immutable and safe to share between threads.
    """

    nodes: np.ndarray
    kind: str
    lam: float = 0.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a mesh needs at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("mesh must span exactly [0, 1]")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        if self.kind not in MESH_KINDS:
            raise ValueError(f"unknown mesh kind {self.kind!r}")
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def n(self) -> int:
        """Number of mesh intervals."""
        return self.nodes.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)


@dataclass(frozen=True)
class TensorMesh2D:
    """Cartesian product of two 1D meshes on the unit square."""

    x_mesh: Mesh1D
    y_mesh: Mesh1D

    @property
    def shape(self) -> tuple[int, int]:
        """Grid point counts (nx + 1, ny + 1)."""
        return (self.x_mesh.n + 1, self.y_mesh.n + 1)


@dataclass(frozen=True)
class Triangulation:
    """Conforming triangle mesh with counterclockwise elements.

    ``grid_shape`` records the generating tensor grid (nx, ny) when the
    triangulation came from a tensor mesh; vertex ``j * (nx + 1) + i`` then
    sits at grid point (i, j).
    """

    vertices: np.ndarray     # (V, 2) float
    triangles: np.ndarray    # (T, 3) int, counterclockwise
    is_boundary: np.ndarray  # (V,) bool
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        triangles = np.asarray(self.triangles, dtype=np.int64)
        is_boundary = np.asarray(self.is_boundary, dtype=bool)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ValueError("vertices must be (V, 2)")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ValueError("triangles must be (T, 3)")
        if is_boundary.shape != (vertices.shape[0],):
            raise ValueError("need one boundary flag per vertex")
        if np.any(signed_areas(vertices, triangles) <= 0.0):
            raise ValueError("all triangles must have positive signed area")
        for arr in (vertices, triangles, is_boundary):
            arr.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)
        object.__setattr__(self, "is_boundary", is_boundary)


def signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Signed area of each triangle (positive for counterclockwise)."""
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                  - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))


def uniform_mesh_1d(n: int) -> Mesh1D:
    """Equispaced mesh with ``n`` intervals."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return Mesh1D(np.linspace(0.0, 1.0, n + 1), "uniform", 0.0)


def shishkin_mesh_1d(n: int, eps: float, b: float, lam: float | None = None) -> Mesh1D:
    """Piecewise-uniform mesh with transition point 1 - lam for a layer at x = 1.

    The transition offset is min(1/2, (4 eps / b) ln n); the cap keeps both
    sub-regions nonempty when eps is large.  ``n/2`` equal intervals cover
    [0, 1 - lam] and ``n/2`` equal intervals cover [1 - lam, 1].  Passing an
    explicit ``lam`` (used when nesting a refined mesh inside a coarse one)
    overrides the formula.
    """
    _check_even(n)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if b <= 0.0:
        raise ValueError("b must be positive")
    if lam is None:
        lam = min(0.5, (4.0 * eps / b) * math.log(n))
    if not 0.0 < lam <= 0.5:
        raise ValueError("transition offset must lie in (0, 1/2]")
    cut = 1.0 - lam
    half = n // 2
    nodes = np.concatenate([
        np.linspace(0.0, cut, half + 1),
        np.linspace(cut, 1.0, half + 1)[1:],
    ])
    return Mesh1D(nodes, "shishkin", lam)


def bakhvalov_mesh_1d(n: int, eps: float, b: float,
                      sigma: float = 2.0, q: float = 0.5) -> Mesh1D:
    """Graded mesh for a layer at x = 1, fine near the layer and coarse away.

    Nodes are x_i = phi(i/n).  On [1 - tau, 1] the generating function inverts
    the layer exponential, phi(t) = 1 + (sigma eps / b) ln(1 - (1 - t)/q), so
    the layer function is equidistributed over the fine nodes; on [0, 1 - tau]
    phi continues linearly and tangentially down to phi(0) = 0.  The matching
    point tau in (0, q) is located by bisection.  When eps is too large for a
    tangency point to exist the mesh degenerates gracefully to the uniform one
    (kind tag "uniform").
    """
    _check_even(n)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if b <= 0.0:
        raise ValueError("b must be positive")
    if sigma < 2.0:
        raise ValueError("sigma must be >= 2")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")

    a = sigma * eps / b

    def tangency_residual(tau: float) -> float:
        # Line through the graded branch at t = 1 - tau with the graded slope
        # must pass through (0, 0).
        return 1.0 + a * math.log1p(-tau / q) - (1.0 - tau) * a / (q - tau)

    if tangency_residual(0.0) <= 0.0:
        # a/q >= 1: layer region would swallow the whole interval.
        return uniform_mesh_1d(n)

    lo, hi = 0.0, q
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if not mid > lo or not mid < hi:
            break
        if tangency_residual(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)

    slope = a / (q - tau)
    t = np.arange(n + 1) / n
    graded = t > 1.0 - tau
    nodes = slope * t
    nodes[graded] = 1.0 + a * np.log1p(-(1.0 - t[graded]) / q)
    nodes[0] = 0.0
    nodes[-1] = 1.0
    lam = -a * math.log1p(-tau / q)
    return Mesh1D(nodes, "bakhvalov", lam)


def tensor_shishkin_2d(n: int, eps: float, b1: float, b2: float,
                       lam_x: float | None = None,
                       lam_y: float | None = None) -> TensorMesh2D:
    """Tensor product of per-axis piecewise-uniform meshes (layers at x=1, y=1)."""
    return TensorMesh2D(
        shishkin_mesh_1d(n, eps, b1, lam=lam_x),
        shishkin_mesh_1d(n, eps, b2, lam=lam_y),
    )


def tensor_uniform_2d(n: int) -> TensorMesh2D:
    return TensorMesh2D(uniform_mesh_1d(n), uniform_mesh_1d(n))


def triangulate(mesh: TensorMesh2D) -> Triangulation:
    """Bisect each mesh rectangle along its top-left to bottom-right diagonal.

    Produces 2 nx ny counterclockwise triangles on (nx+1)(ny+1) vertices with
    the vertices in grid order (x index fastest).
    """
    x = mesh.x_mesh.nodes
    y = mesh.y_mesh.nodes
    nx = mesh.x_mesh.n
    ny = mesh.y_mesh.n

    xx, yy = np.meshgrid(x, y)           # shape (ny+1, nx+1)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    k = 0
    for j in range(ny):
        row = j * (nx + 1)
        for i in range(nx):
            bl = row + i
            br = bl + 1
            tl = bl + (nx + 1)
            tr = tl + 1
            # Diagonal runs top-left to bottom-right.
            triangles[k] = (bl, br, tl)
            triangles[k + 1] = (br, tr, tl)
            k += 2

    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    is_boundary = ((ii == 0) | (ii == nx) | (jj == 0) | (jj == ny)).ravel()

    return Triangulation(vertices, triangles, is_boundary, grid_shape=(nx, ny))


def format_mesh_1d(mesh: Mesh1D) -> str:
    """Plain-text node list, one coordinate per line."""
    return "\n".join(repr(float(v)) for v in mesh.nodes) + "\n"


def format_triangulation(tri: Triangulation) -> str:
    """Vertex/triangle index file: "v x y" lines then "t i j k" lines, 0-based."""
    lines = [f"v {float(p[0])!r} {float(p[1])!r}" for p in tri.vertices]
    lines += [f"t {t[0]} {t[1]} {t[2]}" for t in tri.triangles]
    return "\n".join(lines) + "\n"


def _check_even(n: int) -> None:
    if n < 2 or n % 2 != 0:
        raise ValueError("n must be an even integer >= 2")
