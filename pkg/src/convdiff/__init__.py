"""Stabilized solvers for convection-dominated problems on layer-adapted meshes.

The package covers the classical toolkit for -eps Lap(u) + b . grad(u) = f
with 0 < eps << 1: centered, upwinded, and exponentially fitted finite
differences in 1D, upwind finite differences and streamline-diffusion finite
elements on the unit square, piecewise-uniform and graded layer meshes, and a
convergence-rate experiment harness with exact-solution oracles.
"""

from convdiff.mesh import (
    Mesh1D,
    TensorMesh2D,
    Triangulation,
    bakhvalov_mesh_1d,
    shishkin_mesh_1d,
    tensor_shishkin_2d,
    tensor_uniform_2d,
    triangulate,
    uniform_mesh_1d,
)
from convdiff.problems import (
    BoundaryPartition,
    ProblemSpec1D,
    ProblemSpec2D,
    classify_boundary,
    evaluate_layer_decomposition,
    make_problem,
    manufactured_2d,
    model_problem_p1,
)
from convdiff.linalg import (
    IterationLimitError,
    MMatrixReport,
    NumericalError,
    SparseSystem,
    TridiagonalSystem,
    ZeroPivotError,
    is_m_matrix,
    solve_sparse,
    solve_tridiagonal,
)
from convdiff.fd1d import (
    DiscreteSolution1D,
    assemble_1d,
    equivalent_diffusion,
    fitting_factor,
    oscillation_index,
    solve_1d,
)
from convdiff.fd2d import Grid2DSolution, assemble_upwind_2d, solve_2d
from convdiff.fem2d import (
    COARSE_HALF_H,
    GALERKIN,
    DeltaStrategy,
    assemble_fem,
    choose_delta,
    local_sdfem,
    solve_fem,
)
from convdiff.harness import (
    ConvergenceTable,
    ExperimentConfig,
    convergence_rate,
    discrete_l2_error,
    nodal_max_error,
    oscillation_amplitude,
    run_convergence,
    two_mesh_error,
)

__version__ = "0.1.0"
