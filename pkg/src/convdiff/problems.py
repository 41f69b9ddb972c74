"""Continuous model problems, boundary classification, and exact-solution oracles.

The problems solved here are -eps u'' + b u' = f on (0, 1) and
-eps Lap(u) + b . grad(u) = f on the unit square, with Dirichlet data and a
convection field bounded away from zero, so solutions carry an exponential
boundary layer at the outflow side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

#: Outward unit normals of the unit square's edges.
EDGE_NORMALS = {
    "left": (-1.0, 0.0),
    "right": (1.0, 0.0),
    "bottom": (0.0, -1.0),
    "top": (0.0, 1.0),
}


@dataclass(frozen=True)
class ProblemSpec1D:
    """Two-point boundary value problem -eps u'' + b(x) u' = f(x) on (0, 1).

    ``beta`` is a positive lower bound for the convection coefficient, so the
    layer sits at x = 1.  ``exact`` (when present) must match the boundary
    data at the endpoints.
    """

    eps: float
    b: Callable
    f: Callable
    beta: float = 1.0
    u_left: float = 0.0
    u_right: float = 0.0
    exact: Callable | None = None
    name: str = ""

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if self.beta <= 0.0:
            raise ValueError("convection coefficient needs a positive lower bound")
        for xs in np.linspace(0.0, 1.0, 21):
            if self.b(xs) < self.beta - 1e-12:
                raise ValueError(f"b({xs}) violates the stated lower bound beta")
        if self.exact is not None:
            if abs(self.exact(0.0) - self.u_left) > 1e-12:
                raise ValueError("exact solution does not match left boundary value")
            if abs(self.exact(1.0) - self.u_right) > 1e-12:
                raise ValueError("exact solution does not match right boundary value")


@dataclass(frozen=True)
class ProblemSpec2D:
    """Dirichlet problem -eps Lap(u) + b . grad(u) = f on the unit square.

    The convection vector is normalized to unit length on construction; eps
    and f are divided by the original |b| so the continuous solution is
    unchanged.  ``b_raw`` keeps the pre-normalization vector.
    """

    eps: float
    b: tuple[float, float]
    f: Callable
    g: Callable
    exact: Callable | None = None
    name: str = ""
    b_raw: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        b1, b2 = float(self.b[0]), float(self.b[1])
        scale = math.hypot(b1, b2)
        if scale == 0.0:
            raise ValueError("convection vector must be nonzero")
        object.__setattr__(self, "b_raw", (b1, b2))
        if abs(scale - 1.0) > 1e-14:
            f_raw = self.f
            object.__setattr__(self, "b", (b1 / scale, b2 / scale))
            object.__setattr__(self, "eps", self.eps / scale)
            object.__setattr__(self, "f", lambda x, y, _f=f_raw, _s=scale: _f(x, y) / _s)
        else:
            object.__setattr__(self, "b", (b1, b2))


@dataclass(frozen=True)
class BoundaryPartition:
    """Unit-square edges split by the sign of b . n (outward normal n)."""

    inflow: frozenset
    outflow: frozenset
    tangential: frozenset


def classify_boundary(b) -> BoundaryPartition:
    """Assign each square edge to inflow (b.n < 0), outflow (> 0) or tangential.

    The vector is normalized first, so the partition depends only on the
    direction of ``b``; dot products within 1e-14 of zero count as tangential.
    Corner points belong to no edge set (the partition is over open edges).
    """
    b1, b2 = float(b[0]), float(b[1])
    scale = math.hypot(b1, b2)
    if scale == 0.0:
        raise ValueError("cannot classify the zero vector")
    b1, b2 = b1 / scale, b2 / scale
    inflow, outflow, tangential = set(), set(), set()
    for edge, (n1, n2) in EDGE_NORMALS.items():
        dot = b1 * n1 + b2 * n2
        if abs(dot) <= 1e-14:
            tangential.add(edge)
        elif dot < 0.0:
            inflow.add(edge)
        else:
            outflow.add(edge)
    return BoundaryPartition(frozenset(inflow), frozenset(outflow), frozenset(tangential))


def model_problem_p1(eps: float) -> ProblemSpec1D:
    """-eps u'' + u' = 2 with u(0) = u(1) = 0.

    The closed-form solution 2x + 2(E - exp(-(1-x)/eps)) / (1 - E), with
    E = exp(-1/eps), is evaluated with non-positive exponent arguments only,
    so it stays finite down to arbitrarily small eps.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    e_full = math.exp(-1.0 / eps)
    denom = -math.expm1(-1.0 / eps)   # 1 - exp(-1/eps), stable for large eps

    def exact(x):
        return 2.0 * x + 2.0 * (e_full - np.exp(-(1.0 - x) / eps)) / denom

    return ProblemSpec1D(
        eps=eps,
        b=lambda x: 1.0,
        f=lambda x: 2.0,
        beta=1.0,
        u_left=0.0,
        u_right=0.0,
        exact=exact,
        name="p1",
    )


def evaluate_layer_decomposition(eps: float, x):
    """Split the p1 solution into smooth part, layer part, and a remainder bound.

    Returns (2x, -2 exp(-(1-x)/eps), exp(-1/eps)); the first two terms differ
    from the exact solution by at most 4 exp(-1/eps).
    """
    smooth = 2.0 * np.asarray(x, dtype=float)
    layer = -2.0 * np.exp(-(1.0 - np.asarray(x, dtype=float)) / eps)
    if np.ndim(x) == 0:
        smooth = float(smooth)
        layer = float(layer)
    return smooth, layer, math.exp(-1.0 / eps)


def layer_profile(s, c: float, eps: float):
    """One-dimensional outflow-layer profile s - (exp(-c(1-s)/eps) - K)/(1 - K).

    K = exp(-c/eps).  Vanishes at s = 0 and s = 1, tends to s away from the
    layer as eps -> 0, and all exponent arguments are non-positive.
    """
    s = np.asarray(s, dtype=float)
    k = math.exp(-c / eps)
    denom = -math.expm1(-c / eps)
    out = s - (np.exp(-c * (1.0 - s) / eps) - k) / denom
    return float(out) if out.ndim == 0 else out


def manufactured_2d(eps: float, b) -> ProblemSpec2D:
    """Separable problem with known solution u(x, y) = g(x; b1) g(y; b2).

    Each factor is the 1D layer profile, so u = 0 on the whole boundary and
    the layers sit along x = 1 and y = 1.  Because the profile satisfies
    -eps g'' + c g' = c exactly, the source reduces to
    f(x, y) = b1 g(y; b2) + b2 g(x; b1).
    """
    b1, b2 = float(b[0]), float(b[1])
    if b1 <= 0.0 or b2 <= 0.0:
        raise ValueError("both convection components must be positive")

    def exact(x, y):
        return layer_profile(x, b1, eps) * layer_profile(y, b2, eps)

    def f(x, y):
        return b1 * layer_profile(y, b2, eps) + b2 * layer_profile(x, b1, eps)

    return ProblemSpec2D(
        eps=eps,
        b=(b1, b2),
        f=f,
        g=lambda x, y: 0.0,
        exact=exact,
        name="mms2d",
    )


def make_problem(name: str, eps: float, **params):
    """Look up a built-in problem by registry name."""
    try:
        factory = PROBLEM_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(PROBLEM_REGISTRY))
        raise ValueError(f"unknown problem {name!r} (known: {known})") from None
    return factory(eps, **params)


PROBLEM_REGISTRY = {
    "p1": lambda eps: model_problem_p1(eps),
    "mms2d": lambda eps, b1=1.0, b2=1.0: manufactured_2d(eps, (b1, b2)),
}
