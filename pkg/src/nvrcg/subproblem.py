"""Steepest-descent direction for a cone order: the min-norm subproblem.

The direction minimizes ``scalarized derivative + |d|^2 / 2`` over the tangent
space.  With a finite generator set the scalarization is a max of finitely
many linear forms, so the dual problem is a tiny quadratic program over the
unit simplex: find the min-norm point of the convex hull of the
generator-scalarized gradients.  The primal solution is its negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import ConeSpec, phi, phi_batch
from .manifolds import ManifoldPoint, TangentVector, norm, zero_tangent
from .objectives import VectorObjective

DEFAULT_QP_TOL = 1e-10
DEFAULT_QP_MAX_ITER = 10000


class SubproblemError(RuntimeError):
    """Simplex QP failed to reach the requested tolerance within its cap."""

    def __init__(self, message: str, best_lam: np.ndarray, residual: float):
        super().__init__(message)
        self.best_lam = best_lam
        self.residual = residual


@dataclass(frozen=True, eq=False)
class SteepestDescentResult:
    """Solution of the direction subproblem at one point.

    ``theta`` is the optimal objective value (scalarized derivative along
    ``v`` plus half its squared norm); it is zero exactly when the point is
    critical.  ``lam`` holds the dual simplex weights.
    """

    v: TangentVector
    theta: float
    lam: np.ndarray
    subproblem_iterations: int


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto the unit simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    p = v.size
    if p == 1:
        return np.array([1.0])
    a = np.sort(v)[::-1]
    cumulative = (np.cumsum(a) - 1.0) / np.arange(1, p + 1)
    k = np.nonzero(a > cumulative)[0][-1]
    return np.maximum(v - cumulative[k], 0.0)


def _qp_residual(lam: np.ndarray, grad: np.ndarray) -> float:
    return float(np.max(np.abs(lam - project_simplex(lam - grad))))


def solve_simplex_qp(
    M, tol: float = DEFAULT_QP_TOL, max_iter: int = DEFAULT_QP_MAX_ITER
) -> tuple[np.ndarray, int]:
    """Minimize ``lam' M lam / 2`` over the unit simplex.

    Closed forms handle one or two generators; otherwise projected gradient
    with Barzilai-Borwein steps runs until the fixed-point residual of the
    projection map falls below ``tol``.

    Returns the weights and the iteration count.  Raises
    :class:`SubproblemError` with the best iterate attached if the cap is hit.
    """
    M = np.asarray(M, dtype=float)
    p = M.shape[0]
    if M.shape != (p, p):
        raise ValueError(f"M must be square, got {M.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    if p == 1:
        return np.array([1.0]), 0
    if p == 2:
        a, b, c = M[0, 0], M[0, 1], M[1, 1]
        den = a - 2.0 * b + c  # |g1 - g2|^2, nonnegative for Gram inputs
        if den <= 1e-300:
            l1 = 0.5 if b == c else (0.0 if b > c else 1.0)
        else:
            l1 = min(1.0, max(0.0, (c - b) / den))
        return np.array([l1, 1.0 - l1]), 0

    lam = np.full(p, 1.0 / p)
    grad = M @ lam
    L = max(float(np.max(np.abs(M).sum(axis=1))), 1e-300)
    step = 1.0 / L
    best_lam, best_res = lam, _qp_residual(lam, grad)
    stall = 0
    for it in range(1, max_iter + 1):
        res = _qp_residual(lam, grad)
        if res < best_res:
            best_lam, best_res = lam, res
            stall = 0
        else:
            stall += 1
            if stall >= 50:
                step = 1.0 / L  # BB step went sour; reset to the safe step
                stall = 0
        if res <= tol:
            return lam, it - 1
        lam_new = project_simplex(lam - step * grad)
        grad_new = M @ lam_new
        s = lam_new - lam
        sy = float(s @ (grad_new - grad))
        step = float(s @ s) / sy if sy > 1e-300 else 1.0 / L
        step = min(max(step, 1e-12), 1e12)
        lam, grad = lam_new, grad_new
    raise SubproblemError(
        f"simplex QP did not reach tol={tol} within {max_iter} iterations "
        f"(best residual {best_res:.3e})",
        best_lam=best_lam,
        residual=best_res,
    )


def _scalarized_gradients(
    cone: ConeSpec, obj: VectorObjective, x: ManifoldPoint
) -> np.ndarray:
    """Rows: tangent projections of generator-weighted gradient combinations."""
    grads = obj.riemannian_gradients(x)
    G_obj = np.vstack([g.components for g in grads])  # (m, n), already tangent
    return cone.generators @ G_obj  # (p, n)


def direction_value(
    cone: ConeSpec, obj: VectorObjective, x: ManifoldPoint, d: TangentVector
) -> float:
    """Objective of the direction subproblem at ``d``."""
    return phi(cone, obj.jacobian_action(x, d)) + 0.5 * norm(d) ** 2


def steepest_direction(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    tol: float = DEFAULT_QP_TOL,
) -> SteepestDescentResult:
    """Solve the direction subproblem at ``x``.

    The returned direction is the negative of the min-norm point of the
    convex hull of the scalarized gradients; ``theta`` is recomputed from the
    returned direction so the reported value matches what later stages see.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    G = _scalarized_gradients(cone, obj, x)
    M = G @ G.T
    M = (M + M.T) / 2.0
    lam, iters = solve_simplex_qp(M, tol=tol)
    v = TangentVector(x, -(G.T @ lam))
    theta = phi(cone, obj.jacobian_action(x, v)) + 0.5 * norm(v) ** 2
    return SteepestDescentResult(v=v, theta=theta, lam=lam, subproblem_iterations=iters)


def _tangent_basis(x: ManifoldPoint) -> np.ndarray:
    """Orthonormal basis of the tangent space, rows of shape (tdim, n)."""
    man = x.manifold
    if man.tangent_dim == man.n:
        return np.eye(man.n)
    _, _, vh = np.linalg.svd(x.coords.reshape(1, -1))
    return vh[1:]


def _fibonacci_sphere(count: int) -> np.ndarray:
    """Roughly even directions on S^2 via the golden-angle spiral."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    return np.column_stack([r * np.cos(golden * i), r * np.sin(golden * i), z])


def brute_force_direction(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    grid_resolution: int,
) -> TangentVector:
    """Grid-search oracle for the direction subproblem.

    Scans tangent vectors r * u with radii on a uniform grid in
    [0, 2 * max gradient norm] and unit directions u on an angular grid.
    Only tangent dimensions up to 3 are supported; in dimension 3 the
    directions come from a golden-angle spiral, so the angular density is
    coarser than in dimensions 1 and 2 at equal resolution.
    """
    if grid_resolution < 100:
        raise ValueError("grid_resolution must be at least 100")
    tdim = x.manifold.tangent_dim
    if tdim > 3:
        raise ValueError(f"unsupported tangent dimension {tdim} (max 3)")

    grads = obj.riemannian_gradients(x)
    r_max = 2.0 * max((norm(g) for g in grads), default=0.0)
    if r_max == 0.0:
        return zero_tangent(x)

    B = _tangent_basis(x)
    if tdim == 1:
        dirs = np.vstack([B[0], -B[0]])
    elif tdim == 2:
        ang = 2.0 * np.pi * np.arange(grid_resolution) / grid_resolution
        dirs = np.outer(np.cos(ang), B[0]) + np.outer(np.sin(ang), B[1])
    else:
        dirs = _fibonacci_sphere(grid_resolution) @ B

    J = np.vstack(
        [obj.jacobian_action(x, TangentVector(x, u)) for u in dirs]
    )  # (n_dirs, m)
    radii = np.linspace(0.0, r_max, grid_resolution)

    best_val = np.inf
    best_r = 0.0
    best_dir = dirs[0]
    chunk = max(1, int(2**18 // max(1, len(dirs))))
    for start in range(0, len(radii), chunk):
        r = radii[start : start + chunk]
        scal = phi_batch(
            cone, (r[:, None, None] * J[None, :, :]).reshape(-1, cone.m)
        ).reshape(len(r), len(dirs))
        vals = scal + 0.5 * r[:, None] ** 2
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[idx] < best_val:
            best_val = float(vals[idx])
            best_r = float(r[idx[0]])
            best_dir = dirs[idx[1]]
    return TangentVector(x, best_r * best_dir)
