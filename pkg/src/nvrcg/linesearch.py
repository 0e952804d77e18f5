"""Vector Wolfe line searches along retraction curves.

The scalar quantity driving the search is the scalarized directional
derivative along the retraction curve, here called ``psi``: the max-over-
generators of the derivative components at the retracted point, acting on the
transported direction.  Sufficient decrease is the cone inequality comparing
the full objective vector against a linear model scaled by the cone element
``e``; it is not collapsed to a scalar surrogate.

The search itself is bracket-and-zoom: double the trial step until the
decrease condition fails or the derivative turns nonnegative, then bisect.
Bisection (rather than interpolation) is used because ``psi`` is a max of
smooth functions and therefore only piecewise smooth.  Among the acceptable
steps encountered, the search keeps bisecting toward the zero of ``psi`` and
returns the one with the smallest curvature residual it can find within its
budget: conjugate-direction methods degrade badly when accepted steps sit at
the edge of the curvature window, so step quality is worth a few extra
evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import ConeSpec, leq_K, phi
from .manifolds import ManifoldPoint, TangentVector, retract, transport_diff_retraction
from .objectives import VectorObjective


class InvalidDirectionError(ValueError):
    """Line search called along a direction that is not strictly descent."""


# Refinement target: once an acceptable step exists, keep bisecting until the
# derivative magnitude drops to this fraction of its value at zero (or the
# budget runs out).  Steps near the directional minimizer keep the conjugate
# update well conditioned.
REFINE_FRACTION = 0.1


@dataclass(frozen=True)
class WolfeParams:
    """Parameters of the (strong) Wolfe conditions and the search procedure."""

    c1: float = 0.1
    c2: float = 0.6
    t_init: float = 1.0
    t_min: float = 1e-4
    max_expansions: int = 30
    max_zoom: int = 50
    strong: bool = False

    def __post_init__(self):
        if not (0.0 < self.c1 < self.c2 < 1.0):
            raise ValueError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")
        if self.t_init <= 0.0:
            raise ValueError("t_init must be positive")
        if self.t_min <= 0.0:
            raise ValueError("t_min must be positive")
        if self.max_expansions < 1 or self.max_zoom < 1:
            raise ValueError("iteration limits must be at least 1")

    @classmethod
    def from_dict(cls, d: dict) -> "WolfeParams":
        return cls(**{k: d[k] for k in d})


@dataclass(frozen=True, eq=False)
class LineSearchOutcome:
    """Result of one search: accepted step, or the best fallback found.

    ``status`` is ``"accepted"`` (both conditions verified at ``t``),
    ``"stagnated"`` (bracket collapsed below ``t_min``; ``t`` is the best
    step satisfying the decrease condition, possibly zero), or ``"max_iter"``.
    """

    t: float
    F_new: np.ndarray
    psi_at_t: float
    evals: int
    status: str


def psi(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    d: TangentVector,
    t: float,
) -> float:
    """Scalarized derivative along the retraction curve at parameter ``t``.

    At ``t = 0`` this is the scalarized derivative at ``x`` along ``d``
    itself, since the transport reduces to the identity.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return phi(cone, obj.jacobian_action(x, d))
    offset = t * d
    y = retract(x, offset)
    u = transport_diff_retraction(x, offset, d)
    return phi(cone, obj.jacobian_action(y, u))


def check_armijo(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    d: TangentVector,
    t: float,
    c1: float,
    F_x: np.ndarray,
    psi0: float,
) -> bool:
    """Cone sufficient-decrease test at step ``t``.

    Compares the objective at the retracted point against
    ``F_x + c1 * t * psi0 * e`` in the cone order.  ``psi0`` is the value of
    :func:`psi` at zero and must be negative for the test to be meaningful.
    """
    F_t = obj.eval_F(retract(x, t * d))
    return leq_K(cone, F_t, F_x + (c1 * t * psi0) * cone.e_vector)


def check_curvature(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    d: TangentVector,
    t: float,
    c2: float,
    psi0: float,
    strong: bool,
) -> bool:
    """Curvature test: weak form bounds psi(t) below, strong form bounds |psi(t)|."""
    p = psi(cone, obj, x, d, t)
    if strong:
        return abs(p) <= c2 * abs(psi0)
    return p >= c2 * psi0


def wolfe_search(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    d: TangentVector,
    params: WolfeParams,
) -> LineSearchOutcome:
    """Find a step satisfying the (strong) Wolfe conditions along ``d``.

    Phase 1 doubles the step from ``t_init`` until the decrease condition
    fails or the derivative turns nonnegative; phase 2 bisects the resulting
    bracket.  Acceptable steps found along the way are remembered, and the
    search returns early only once the derivative residual is small
    (REFINE_FRACTION of its zero-step value); otherwise it returns the best
    acceptable step seen when the budget or the bracket runs out.  Raises
    :class:`InvalidDirectionError` when the zero-step derivative is not
    strictly negative.
    """
    psi0 = psi(cone, obj, x, d, 0.0)
    if not psi0 < 0.0:
        raise InvalidDirectionError(
            f"scalarized derivative at t=0 is {psi0!r}, need it strictly negative"
        )
    F_x = obj.eval_F(x)
    slope = params.c1 * psi0
    target = min(REFINE_FRACTION, params.c2) * abs(psi0)

    def probe(t: float):
        y = retract(x, t * d)
        F_t = obj.eval_F(y)
        u = transport_diff_retraction(x, t * d, d)
        psi_t = phi(cone, obj.jacobian_action(y, u))
        armijo = leq_K(cone, F_t, F_x + (slope * t) * cone.e_vector)
        return F_t, psi_t, armijo

    def curvature_ok(psi_t: float) -> bool:
        if params.strong:
            return abs(psi_t) <= params.c2 * abs(psi0)
        return psi_t >= params.c2 * psi0

    best_armijo = (0.0, F_x, psi0)
    accepted = None  # acceptable (both conditions) step with smallest |psi|
    evals = 0

    def consider(t, F_t, psi_t):
        nonlocal best_armijo, accepted
        if t > best_armijo[0]:
            best_armijo = (t, F_t, psi_t)
        if curvature_ok(psi_t):
            if accepted is None or abs(psi_t) < abs(accepted[2]):
                accepted = (t, F_t, psi_t)

    def finish(status_if_none: str) -> LineSearchOutcome:
        if accepted is not None:
            t, F_t, psi_t = accepted
            return LineSearchOutcome(t, F_t, psi_t, evals, "accepted")
        t, F_t, psi_t = best_armijo
        return LineSearchOutcome(t, F_t, psi_t, evals, status_if_none)

    bracket = None
    t_prev = 0.0
    t = params.t_init
    for _ in range(params.max_expansions):
        F_t, psi_t, armijo = probe(t)
        evals += 1
        if not armijo:
            bracket = (t_prev, t)
            break
        consider(t, F_t, psi_t)
        if abs(psi_t) <= target:
            return finish("max_iter")
        if psi_t >= 0.0:
            bracket = (t_prev, t)
            break
        t_prev = t
        t = 2.0 * t
    if bracket is None:
        return finish("max_iter")

    lo, hi = bracket
    for _ in range(params.max_zoom):
        if hi - lo < params.t_min:
            return finish("stagnated")
        mid = 0.5 * (lo + hi)
        F_m, psi_m, armijo = probe(mid)
        evals += 1
        if not armijo:
            hi = mid
            continue
        consider(mid, F_m, psi_m)
        if abs(psi_m) <= target:
            return finish("max_iter")
        if psi_m >= 0.0:
            hi = mid
        else:
            lo = mid
    return finish("max_iter")
