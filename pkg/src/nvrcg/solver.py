"""Conjugate-direction outer loop with pluggable beta rules and safeguards.

Each iteration solves the steepest-descent subproblem, composes the search
direction from the new steepest direction and the transported previous
direction scaled by beta, line-searches along it, and retracts.  Whenever a
beta computation degenerates or the composed direction fails the descent
test, the iteration falls back to the steepest direction (a restart) rather
than aborting; restarts are counted in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cones import ConeSpec, phi
from .linesearch import (
    LineSearchOutcome,
    WolfeParams,
    check_armijo,
    check_curvature,
    wolfe_search,
)
from .manifolds import (
    DegenerateRetractionError,
    ManifoldPoint,
    TangentVector,
    norm,
    project_tangent,
    retract,
)
from .objectives import VectorObjective
from .subproblem import steepest_direction

CRITICAL_NORM_TOL = 1e-4
BETA_DENOM_EPS = 1e-14
FULL_CHECK_SLACK = 1e-10


class BetaKind(str, Enum):
    """Conjugacy parameter rules.  ZERO gives plain steepest descent."""

    FR = "FR"
    CD = "CD"
    DY = "DY"
    PRP = "PRP"
    LS = "LS"
    HS = "HS"
    HYBRID_PRP_FR = "HYBRID_PRP_FR"
    HYBRID_LS_CD = "HYBRID_LS_CD"
    HYBRID_HS_DY = "HYBRID_HS_DY"
    ZERO = "ZERO"


RAW_KINDS = frozenset({BetaKind.PRP, BetaKind.LS, BetaKind.HS})
_TRANSPORT_KINDS = frozenset(
    {
        BetaKind.PRP,
        BetaKind.LS,
        BetaKind.HS,
        BetaKind.HYBRID_PRP_FR,
        BetaKind.HYBRID_LS_CD,
        BetaKind.HYBRID_HS_DY,
    }
)

_ALIASES = {
    "SD": BetaKind.ZERO,
    "PRP-FR": BetaKind.HYBRID_PRP_FR,
    "LS-CD": BetaKind.HYBRID_LS_CD,
    "HS-DY": BetaKind.HYBRID_HS_DY,
}


def parse_beta_kind(name: str) -> BetaKind:
    key = name.strip().upper().replace(" ", "")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return BetaKind(key)
    except ValueError:
        raise ValueError(f"unknown beta rule {name!r}") from None


class DegenerateBetaError(ArithmeticError):
    """A beta denominator vanished; the caller should restart with beta = 0."""


class DescentAssertionError(RuntimeError):
    """A per-iteration invariant failed; carries the offending state."""

    def __init__(self, message: str, state: "SearchState"):
        super().__init__(f"{message}\nstate dump: {state!r}")
        self.state = state


@dataclass(frozen=True, eq=False)
class PrevIteration:
    """What the next iteration needs to remember about the last one."""

    x: ManifoldPoint
    v: TangentVector
    d: TangentVector
    t: float
    psi_v0: float
    psi_d0: float
    psi_d_at_t: float


@dataclass(frozen=True, eq=False)
class SearchState:
    """Per-iteration record consumed by the beta rules and assertion hooks.

    ``psi_transported_v`` carries the scalarized derivative of the current
    steepest direction pushed through the previous transport, evaluated per
    the run's transport-evaluation policy; it is only populated for rules
    that need it.
    """

    k: int
    x: ManifoldPoint
    F_x: np.ndarray
    v: TangentVector
    theta: float
    d: TangentVector
    psi_v0: float
    psi_d0: float
    prev: PrevIteration | None
    psi_transported_v: float | None = None


@dataclass(frozen=True)
class IterationRecord:
    """Scalar summary of one accepted (or final attempted) iteration."""

    k: int
    t: float
    beta: float
    restarted: bool
    norm_v: float
    norm_d: float
    psi_v0: float
    psi_d0: float
    psi_d_at_t: float
    theta: float
    f_values: tuple
    ls_status: str
    ls_evals: int
    wolfe_verified: bool
    x_coords: tuple | None = None
    d_components: tuple | None = None


@dataclass(frozen=True, eq=False)
class RunReport:
    """Full trajectory summary of one solver run."""

    iterations: int
    termination: str  # critical | step_stagnated | max_iter | degenerate
    trajectory: list[IterationRecord]
    final_F: np.ndarray
    restarts: int
    zoutendijk_partial_sums: list[float]
    final_norm_v: float
    final_x: ManifoldPoint


def _safe_div(num: float, den: float, what: str) -> float:
    if abs(den) < BETA_DENOM_EPS:
        raise DegenerateBetaError(f"{what} denominator {den!r} is below {BETA_DENOM_EPS}")
    return num / den


def compute_beta(kind: BetaKind, state: SearchState) -> float:
    """Evaluate the conjugacy parameter for the given rule at this state.

    Requires ``state.prev``.  Hybrid rules clamp to ``max(0, min(a, b))``.
    Raises :class:`DegenerateBetaError` when a needed denominator vanishes.
    """
    if kind is BetaKind.ZERO:
        return 0.0
    prev = state.prev
    if prev is None:
        raise ValueError("beta rules need the previous iteration (k >= 1)")

    def fr():
        return _safe_div(state.psi_v0, prev.psi_v0, "FR")

    def cd():
        return _safe_div(state.psi_v0, prev.psi_d0, "CD")

    def dy():
        return _safe_div(-state.psi_v0, prev.psi_d_at_t - prev.psi_d0, "DY")

    def transported_term() -> float:
        if state.psi_transported_v is None:
            raise ValueError(f"{kind.value} needs the transported-direction term")
        return state.psi_transported_v

    def prp():
        return _safe_div(-state.psi_v0 + transported_term(), -prev.psi_v0, "PRP")

    def ls():
        return _safe_div(-state.psi_v0 + transported_term(), -prev.psi_d0, "LS")

    def hs():
        return _safe_div(
            -state.psi_v0 + transported_term(), prev.psi_d_at_t - prev.psi_d0, "HS"
        )

    if kind is BetaKind.FR:
        return fr()
    if kind is BetaKind.CD:
        return cd()
    if kind is BetaKind.DY:
        return dy()
    if kind is BetaKind.PRP:
        return prp()
    if kind is BetaKind.LS:
        return ls()
    if kind is BetaKind.HS:
        return hs()
    if kind is BetaKind.HYBRID_PRP_FR:
        return max(0.0, min(fr(), prp()))
    if kind is BetaKind.HYBRID_LS_CD:
        return max(0.0, min(ls(), cd()))
    if kind is BetaKind.HYBRID_HS_DY:
        return max(0.0, min(hs(), dy()))
    raise ValueError(f"unhandled beta rule {kind!r}")


def descent_interval_check(state: SearchState, beta: float) -> bool:
    """Sufficient condition for the composed direction to be descent.

    Nonnegative beta always qualifies when the previous end-of-step
    derivative was nonpositive; otherwise beta must stay strictly below the
    ratio of the current steepest derivative to that end-of-step value.
    """
    if state.prev is None:
        raise ValueError("descent interval needs the previous iteration")
    if beta < 0.0:
        return False
    tail = state.prev.psi_d_at_t
    if tail <= 0.0:
        return True
    return beta < -state.psi_v0 / tail


def zoutendijk_monitor(report: RunReport) -> list[float]:
    """Partial sums of psi(0)^2 / |d|^2 over the trajectory, nondecreasing."""
    if not report.trajectory:
        raise ValueError("report has no iterations")
    out = []
    total = 0.0
    for rec in report.trajectory:
        total += rec.psi_d0**2 / rec.norm_d**2
        out.append(total)
    return out


def _full_checks(
    kind: BetaKind,
    state: SearchState,
    beta: float,
    wolfe: WolfeParams,
) -> None:
    """Per-iteration inequalities the convergence theory guarantees."""
    prev = state.prev
    if prev is None:
        return
    slack = FULL_CHECK_SLACK
    if beta >= 0.0:
        bound = state.psi_v0 + beta * prev.psi_d_at_t
        if state.psi_d0 > bound + slack:
            raise DescentAssertionError(
                f"composed-direction bound violated: psi_d0={state.psi_d0!r} "
                f"> psi_v0 + beta*psi_prev_at_t = {bound!r}",
                state,
            )
    if kind in (BetaKind.CD, BetaKind.HYBRID_LS_CD) and wolfe.strong:
        bound = (1.0 - wolfe.c2) * state.psi_v0
        if state.psi_d0 > bound + slack:
            raise DescentAssertionError(
                f"CD bound violated: psi_d0={state.psi_d0!r} > (1-c2)*psi_v0={bound!r}",
                state,
            )
    if kind in (BetaKind.DY, BetaKind.HYBRID_HS_DY):
        if state.psi_d0 > slack:
            raise DescentAssertionError(
                f"DY nonpositivity violated: psi_d0={state.psi_d0!r}", state
            )
        if prev.psi_d0 < 0.0:
            # beta <= psi_d0 / psi_prev_d0, checked in product form so the
            # comparison happens at the scale of the psi values themselves.
            lhs = beta * prev.psi_d0
            if lhs < state.psi_d0 - slack:
                raise DescentAssertionError(
                    f"DY beta bound violated: beta*psi_prev_d0={lhs!r} "
                    f"< psi_d0={state.psi_d0!r}",
                    state,
                )


def nvrcg_run(
    cone: ConeSpec,
    obj: VectorObjective,
    x0: ManifoldPoint,
    kind: BetaKind,
    wolfe: WolfeParams,
    max_iter: int = 10000,
    assert_level: str = "off",
    *,
    qp_tol: float = 1e-10,
    critical_tol: float = CRITICAL_NORM_TOL,
    transport_eval: str = "current",
    allow_raw: bool = False,
    trace_points: bool = False,
) -> RunReport:
    """Run the conjugate-direction method from ``x0`` until a stop triggers.

    Stops when the steepest-direction norm falls to ``critical_tol``
    (termination ``"critical"``), when the line search stagnates or accepts a
    step at or below ``wolfe.t_min`` (``"step_stagnated"``), or after
    ``max_iter`` iterations.  ``assert_level`` is ``"off"``, ``"descent"``
    (per-iteration descent test plus Wolfe re-verification), or ``"full"``
    (additionally the rule-specific inequality checks).

    ``transport_eval`` selects where the transported steepest direction is
    differentiated for the PRP/LS/HS numerators: at the current point
    (``"current"``) or at the previous point (``"previous"``).

    The raw PRP/LS/HS rules carry no convergence guarantee and must be
    enabled explicitly with ``allow_raw``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if assert_level not in ("off", "descent", "full"):
        raise ValueError(f"unknown assert_level {assert_level!r}")
    if transport_eval not in ("current", "previous"):
        raise ValueError(f"unknown transport_eval {transport_eval!r}")
    kind = BetaKind(kind)
    if kind in RAW_KINDS and not allow_raw:
        raise ValueError(
            f"{kind.value} is a diagnostic rule without a convergence guarantee; "
            "pass allow_raw=True (or use the hybrid form)"
        )

    man = x0.manifold
    x = x0
    prev: PrevIteration | None = None
    records: list[IterationRecord] = []
    zsums: list[float] = []
    z_total = 0.0
    restarts = 0

    def report(iterations: int, termination: str, F_x, norm_v: float) -> RunReport:
        return RunReport(
            iterations=iterations,
            termination=termination,
            trajectory=records,
            final_F=np.asarray(F_x, dtype=float),
            restarts=restarts,
            zoutendijk_partial_sums=zsums,
            final_norm_v=norm_v,
            final_x=x,
        )

    try:
        for k in range(max_iter):
            sd = steepest_direction(cone, obj, x, tol=qp_tol)
            norm_v = norm(sd.v)
            F_x = obj.eval_F(x)
            if norm_v <= critical_tol:
                return report(k, "critical", F_x, norm_v)
            psi_v0 = phi(cone, obj.jacobian_action(x, sd.v))

            beta = 0.0
            restarted = False
            d = sd.v
            psi_d0 = psi_v0
            psi_trans = None
            if prev is not None and kind is not BetaKind.ZERO:
                if kind in _TRANSPORT_KINDS:
                    psi_trans = _transported_term(
                        cone, obj, x, sd.v, prev, transport_eval
                    )
                pre_state = SearchState(
                    k=k,
                    x=x,
                    F_x=F_x,
                    v=sd.v,
                    theta=sd.theta,
                    d=sd.v,
                    psi_v0=psi_v0,
                    psi_d0=psi_v0,
                    prev=prev,
                    psi_transported_v=psi_trans,
                )
                try:
                    beta = compute_beta(kind, pre_state)
                except DegenerateBetaError:
                    beta = 0.0
                    restarted = True
                    restarts += 1
                else:
                    carried = TangentVector(
                        x,
                        man.transport_array(
                            prev.x.coords,
                            prev.t * prev.d.components,
                            prev.d.components,
                        ),
                    )
                    d = TangentVector(x, sd.v.components + beta * carried.components)
                    psi_d0 = phi(cone, obj.jacobian_action(x, d))
                    if not psi_d0 < 0.0:
                        beta = 0.0
                        restarted = True
                        restarts += 1
                        d = sd.v
                        psi_d0 = psi_v0

            state = SearchState(
                k=k,
                x=x,
                F_x=F_x,
                v=sd.v,
                theta=sd.theta,
                d=d,
                psi_v0=psi_v0,
                psi_d0=psi_d0,
                prev=prev,
                psi_transported_v=psi_trans,
            )
            if assert_level != "off" and not psi_d0 < 0.0:
                raise DescentAssertionError(
                    f"search direction is not descent: psi_d0={psi_d0!r}", state
                )
            if assert_level == "full":
                _full_checks(kind, state, beta, wolfe)

            outcome = wolfe_search(cone, obj, x, d, wolfe)

            norm_d = norm(d)
            z_total += psi_d0**2 / norm_d**2
            zsums.append(z_total)

            wolfe_verified = False
            if outcome.status == "accepted" and assert_level != "off":
                ok_a = check_armijo(
                    cone, obj, x, d, outcome.t, wolfe.c1, F_x, psi_d0
                )
                ok_c = check_curvature(
                    cone, obj, x, d, outcome.t, wolfe.c2, psi_d0, wolfe.strong
                )
                if not (ok_a and ok_c):
                    raise DescentAssertionError(
                        f"accepted step t={outcome.t!r} fails re-verification "
                        f"(armijo={ok_a}, curvature={ok_c})",
                        state,
                    )
                wolfe_verified = True
                if assert_level == "full" and kind in (
                    BetaKind.DY,
                    BetaKind.HYBRID_HS_DY,
                ):
                    if psi_d0 > outcome.psi_at_t + FULL_CHECK_SLACK:
                        raise DescentAssertionError(
                            f"DY end-of-step bound violated: psi_d0={psi_d0!r} "
                            f"> psi at accepted step {outcome.psi_at_t!r}",
                            state,
                        )

            records.append(
                IterationRecord(
                    k=k,
                    t=outcome.t,
                    beta=beta,
                    restarted=restarted,
                    norm_v=norm_v,
                    norm_d=norm_d,
                    psi_v0=psi_v0,
                    psi_d0=psi_d0,
                    psi_d_at_t=outcome.psi_at_t,
                    theta=sd.theta,
                    f_values=tuple(float(f) for f in F_x),
                    ls_status=outcome.status,
                    ls_evals=outcome.evals,
                    wolfe_verified=wolfe_verified,
                    x_coords=tuple(x.coords) if trace_points else None,
                    d_components=tuple(d.components) if trace_points else None,
                )
            )

            if outcome.status != "accepted" or outcome.t <= wolfe.t_min:
                return report(k + 1, "step_stagnated", F_x, norm_v)

            x_next = retract(x, outcome.t * d)
            prev = PrevIteration(
                x=x,
                v=sd.v,
                d=d,
                t=outcome.t,
                psi_v0=psi_v0,
                psi_d0=psi_d0,
                psi_d_at_t=outcome.psi_at_t,
            )
            x = x_next
    except DegenerateRetractionError:
        sd = steepest_direction(cone, obj, x, tol=qp_tol)
        return report(len(records), "degenerate", obj.eval_F(x), norm(sd.v))

    sd = steepest_direction(cone, obj, x, tol=qp_tol)
    return report(max_iter, "max_iter", obj.eval_F(x), norm(sd.v))


def _transported_term(
    cone: ConeSpec,
    obj: VectorObjective,
    x: ManifoldPoint,
    v: TangentVector,
    prev: PrevIteration,
    transport_eval: str,
) -> float:
    """Scalarized derivative of the transported current steepest direction.

    ``"current"`` pushes the direction through the previous differentiated
    retraction and differentiates at the current point.  ``"previous"``
    projects it onto the previous tangent space and differentiates there.
    """
    man = x.manifold
    if transport_eval == "current":
        carried = man.transport_array(
            prev.x.coords, prev.t * prev.d.components, v.components
        )
        return phi(cone, obj.jacobian_action(x, TangentVector(x, carried)))
    back = project_tangent(prev.x, v.components)
    return phi(cone, obj.jacobian_action(prev.x, back))
