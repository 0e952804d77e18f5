"""Vector-valued objectives and the two benchmark problem families.

Objectives expose three views of their first-order information: full
evaluation, the action of the derivative on a tangent vector, and the list of
Riemannian gradients (ambient gradients projected onto the tangent space).
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .manifolds import ManifoldPoint, TangentVector, project_tangent

SYMMETRY_ATOL = 1e-14


class VectorObjective(ABC):
    """Map F from a manifold into R^m, continuously differentiable.

    Subclasses implement :meth:`eval_F` and :meth:`ambient_gradients`; the
    derivative action and Riemannian gradients are derived from those.
    """

    @property
    @abstractmethod
    def m(self) -> int:
        """Number of objective components."""

    @property
    @abstractmethod
    def n(self) -> int:
        """Ambient dimension of the domain."""

    @abstractmethod
    def eval_F(self, x: ManifoldPoint) -> np.ndarray:
        """Objective vector at ``x``, shape (m,)."""

    @abstractmethod
    def ambient_gradients(self, x: ManifoldPoint) -> np.ndarray:
        """Ambient-space gradients of the components, shape (m, n)."""

    def jacobian_action(self, x: ManifoldPoint, d: TangentVector) -> np.ndarray:
        """Directional derivatives of the components along the tangent ``d``."""
        if not d.base.allclose(x):
            raise ValueError("direction is not based at the evaluation point")
        return self.ambient_gradients(x) @ d.components

    def riemannian_gradients(self, x: ManifoldPoint) -> list[TangentVector]:
        """Tangent-space gradients: the ambient rows projected at ``x``."""
        return [project_tangent(x, row) for row in self.ambient_gradients(x)]


def _sym_readonly(a, what: str) -> np.ndarray:
    A = np.array(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{what} must be square, got shape {A.shape}")
    if np.max(np.abs(A - A.T)) > SYMMETRY_ATOL:
        raise ValueError(f"{what} must be symmetric within {SYMMETRY_ATOL}")
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class QuadLinearObjective(VectorObjective):
    """Two objectives on R^2: a quadratic form and a linear functional.

    f1(x) = x'Ax with A symmetric 2x2, f2(x) = c x.
    """

    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = _sym_readonly(self.A, "A")
        if A.shape != (2, 2):
            raise ValueError(f"A must be 2x2, got {A.shape}")
        c = np.array(self.c, dtype=float)
        if c.shape != (2,):
            raise ValueError(f"c must have shape (2,), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return 2

    @property
    def n(self) -> int:
        return 2

    def eval_F(self, x: ManifoldPoint) -> np.ndarray:
        xc = x.coords
        return np.array([xc @ self.A @ xc, self.c @ xc])

    def ambient_gradients(self, x: ManifoldPoint) -> np.ndarray:
        return np.vstack([2.0 * (self.A @ x.coords), self.c])


@dataclass(frozen=True, eq=False)
class QuadQuadObjective(VectorObjective):
    """m quadratic forms f_i(x) = x'A_i x with symmetric A_i."""

    A_list: tuple

    def __post_init__(self):
        mats = tuple(_sym_readonly(A, f"A_list[{i}]") for i, A in enumerate(self.A_list))
        if not mats:
            raise ValueError("A_list must not be empty")
        n = mats[0].shape[0]
        if any(A.shape != (n, n) for A in mats):
            raise ValueError("all matrices must share the same shape")
        object.__setattr__(self, "A_list", mats)

    @property
    def m(self) -> int:
        return len(self.A_list)

    @property
    def n(self) -> int:
        return self.A_list[0].shape[0]

    def eval_F(self, x: ManifoldPoint) -> np.ndarray:
        xc = x.coords
        return np.array([xc @ A @ xc for A in self.A_list])

    def ambient_gradients(self, x: ManifoldPoint) -> np.ndarray:
        return np.vstack([2.0 * (A @ x.coords) for A in self.A_list])


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    # QR with a sign fix so the factorization is unique and reproducible.
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def quad_quad_random(n: int, m: int = 2, seed: int = 0) -> QuadQuadObjective:
    """Seeded random instance of the quadratic-forms family.

    The first matrix has a random eigenbasis with a log-uniform spectrum and
    a clearly separated smallest eigenvalue.  Every further matrix is a
    damped copy of the first plus a random positive perturbation supported on
    the orthogonal complement of the leading eigenvector: the objectives
    disagree everywhere except along the minimizing axis, which they share.

    This keeps the stationary set essentially pointlike.  Instances whose
    components fight all the way to an extended Pareto front make the
    iteration count measure how long an iterate slides along the front
    before its criticality measure dips under the stopping tolerance, which
    says nothing about how fast the methods actually approach stationarity
    and drowns the comparison between them in stagnation exits.
    """
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    Q = _random_orthogonal(n, rng)
    d_min = 1e-2
    d = np.exp(rng.uniform(np.log(d_min), 0.0, size=n))
    d[0] = 0.5 * d_min
    A1 = (Q * d) @ Q.T
    mats = [(A1 + A1.T) / 2.0]
    W = Q[:, 1:]
    for _ in range(m - 1):
        scale = rng.uniform(0.5, 0.9)
        b = rng.uniform(0.0, 0.3, size=max(n - 1, 1))
        B = (W * b) @ W.T if n > 1 else np.zeros((1, 1))
        A = scale * mats[0] + B
        mats.append((A + A.T) / 2.0)
    return QuadQuadObjective(tuple(mats))


def problem_from_spec(spec) -> VectorObjective:
    """Build an objective from a problem description.

    Accepted forms: a mapping, a JSON string, or a path to a JSON file with
    either ``{"family": "quad_linear", "A": [[...]], "c": [...]}`` or
    ``{"family": "quad_quad", "n": 100, "m": 2, "seed": 42}``.
    """
    if isinstance(spec, VectorObjective):
        return spec
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if text.lstrip().startswith("{"):
            spec = json.loads(text)
        else:
            spec = json.loads(Path(text).read_text())
    if not isinstance(spec, dict):
        raise TypeError(f"cannot build a problem from {spec!r}")
    family = spec.get("family")
    if family == "quad_linear":
        return QuadLinearObjective(A=spec["A"], c=spec["c"])
    if family == "quad_quad":
        if "A_list" in spec:
            return QuadQuadObjective(tuple(np.array(A, dtype=float) for A in spec["A_list"]))
        return quad_quad_random(
            n=int(spec["n"]), m=int(spec.get("m", 2)), seed=int(spec.get("seed", 0))
        )
    raise ValueError(f"unknown problem family {family!r}")


def default_manifold_name(obj: VectorObjective) -> str:
    """Manifold the benchmark families are posed on: the sphere in R^n."""
    return f"sphere:{obj.n}"
