"""Embedded manifolds: points, tangent vectors, retractions, vector transport.

Two instances are provided, the unit sphere S^{n-1} in R^n and flat Euclidean
space.  Both use the ambient dot product as the Riemannian metric.  The only
vector transport implemented is the differentiated retraction, which is what
the conjugate-direction update and the curvature conditions consume.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

POINT_ATOL = 1e-12
TANGENT_ATOL = 1e-10
BASE_MATCH_ATOL = 1e-12
DEGENERATE_NORM = 1e-14

_STRICT_CHECKS = False


def set_strict_checks(flag: bool) -> None:
    """Globally toggle strict tangent validation.

    In strict mode, constructing a TangentVector whose components deviate from
    the tangent space by more than TANGENT_ATOL raises instead of being
    silently projected.  Intended for test suites.
    """
    global _STRICT_CHECKS
    _STRICT_CHECKS = bool(flag)


@contextmanager
def strict_checks():
    set_strict_checks(True)
    try:
        yield
    finally:
        set_strict_checks(False)


class DegenerateRetractionError(ArithmeticError):
    """Retraction hit a point where the map is undefined (antipodal overshoot)."""


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Sphere:
    """Unit sphere S^{n-1} embedded in R^n with the normalization retraction."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("sphere needs ambient dimension >= 2")

    @property
    def name(self) -> str:
        return f"sphere:{self.n}"

    @property
    def tangent_dim(self) -> int:
        return self.n - 1

    def check_point(self, coords: np.ndarray) -> None:
        if coords.shape != (self.n,):
            raise ValueError(f"point has shape {coords.shape}, expected ({self.n},)")
        r = np.linalg.norm(coords)
        if abs(r - 1.0) > POINT_ATOL:
            raise ValueError(f"|coords| = {r!r} is not 1 within {POINT_ATOL}")

    def project_point(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        r = np.linalg.norm(a)
        if r < DEGENERATE_NORM:
            raise DegenerateRetractionError("cannot normalize a near-zero vector")
        return a / r

    def project_tangent_array(self, x: np.ndarray, a: np.ndarray) -> np.ndarray:
        return a - (x @ a) * x

    def retract_array(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        if not np.any(v):
            return x
        return self.project_point(x + v)

    def transport_array(self, x: np.ndarray, d: np.ndarray, u: np.ndarray) -> np.ndarray:
        # Derivative of a |-> (x+a)/|x+a| at a = d, applied to u.
        if not np.any(d):
            return np.array(u, dtype=float)
        y = x + d
        ny = np.linalg.norm(y)
        if ny < DEGENERATE_NORM:
            raise DegenerateRetractionError("transport through a degenerate retraction")
        yhat = y / ny
        return (u - (yhat @ u) * yhat) / ny

    def random_point(self, rng: np.random.Generator) -> "ManifoldPoint":
        g = rng.standard_normal(self.n)
        return ManifoldPoint(self.project_point(g), self)


@dataclass(frozen=True)
class Euclidean:
    """Flat R^n; retraction is vector addition and transport is the identity."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")

    @property
    def name(self) -> str:
        return f"euclidean:{self.n}"

    @property
    def tangent_dim(self) -> int:
        return self.n

    def check_point(self, coords: np.ndarray) -> None:
        if coords.shape != (self.n,):
            raise ValueError(f"point has shape {coords.shape}, expected ({self.n},)")

    def project_point(self, a) -> np.ndarray:
        return np.asarray(a, dtype=float)

    def project_tangent_array(self, x: np.ndarray, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=float)

    def retract_array(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return x + v

    def transport_array(self, x: np.ndarray, d: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.array(u, dtype=float)

    def random_point(self, rng: np.random.Generator) -> "ManifoldPoint":
        return ManifoldPoint(rng.standard_normal(self.n), self)


def manifold_from_name(name: str):
    """Parse ``"sphere:n"`` or ``"euclidean:n"`` into a manifold instance."""
    try:
        kind, dim = name.split(":")
        n = int(dim)
    except (ValueError, AttributeError):
        raise ValueError(f"malformed manifold name {name!r}") from None
    if kind == "sphere":
        return Sphere(n)
    if kind == "euclidean":
        return Euclidean(n)
    raise ValueError(f"unknown manifold kind {kind!r}")


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point on a manifold, stored in ambient coordinates."""

    coords: np.ndarray
    manifold: object

    def __post_init__(self):
        coords = _readonly(self.coords)
        self.manifold.check_point(coords)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.size

    def allclose(self, other: "ManifoldPoint", atol: float = BASE_MATCH_ATOL) -> bool:
        return self.manifold == other.manifold and bool(
            np.max(np.abs(self.coords - other.coords)) <= atol
        )

    def __repr__(self):
        return f"ManifoldPoint({self.coords.tolist()}, {self.manifold.name})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector paired with its base point.

    Components are snapped onto the tangent space on construction; deviations
    beyond TANGENT_ATOL raise when strict checks are enabled.
    """

    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.components, dtype=float)
        if raw.shape != self.base.coords.shape:
            raise ValueError(
                f"components have shape {raw.shape}, base has shape {self.base.coords.shape}"
            )
        fixed = self.base.manifold.project_tangent_array(self.base.coords, raw)
        if _STRICT_CHECKS:
            drift = np.max(np.abs(raw - fixed)) if raw.size else 0.0
            scale = max(1.0, float(np.linalg.norm(raw)))
            if drift > TANGENT_ATOL * scale:
                raise ValueError(
                    f"components deviate from the tangent space by {drift!r}"
                )
        object.__setattr__(self, "components", _readonly(fixed))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _require_same_base(self, other)
        return TangentVector(self.base, self.components + other.components)

    def __mul__(self, t: float) -> "TangentVector":
        return TangentVector(self.base, float(t) * self.components)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.components)

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, components={self.components.tolist()})"


def _require_same_base(u: TangentVector, v: TangentVector) -> None:
    if not u.base.allclose(v.base):
        raise ValueError("tangent vectors live at different base points")


def zero_tangent(x: ManifoldPoint) -> TangentVector:
    return TangentVector(x, np.zeros(x.n))


def inner(u: TangentVector, v: TangentVector) -> float:
    """Riemannian inner product; the ambient dot product for both manifolds."""
    _require_same_base(u, v)
    return float(u.components @ v.components)


def norm(v: TangentVector) -> float:
    return float(np.linalg.norm(v.components))


def project_tangent(x: ManifoldPoint, a) -> TangentVector:
    """Project an ambient vector onto the tangent space at ``x``."""
    a = np.asarray(a, dtype=float)
    if a.shape != x.coords.shape:
        raise ValueError(f"vector has shape {a.shape}, expected {x.coords.shape}")
    return TangentVector(x, x.manifold.project_tangent_array(x.coords, a))


def retract(x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    """Move from ``x`` along ``v`` and map back onto the manifold.

    The zero vector returns ``x`` itself, exactly.
    """
    if not v.base.allclose(x):
        raise ValueError("tangent vector is not based at the given point")
    if not np.any(v.components):
        return x
    return ManifoldPoint(x.manifold.retract_array(x.coords, v.components), x.manifold)


def transport_diff_retraction(
    x: ManifoldPoint, d: TangentVector, u: TangentVector
) -> TangentVector:
    """Differentiated retraction: the derivative of ``retract`` at offset ``d``
    applied to ``u``, based at ``retract(x, d)``.

    Linear in ``u``; reduces to the identity at ``d = 0``.
    """
    if not (d.base.allclose(x) and u.base.allclose(x)):
        raise ValueError("offset and transported vector must be based at x")
    y = retract(x, d)
    out = x.manifold.transport_array(x.coords, d.components, u.components)
    return TangentVector(y, out)
