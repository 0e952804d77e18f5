"""Ordering cones given by finite dual generator sets, and the max-scalarization.

The partial order ``u <= v`` means ``v - u`` lies in the cone ``K``.  ``K`` is
described indirectly through a finite set of generators of its dual cone: a
vector belongs to ``K`` exactly when its inner product with every generator is
nonnegative.  This representation is exact for polyhedral cones whose dual is
generated by the listed vectors, which covers the componentwise
(multiobjective) order used throughout the benchmarks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def _readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ConeSpec:
    """Cone order on R^m via dual generators plus a reference element.

    Parameters
    ----------
    generators : array_like, shape (p, m)
        Nonzero vectors generating the dual cone.  For the multiobjective
        order this is the canonical basis of R^m.
    e_vector : array_like, shape (m,)
        Element of the cone used by the sufficient-decrease test.  Each
        generator ``w`` must satisfy ``0 < <w, e_vector> <= 1``.
    """

    generators: np.ndarray
    e_vector: np.ndarray

    def __post_init__(self):
        W = _readonly(np.atleast_2d(self.generators))
        e = _readonly(self.e_vector)
        if W.ndim != 2:
            raise ValueError("generators must form a 2-d array")
        if e.ndim != 1 or e.size != W.shape[1]:
            raise ValueError(
                f"e_vector has dimension {e.size}, generators have dimension {W.shape[1]}"
            )
        norms = np.linalg.norm(W, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("every generator must be nonzero")
        we = W @ e
        if np.any(we <= 0.0) or np.any(we > 1.0 + 1e-12):
            raise ValueError(
                "each generator w must satisfy 0 < <w, e_vector> <= 1, got "
                f"{we.tolist()}"
            )
        object.__setattr__(self, "generators", W)
        object.__setattr__(self, "e_vector", e)

    @property
    def m(self) -> int:
        """Dimension of the ordered space."""
        return self.generators.shape[1]

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]

    @classmethod
    def multiobjective(cls, m: int) -> "ConeSpec":
        """Componentwise order on R^m: canonical basis generators, all-ones e."""
        if m < 1:
            raise ValueError("m must be positive")
        return cls(generators=np.eye(m), e_vector=np.ones(m))

    @classmethod
    def from_dict(cls, d: dict) -> "ConeSpec":
        return cls(generators=d["generators"], e_vector=d["e"])

    def to_dict(self) -> dict:
        return {
            "generators": self.generators.tolist(),
            "e": self.e_vector.tolist(),
        }


def cone_from_spec(spec) -> ConeSpec:
    """Build a ConeSpec from a preset name, dict, JSON string, or file path.

    Accepted forms: ``"multiobjective:m"``, a mapping with ``generators``/``e``
    keys, a JSON string of that mapping, or a path to a JSON file.
    """
    if isinstance(spec, ConeSpec):
        return spec
    if isinstance(spec, dict):
        return ConeSpec.from_dict(spec)
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if text.startswith("multiobjective:"):
            return ConeSpec.multiobjective(int(text.split(":", 1)[1]))
        if text.lstrip().startswith("{"):
            return ConeSpec.from_dict(json.loads(text))
        return ConeSpec.from_dict(json.loads(Path(text).read_text()))
    raise TypeError(f"cannot build a cone from {spec!r}")


def _check_dim(cone: ConeSpec, y: np.ndarray, name: str) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (cone.m,):
        raise ValueError(f"{name} has shape {y.shape}, expected ({cone.m},)")
    return y


def phi(cone: ConeSpec, y) -> float:
    """Largest inner product of ``y`` against the generator set.

    For the multiobjective preset this is simply ``max(y)``.  Negative values
    certify that ``y`` points into the interior of ``-K``.
    """
    y = _check_dim(cone, y, "y")
    return float(np.max(cone.generators @ y))


def phi_batch(cone: ConeSpec, Y) -> np.ndarray:
    """Row-wise version of :func:`phi` for an (N, m) array."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] != cone.m:
        raise ValueError(f"Y has shape {Y.shape}, expected (N, {cone.m})")
    return (Y @ cone.generators.T).max(axis=1)


def leq_K(cone: ConeSpec, u, v) -> bool:
    """Order test ``u <= v``: is ``v - u`` in the cone?

    Membership is decided through the dual generators, which is exact when the
    generators span the full dual cone of a polyhedral K.
    """
    u = _check_dim(cone, u, "u")
    v = _check_dim(cone, v, "v")
    return bool(np.all(cone.generators @ (v - u) >= 0.0))


def is_K_descent(cone: ConeSpec, jacobian_action) -> bool:
    """A direction is descent iff the scalarized derivative is negative."""
    return phi(cone, jacobian_action) < 0.0
