"""Shared test fixtures: small synthetic objectives and value helpers."""

import numpy as np

from nvrcg.cones import phi
from nvrcg.manifolds import norm
from nvrcg.objectives import QuadQuadObjective, VectorObjective


class LinearObjective(VectorObjective):
    """f_i(x) = <a_i, x> with constant ambient gradients (rows of R)."""

    def __init__(self, rows):
        self.rows = np.atleast_2d(np.asarray(rows, dtype=float))

    @property
    def m(self):
        return self.rows.shape[0]

    @property
    def n(self):
        return self.rows.shape[1]

    def eval_F(self, x):
        return self.rows @ x.coords

    def ambient_gradients(self, x):
        return self.rows.copy()


class EuclideanQuadratic(VectorObjective):
    """Single objective f(x) = x'Qx/2 + b'x on flat space."""

    def __init__(self, Q, b=None):
        self.Q = np.asarray(Q, dtype=float)
        self.b = np.zeros(self.Q.shape[0]) if b is None else np.asarray(b, dtype=float)

    @property
    def m(self):
        return 1

    @property
    def n(self):
        return self.Q.shape[0]

    def eval_F(self, x):
        xc = x.coords
        return np.array([0.5 * xc @ self.Q @ xc + self.b @ xc])

    def ambient_gradients(self, x):
        return (self.Q @ x.coords + self.b).reshape(1, -1)


def random_sym_pair(n, rng, scale=1.0):
    """Two independent random symmetric matrices, entries O(scale)."""
    out = []
    for _ in range(2):
        M = rng.standard_normal((n, n)) * scale
        out.append((M + M.T) / 2.0)
    return QuadQuadObjective(tuple(out))


def direction_objective(cone, obj, x, d):
    """Value of the steepest-direction subproblem objective at d."""
    return phi(cone, obj.jacobian_action(x, d)) + 0.5 * norm(d) ** 2
