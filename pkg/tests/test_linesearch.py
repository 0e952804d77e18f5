import numpy as np
import pytest

from helpers import EuclideanQuadratic, LinearObjective, random_sym_pair
from nvrcg.cones import ConeSpec, phi
from nvrcg.linesearch import (
    InvalidDirectionError,
    WolfeParams,
    check_armijo,
    check_curvature,
    psi,
    wolfe_search,
)
from nvrcg.manifolds import Euclidean, ManifoldPoint, Sphere, TangentVector, norm
from nvrcg.objectives import QuadLinearObjective
from nvrcg.subproblem import steepest_direction

MO1 = ConeSpec.multiobjective(1)
MO2 = ConeSpec.multiobjective(2)
A3 = QuadLinearObjective(A=[[1.0, 2.0], [2.0, 2.0]], c=[1.0, 1.0])


def epoint(*coords):
    c = np.asarray(coords, dtype=float)
    return ManifoldPoint(c, Euclidean(c.size))


class TestWolfeParams:
    def test_defaults_valid(self):
        p = WolfeParams()
        assert 0 < p.c1 < p.c2 < 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"c1": 0.7, "c2": 0.6},
            {"c1": 0.0},
            {"c2": 1.0},
            {"t_init": 0.0},
            {"t_min": -1.0},
            {"max_expansions": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            WolfeParams(**kwargs)

    def test_from_dict(self):
        p = WolfeParams.from_dict({"c1": 0.001, "c2": 0.6, "strong": True})
        assert p.c1 == 0.001 and p.strong


class TestPsi:
    def test_zero_step_is_plain_derivative(self):
        x = ManifoldPoint(np.array([1.0, 0.0]), Sphere(2))
        d = TangentVector(x, np.array([0.0, 1.0]))
        assert psi(MO2, A3, x, d, 0.0) == phi(MO2, A3.jacobian_action(x, d))

    def test_scalar_quadratic_closed_form(self):
        # f(x) = |x|^2/2 on flat space: psi(t) = <x + t d, d>
        obj = EuclideanQuadratic(np.eye(3))
        rng = np.random.default_rng(0)
        x = epoint(*rng.standard_normal(3))
        d = TangentVector(x, rng.standard_normal(3))
        for t in (0.0, 0.3, 1.0, 2.5):
            expected = (x.coords + t * d.components) @ d.components
            assert psi(MO1, obj, x, d, t) == pytest.approx(expected, abs=1e-12)

    def test_zero_direction(self):
        x = ManifoldPoint(np.array([0.0, 1.0]), Sphere(2))
        d = TangentVector(x, np.zeros(2))
        for t in (0.0, 1.0, 7.0):
            assert psi(MO2, A3, x, d, t) == 0.0

    def test_negative_step_rejected(self):
        x = ManifoldPoint(np.array([1.0, 0.0]), Sphere(2))
        d = TangentVector(x, np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            psi(MO2, A3, x, d, -0.5)


def descent_setup(seed=0):
    """A sphere point and its steepest direction on the A3 instance."""
    man = Sphere(2)
    rng = np.random.default_rng(seed)
    while True:
        x = man.random_point(rng)
        res = steepest_direction(MO2, A3, x)
        if norm(res.v) > 1e-3:
            return x, res.v


class TestArmijo:
    def test_zero_step_always_holds(self):
        x, v = descent_setup()
        F_x = A3.eval_F(x)
        psi0 = psi(MO2, A3, x, v, 0.0)
        assert check_armijo(MO2, A3, x, v, 0.0, 0.1, F_x, psi0)

    def test_small_step_holds(self):
        x, v = descent_setup(1)
        F_x = A3.eval_F(x)
        psi0 = psi(MO2, A3, x, v, 0.0)
        assert check_armijo(MO2, A3, x, v, 1e-6, 0.1, F_x, psi0)

    def test_huge_step_fails_on_coercive_instance(self):
        # the objective is bounded on the sphere while the comparison line
        # keeps dropping, so a huge step cannot satisfy sufficient decrease
        x, v = descent_setup(2)
        F_x = A3.eval_F(x)
        psi0 = psi(MO2, A3, x, v, 0.0)
        assert psi0 < 0
        assert not check_armijo(MO2, A3, x, v, 1e3, 0.1, F_x, psi0)

    def test_huge_step_fails_euclidean_quadratic(self):
        obj = EuclideanQuadratic(np.eye(2))
        x = epoint(3.0, 4.0)
        d = TangentVector(x, -x.coords)
        psi0 = psi(MO1, obj, x, d, 0.0)
        assert not check_armijo(MO1, obj, x, d, 1e3, 0.1, obj.eval_F(x), psi0)


class TestCurvature:
    def test_zero_step_fails_weak(self):
        x, v = descent_setup(3)
        psi0 = psi(MO2, A3, x, v, 0.0)
        assert not check_curvature(MO2, A3, x, v, 0.0, 0.6, psi0, strong=False)

    def test_flat_point_passes_both(self):
        # f(x)=|x|^2/2, d=-x: psi(t) = (t-1)|x|^2 vanishes at t=1
        obj = EuclideanQuadratic(np.eye(2))
        x = epoint(1.0, 2.0)
        d = TangentVector(x, -x.coords)
        psi0 = psi(MO1, obj, x, d, 0.0)
        assert check_curvature(MO1, obj, x, d, 1.0, 0.6, psi0, strong=False)
        assert check_curvature(MO1, obj, x, d, 1.0, 0.6, psi0, strong=True)


class TestWolfeSearch:
    def test_euclidean_quadratic_unit_step(self):
        # psi(1) = 0 exactly, so the first trial satisfies both conditions
        obj = EuclideanQuadratic(np.eye(4))
        rng = np.random.default_rng(1)
        x = epoint(*rng.standard_normal(4))
        d = TangentVector(x, -x.coords)
        out = wolfe_search(MO1, obj, x, d, WolfeParams(c1=0.1, c2=0.6))
        assert out.status == "accepted"
        assert 0.0 < out.t < 2.0
        assert out.evals == 1
        assert out.psi_at_t == pytest.approx(0.0, abs=1e-12)

    def test_accepts_on_benchmark_instance(self):
        params = WolfeParams(c1=0.1, c2=0.6, strong=True)
        for seed in range(10):
            x, v = descent_setup(seed + 10)
            out = wolfe_search(MO2, A3, x, v, params)
            assert out.status == "accepted"
            assert out.evals <= 50

    def test_accepted_steps_reverify(self):
        params = WolfeParams(c1=0.1, c2=0.6, strong=True)
        for seed in range(10):
            x, v = descent_setup(seed + 30)
            out = wolfe_search(MO2, A3, x, v, params)
            F_x = A3.eval_F(x)
            psi0 = psi(MO2, A3, x, v, 0.0)
            assert check_armijo(MO2, A3, x, v, out.t, params.c1, F_x, psi0)
            assert check_curvature(MO2, A3, x, v, out.t, params.c2, psi0, params.strong)
            assert out.psi_at_t == psi(MO2, A3, x, v, out.t)
            from nvrcg.manifolds import retract

            assert np.array_equal(out.F_new, A3.eval_F(retract(x, out.t * v)))

    def test_step_scales_inversely_with_direction(self):
        obj = EuclideanQuadratic(np.eye(3))
        rng = np.random.default_rng(2)
        x = epoint(*rng.standard_normal(3))
        d = TangentVector(x, -x.coords)
        params = WolfeParams(c1=0.1, c2=0.6)
        t1 = wolfe_search(MO1, obj, x, d, params).t
        t10 = wolfe_search(MO1, obj, x, 10.0 * d, params).t
        assert t10 == pytest.approx(t1 / 10.0, rel=0.5)

    def test_rejects_ascent_direction(self):
        obj = EuclideanQuadratic(np.eye(2))
        x = epoint(1.0, 1.0)
        d = TangentVector(x, x.coords)  # uphill
        with pytest.raises(InvalidDirectionError):
            wolfe_search(MO1, obj, x, d, WolfeParams())

    def test_stagnates_when_window_is_tiny(self):
        # the second component curves up so hard that sufficient decrease
        # only holds for t below ~1e-8, far under the stagnation width
        curvature = 1e8

        class Sharp(EuclideanQuadratic):
            @property
            def m(self):
                return 2

            def eval_F(self, x):
                x1 = x.coords[0]
                return np.array([x1, x1 + curvature * x1 * x1])

            def ambient_gradients(self, x):
                x1 = x.coords[0]
                return np.array([[1.0, 0.0], [1.0 + 2 * curvature * x1, 0.0]])

        sharp = Sharp(np.eye(2))
        x = epoint(0.0, 0.0)
        d = TangentVector(x, np.array([-1.0, 0.0]))
        out = wolfe_search(MO2, sharp, x, d, WolfeParams(c1=0.1, c2=0.6, strong=True))
        assert out.status == "stagnated"
        assert out.t <= 1e-4

    def test_acceptance_rate_on_random_instances(self):
        params = WolfeParams(c1=0.1, c2=0.6, strong=True)
        rng = np.random.default_rng(3)
        accepted = 0
        trials = 0
        while trials < 40:
            n = int(rng.integers(2, 6))
            man = Sphere(n)
            obj = random_sym_pair(n, rng)
            x = man.random_point(rng)
            res = steepest_direction(MO2, obj, x)
            if norm(res.v) <= 1e-3:
                continue
            trials += 1
            out = wolfe_search(MO2, obj, x, res.v, params)
            accepted += out.status == "accepted"
        assert accepted == trials
