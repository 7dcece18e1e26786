from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from qesforms.exactpoly import Polynomial
from qesforms.models import ModelParams, QesParams, get_model
from qesforms.spectra import qes_block
from qesforms.xcheck import cartesian, checks
from qesforms.xcheck.hyperdual import (
    HyperDual,
    gradient_and_laplacian,
    hd_exp,
    hd_log_abs,
    hyperdual_second_partials,
)

F = Fraction


def descriptor(name, N=3, **kw):
    base = dict(omega=F(1), nu=F(1, 3), nu2=F(2, 5), mu=F(1, 7), N=N)
    base.update(kw)
    return get_model(name, ModelParams(**base))


def setup(name, N=3, homogeneous=True, count=5, seed=11, **kw):
    m = descriptor(name, N, **kw)
    cm = cartesian.cartesian_for(m, tau2_homogeneous=homogeneous)
    return m, cm, checks.sample_points(cm, count, seed)


class TestHyperDual:
    def test_polynomial(self):
        f = lambda x: x[0] * x[0] * x[1]
        assert hyperdual_second_partials(f, [2.0, 3.0], 0, 0)[3] == 6.0
        assert hyperdual_second_partials(f, [2.0, 3.0], 0, 1)[3] == 4.0

    def test_log(self):
        assert hyperdual_second_partials(lambda x: hd_log_abs(x[0]), [2.0], 0, 0)[3] == pytest.approx(-0.25, rel=1e-15)

    def test_exp_and_division(self):
        f = lambda x: hd_exp(x[0]) / x[1]
        val, di, dj, dij = hyperdual_second_partials(f, [0.5, 2.0], 0, 1)
        import math

        assert dij == pytest.approx(-math.exp(0.5) / 4, rel=1e-14)

    @settings(max_examples=30)
    @given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
    def test_laplacian_matches_sympy(self, pt):
        xs = sp.symbols("x1:4")
        expr = xs[0] ** 3 * xs[1] ** 2 - 3 * xs[1] * xs[2] ** 4 + xs[0] * xs[2] + 7
        f = sp.lambdify([xs], expr)
        lap = sum(sp.diff(expr, x, 2) for x in xs)
        exact = float(lap.subs(dict(zip(xs, pt))))
        _, _, got = gradient_and_laplacian(lambda y: f(y), pt)
        scale = max(1.0, abs(exact))
        assert abs(got - exact) <= 1e-10 * scale

    def test_reciprocal(self):
        x = HyperDual(2.0, 1.0, 1.0, 0.0)
        y = x.reciprocal()
        assert (y.a, y.b, y.d) == (0.5, -0.25, 0.25)


class TestInvariants:
    def test_bcn(self):
        assert cartesian.bcn_invariants([1.0, 2.0]) == [5.0, 4.0]

    def test_g2(self):
        assert cartesian.g2_invariants([1.0, 0.0, -1.0]) == [-1.0, 0.0]

    def test_h3_tau1(self):
        m, cm, pts = setup("h3", count=8)
        for x in pts:
            assert checks.invariants_eval(cm, x)[0] == pytest.approx(sum(v * v for v in x), rel=1e-12)

    def test_h4_excluded(self):
        with pytest.raises(ValueError):
            cartesian.cartesian_for(descriptor("h4"))

    def test_points_deterministic_and_clear(self):
        cm = setup("bcn", N=2)[1]
        assert checks.sample_points(cm, 5, 3) == checks.sample_points(cm, 5, 3)
        for x in checks.sample_points(cm, 20, 3):
            assert cm.singular_distance(x) >= 1e-2


class TestGroundState:
    def test_h3_energy(self):
        m, cm, pts = setup("h3", omega=F(1), nu=F(1, 3))
        probe = checks.e0_probe(cm, pts)
        assert probe["ok"] and probe["expected_exact"] == "13/2"
        assert probe["mean"] == pytest.approx(6.5, rel=1e-8)

    @pytest.mark.parametrize("omega, nu", [(F(1), F(0)), (F(3), F(2, 7))])
    def test_h4_formula(self, omega, nu):
        # 60 reflections of H4 in four dimensions
        e0 = cartesian._e0(omega, 4, [nu] * 60)
        assert e0 == 2 * omega * (1 + 30 * nu)
        if nu == 0:
            assert e0 == 2

    @pytest.mark.parametrize(
        "name, N",
        [("calogero", 2), ("calogero", 3), ("calogero", 4), ("bcn", 2), ("bcn", 3), ("g2", 3), ("h3", 3)],
    )
    @pytest.mark.parametrize("omega, nu", [(F(1), F(1, 3)), (F(2), F(2)), (F(1), F(2)), (F(2), F(1, 3))])
    def test_constancy(self, name, N, omega, nu):
        _, cm, pts = setup(name, N, omega=omega, nu=nu)
        probe = checks.e0_probe(cm, pts)
        assert probe["spread"] <= 1e-8
        assert probe["deviation_from_expected"] <= 1e-8

    def test_needs_three_points(self):
        _, cm, pts = setup("bcn", 2)
        with pytest.raises(ValueError):
            checks.e0_probe(cm, pts[:2])


class TestGauge:
    def test_constant(self):
        m, cm, pts = setup("g2")
        one = Polynomial.constant(2, 1)
        assert checks.gauge_residual(cm, one, pts, Polynomial.zero(2), 1)["max"] <= 1e-12

    def test_calogero_b2(self):
        m, cm, pts = setup("calogero")
        t2 = Polynomial.variable(2, 0)
        nu, w = m.params.nu, m.params.omega
        corrected = t2 * (4 * w) + 2 * (1 + 3 * nu)
        assert checks.gauge_residual(cm, t2, pts, corrected, 2)["ok"]
        printed = t2 * (2 * w) + 2 * (1 + 3 * nu)
        assert checks.gauge_residual(cm, t2, pts, printed, 2)["max"] > 1e-3

    def test_h3_b3(self):
        m, cm, pts = setup("h3")
        t1, t2, t3 = Polynomial.gens(3)
        nu, w = m.params.nu, m.params.omega
        B3 = t1 * t2 * (F(-64, 15) * (2 + 5 * nu)) - t3 * (20 * w)
        assert checks.gauge_residual(cm, t3, pts, B3, -2)["ok"]

    @pytest.mark.parametrize("name, N, deg", [("calogero", 3, 3), ("bcn", 2, 3), ("g2", 3, 3), ("h3", 3, 2)])
    def test_sweep(self, name, N, deg):
        m, cm, pts = setup(name, N)
        assert checks.gauge_sweep(m, cm, pts, deg)["max"] <= 1e-9

    def test_h3_literal_tau2_rejected(self):
        m, cm, pts = setup("h3", homogeneous=False)
        assert checks.gauge_sweep(m, cm, pts, 2)["max"] > 1e-3


class TestQes:
    a, gamma = F(1, 4), F(1, 2)

    def test_derived_potential(self):
        m = descriptor("calogero", omega=F(1), nu=F(1, 3))
        pot = checks.qes_potential(m, QesParams(self.a, self.gamma, 1, 0))
        assert pot["U"] == {-1: F(1, 4), 1: F(-1), 2: F(-1, 2), 3: F(-1, 16)}
        assert pot["Z0"] == -2

    def test_ground_state_degeneration(self):
        m, cm, pts = setup("calogero")
        q = QesParams(0, 0, 0, 0)
        block = qes_block(m.operator, q, m.params.omega)
        assert checks.qes_residual(m, cm, q, block, pts)["max"] <= 1e-12

    @pytest.mark.parametrize("root", [0, 1])
    def test_calogero_k1(self, root):
        m, cm, pts = setup("calogero")
        q = QesParams(self.a, self.gamma, 1, 0)
        block = qes_block(m.operator, q, m.params.omega)
        res = checks.qes_residual(m, cm, q, block, pts, root=root)
        assert res["max"] <= 1e-7

    def test_k2(self):
        m, cm, pts = setup("calogero")
        q = QesParams(self.a, self.gamma, 2, 0)
        block = qes_block(m.operator, q, m.params.omega)
        for root in range(len(block.brackets)):
            assert checks.qes_residual(m, cm, q, block, pts, root=root)["max"] <= 1e-7

    def test_perturbation_detected(self):
        m, cm, pts = setup("calogero")
        q = QesParams(self.a, self.gamma, 1, 0)
        block = qes_block(m.operator, q, m.params.omega)
        assert checks.qes_residual(m, cm, q, block, pts, u_scale={2: 1.1})["max"] > 1e-3

    def test_tabulated_potential_inconsistent(self):
        m, cm, pts = setup("calogero")
        res = checks.printed_calogero_qes_spread(3, 1, F(1, 3), self.a, self.gamma, pts)
        assert res["spread"] > 1e-3
