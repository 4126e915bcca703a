import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracorlicz.domain import Box, IntervalUnion
from fracorlicz.trial import (Constant, Cutoff, CutoffError, Hat, LineRestriction, Polynomial, SplineCombo,
                              TensorProduct, Zero, graded_map)

UNIT = IntervalUnion(((0, 1),))


class TestClosedForms:
    def test_bump_peak(self):
        f = Polynomial.bump(0, 1, 2)
        assert float(f(0.5)[0]) == pytest.approx(1.0)
        assert float(f(1.2)[0]) == 0.0

    def test_polynomial_gradient(self):
        f = Polynomial((0.0, 1.0, -1.0))
        x = np.linspace(0.05, 0.95, 7)
        assert np.allclose(f.grad(x), 1 - 2 * x)

    def test_hat(self):
        h = Hat(0.0, 0.25, 1.0)
        assert np.allclose(h(np.array([0.125, 0.25, 0.625])), [0.5, 1.0, 0.5])

    def test_constant_and_zero(self):
        assert np.all(Zero()(np.linspace(0, 1, 5)) == 0)
        c = Constant(2.0, (0.0, 0.0), (1.0, 1.0))
        assert np.allclose(c(np.array([[0.5, 0.5], [1.5, 0.5]])), [2.0, 0.0])

    def test_tensor(self):
        f = TensorProduct(Polynomial.bump(), Hat())
        v = f(np.array([[0.5, 0.5], [0.5, 0.25]]))
        assert np.allclose(v, [1.0, 0.5])
        g = f.grad(np.array([[0.3, 0.5]]))
        assert g.shape == (1, 2)

    def test_line_restriction(self):
        f = TensorProduct(Polynomial.bump(), Polynomial.bump())
        g = LineRestriction(f, (0.0, 0.5), (1.0, 0.0))
        t = np.linspace(0.1, 0.9, 5)
        assert np.allclose(g(t), Polynomial.bump()(t))
        lo, hi = g.support_box()
        assert (lo[0], hi[0]) == (0.0, 1.0)


class TestCutoff:
    @pytest.mark.parametrize("eps", [0.25, 0.1, 2 ** -8])
    def test_invariants(self, eps):
        f = Cutoff(UNIT, eps)
        x = np.linspace(1e-6, 1 - 1e-6, 20001)
        d = np.minimum(x, 1 - x)
        v = f(x)
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(v[d >= eps] == 1.0)
        assert np.all(v[d <= eps / 2] == 0.0)
        assert np.max(np.abs(f.grad(x))) <= 3 / eps * (1 + 1e-12)

    def test_support_inside_domain(self):
        f = Cutoff(IntervalUnion(((0, 1), (2, 3))), 0.2)
        for a, b in f.support_components():
            assert 0 < a < b < 1 or 2 < a < b < 3

    def test_box(self):
        f = Cutoff(Box((0, 0), (1, 1)), 0.2)
        assert float(f(np.array([[0.5, 0.5]]))[0]) == 1.0
        assert float(f(np.array([[0.05, 0.5]]))[0]) == 0.0

    def test_too_wide(self):
        with pytest.raises(CutoffError):
            Cutoff(UNIT, 0.5)
        with pytest.raises(CutoffError):
            Cutoff(UNIT, 0.0)


class TestSplines:
    def test_needs_four_cells(self):
        with pytest.raises(ValueError):
            SplineCombo.on(UNIT, 3)

    def test_partition_of_unity_interior(self):
        f = SplineCombo.on(IntervalUnion(((0, 8),)), 8, np.ones(5))
        # uniform cubic B-splines sum to 1 away from the three boundary cells
        x = np.linspace(3.0, 5.0, 9)
        assert np.allclose(f(x), 1.0)

    def test_vanishes_outside_and_at_ends(self):
        f = SplineCombo.on(UNIT, 8, np.random.default_rng(0).normal(size=5), grading=3.0)
        assert np.allclose(f(np.array([-0.1, 0.0, 1.0, 1.1])), 0.0)

    @pytest.mark.parametrize("grading", [1.0, 4.0])
    def test_refined_reproduces(self, grading):
        rng = np.random.default_rng(2)
        f = SplineCombo.on(IntervalUnion(((0, 1), (2, 3))), 8, rng.normal(size=10), grading=grading)
        g = f.refined()
        x = np.linspace(-0.5, 3.5, 4001)
        assert np.allclose(f(x), g(x), atol=1e-12)
        assert np.allclose(f.grad(x), g.grad(x), atol=1e-9)

    def test_scaled(self):
        f = SplineCombo.on(UNIT, 8, np.arange(5.0))
        g = f.scaled(2.0)
        x = np.linspace(0, 1, 11)
        assert np.allclose(g(2 * x), f(x))

    def test_basis_derivative(self):
        f = SplineCombo.on(UNIT, 16, np.random.default_rng(4).normal(size=13), grading=2.0)
        x = np.linspace(0.01, 0.99, 50)
        h = 1e-6
        fd = (f(x + h) - f(x - h)) / (2 * h)
        assert np.allclose(f.grad(x), fd, rtol=1e-5, atol=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(g=st.floats(1.0, 6.0))
    def test_graded_map(self, g):
        xi = np.linspace(0, 1, 65)
        y = graded_map(xi, g)
        assert y[0] == 0.0 and y[-1] == 1.0
        assert np.all(np.diff(y) > 0)
        assert np.allclose(y + y[::-1], 1.0)
