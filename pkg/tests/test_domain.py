import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracorlicz.domain import (AnnulusUnion, Ball, Box, ComplementOfBox, DomainSpecError, HalfSpaceAboveGraph,
                               IntervalUnion, LatticeHoles, PuncturedSpace, StripUnion, ball_condition,
                               dist_boundary, domain_from_spec, exterior_measure_lb, line_section, parse_domain)

SHAPES = [
    IntervalUnion(((0, 1), (2, 5))),
    Box((0, 0), (1, 2)),
    Ball((0.0, 0.0), 1.0),
    AnnulusUnion((0.0, 0.0), ((1.0, 2.0), (3.0, 3.5))),
    PuncturedSpace((0.0, 0.0)),
    ComplementOfBox(Box((0, 0), (1, 1))),
    HalfSpaceAboveGraph(((0.0, 0.0), (1.0, 1.0), (2.0, 0.5)), -0.5, 0.25),
    StripUnion(IntervalUnion(((0, 1), (2, 3)))),
    LatticeHoles(0.1),
]


def _unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


class TestDistance:
    def test_examples(self):
        assert dist_boundary(IntervalUnion(((0, 1),)), 0.3)[0] == pytest.approx(0.3)
        assert dist_boundary(Ball((0.0, 0.0), 1.0), [0.6, 0.0])[0] == pytest.approx(0.4)
        assert dist_boundary(PuncturedSpace((0.0, 0.0)), [3.0, 4.0])[0] == pytest.approx(5.0)

    def test_outside_is_zero(self):
        assert dist_boundary(IntervalUnion(((0, 1),)), 1.5)[0] == 0.0

    def test_graph(self):
        D = HalfSpaceAboveGraph(((0.0, 0.0),))
        assert dist_boundary(D, [3.0, 2.0])[0] == pytest.approx(2.0)

    @pytest.mark.parametrize("D", [IntervalUnion(((0, 1), (2, 5))), Box((0, 0), (1, 2)), Ball((1.0, -1.0), 2.0),
                                   Ball((0.5,), 0.5)], ids=["intervals", "box", "ball2", "ball1"])
    def test_nearest_point_realises_distance(self, D):
        rng = np.random.default_rng(1)
        lo, hi = D.bounding_box()
        x = rng.uniform(lo, hi, size=(4000, D.dim))
        x = x[D.contains(x)][:1000]
        assert len(x) > 100
        y = D.nearest_boundary_point(x)
        d = dist_boundary(D, x)
        assert np.allclose(np.linalg.norm(x - y.reshape(x.shape), axis=1), d, rtol=1e-12, atol=1e-14)


class TestBallCondition:
    def test_examples(self):
        assert ball_condition(IntervalUnion(((0, 1), (2, 5)))) == 1.5
        assert ball_condition(StripUnion(IntervalUnion(((0, 1), (2, 3))))) == 0.5
        assert ball_condition(PuncturedSpace((0.0,))) == math.inf
        assert ball_condition(Box((0, 0), (1, 3))) == 0.5
        assert ball_condition(AnnulusUnion((0.0, 0.0), ((1.0, 2.0),))) == 0.5

    def test_strip_inradius_brute_force(self):
        D = StripUnion(IntervalUnion(((0, 1), (2, 2.6))))
        xs = np.linspace(-1, 4, 5001)
        pts = np.stack([xs, np.zeros_like(xs)], axis=1)
        assert dist_boundary(D, pts).max() == pytest.approx(D.ball_condition(), abs=1e-3)

    @settings(max_examples=100, deadline=None)
    @given(a=st.floats(-5, 5), w=st.floats(0.01, 5), u=st.floats(0, 0.45), v=st.floats(0, 0.45))
    def test_monotone_under_inclusion(self, a, w, u, v):
        inner = IntervalUnion(((a + u * w, a + w - v * w),))
        outer = IntervalUnion(((a - w, a + w), (a + 2 * w, a + 5 * w)))
        assert inner.ball_condition() <= outer.ball_condition()
        assert Ball((0.0, 0.0), w * (1 - u)).ball_condition() <= Ball((0.0, 0.0), w).ball_condition()
        box_in = Box((a + u * w, 0), (a + w, 1))
        assert box_in.ball_condition() <= Box((a, 0), (a + w, 1 + v)).ball_condition()


class TestLineSection:
    def test_box(self):
        sec = line_section(Box((0, 0), (1, 1)), [0.0, 0.5], [1.0, 0.0])
        assert sec.intervals == ((0.0, 1.0),)

    def test_strip_sec_theta(self):
        D = StripUnion(IntervalUnion(((0, 1), (2, 3))))
        omega = _unit(math.pi / 6)
        sec = line_section(D, [0.0, 0.0], omega)
        assert sec.lengths() == pytest.approx([1 / math.cos(math.pi / 6)] * 2, rel=1e-12)
        assert 1 / math.cos(math.pi / 6) == pytest.approx(1.1547, abs=1e-4)

    def test_annulus(self):
        sec = line_section(AnnulusUnion((0.0, 0.0), ((1.0, 2.0),)), [0.0, 0.0], [1.0, 0.0])
        assert np.allclose(sec.intervals, [[-2.0, -1.0], [1.0, 2.0]], rtol=0, atol=1e-14)

    def test_base_must_be_orthogonal(self):
        with pytest.raises(ValueError):
            line_section(Box((0, 0), (1, 1)), [0.5, 0.5], [1.0, 0.0])
        with pytest.raises(ValueError):
            line_section(Box((0, 0), (1, 1)), [0.0, 0.0], [1.0, 1.0])

    @pytest.mark.parametrize("D", SHAPES[1:], ids=lambda d: type(d).__name__)
    def test_round_trip(self, D):
        rng = np.random.default_rng(7)
        if D.dim == 1:
            return
        for k in range(8):
            theta = rng.uniform(0, math.pi)
            omega = _unit(theta)
            perp = np.array([-omega[1], omega[0]])
            x = rng.uniform(-2, 3) * perp
            sec = line_section(D, x, omega)
            t = rng.uniform(-12, 12, size=1000)
            member = D.contains(x[None, :] + t[:, None] * omega[None, :])
            # sets agree away from the (measure-zero) boundary crossings
            ends = np.array([e for iv in sec.intervals for e in iv if math.isfinite(e)])
            if ends.size:
                t, member = t[np.min(np.abs(t[:, None] - ends[None, :]), axis=1) > 1e-9], \
                    member[np.min(np.abs(t[:, None] - ends[None, :]), axis=1) > 1e-9]
            assert np.array_equal(sec.contains(t), member)

    def test_interval_round_trip_1d(self):
        D = SHAPES[0]
        sec = line_section(D, [0.0], [1.0])
        t = np.random.default_rng(3).uniform(-1, 6, 1000)
        assert np.array_equal(sec.contains(t), D.contains(t[:, None]))


class TestExteriorMeasure:
    def test_interval(self):
        m = exterior_measure_lb(IntervalUnion(((0, 1),)), 2.0, 500)
        assert m.value == pytest.approx(3.0, abs=1e-12)
        assert m.value >= 2.0

    def test_lattice(self):
        m = exterior_measure_lb(LatticeHoles(0.1), 1.0, 500)
        assert m.value >= math.pi / 100 * (1 - 1e-12)

    def test_punctured(self):
        assert exterior_measure_lb(PuncturedSpace((0.0, 0.0)), 3.0, 100).value == 0.0

    def test_box_monte_carlo(self):
        # the unit disc around the centre of the unit square covers it, leaving pi - 1 outside;
        # every other centre sees more
        m = exterior_measure_lb(Box((0, 0), (1, 1)), 1.0, 200, inner_samples=4000)
        assert math.pi - 1 - 5 * m.std_error <= m.value <= math.pi - 1 + 0.15

    def test_radius_positive(self):
        with pytest.raises(ValueError):
            exterior_measure_lb(IntervalUnion(((0, 1),)), 0.0)


class TestSpecs:
    @pytest.mark.parametrize("D", SHAPES, ids=lambda d: type(d).__name__)
    def test_round_trip(self, D):
        assert domain_from_spec(D.to_spec()) == D

    def test_shorthand(self):
        assert parse_domain("interval:0,1") == IntervalUnion(((0, 1),))
        assert parse_domain("intervals:0,1,2,5") == IntervalUnion(((0, 1), (2, 5)))
        assert parse_domain("box2d") == Box((0, 0), (1, 1))
        assert parse_domain("ball:2") == IntervalUnion(((-2, 2),))

    @pytest.mark.parametrize("bad", [{"shape": "torus"}, {"shape": "interval", "lo": 1, "hi": 0}, {"lo": 0},
                                     {"shape": "box", "lo": [0]}])
    def test_rejects(self, bad):
        with pytest.raises(DomainSpecError):
            domain_from_spec(bad)

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(DomainSpecError):
            IntervalUnion(((0, 2), (1, 3)))

    def test_scaling(self):
        D = IntervalUnion(((0, 1),)).scaled(2.0)
        assert D == IntervalUnion(((0, 2),))
        assert Box((0, 0), (1, 1)).scaled(0.5).measure() == pytest.approx(0.25)
