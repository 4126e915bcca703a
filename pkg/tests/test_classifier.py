import math

import pytest
from hypothesis import given, settings, strategies as st

from fracorlicz import classifier as clf
from fracorlicz.classifier import (ContradictionError, DomainClass, Verdict, classify, default_s_grid, ls_check,
                                   table1)
from fracorlicz.domain import (Box, ComplementOfBox, HalfSpaceAboveGraph, IntervalUnion, LatticeHoles,
                               PuncturedSpace, StripUnion)
from fracorlicz.nfunction import llogl, power, power_log_minus, power_log_plus, sampled
from fracorlicz.variational import CutoffFamily, cutoff_sweep

BL = DomainClass("BoundedLipschitz")


def statuses(verdicts):
    return {v.inequality: v.status for v in verdicts}


def rules(verdicts):
    return {v.inequality: v.rule for v in verdicts}


class TestExamples:
    def test_power_above_critical(self):
        v = classify(power(2), 0.8, BL)
        assert statuses(v)["FOHI"] == "holds" and statuses(v)["RFOPI"] == "holds"
        assert rules(v)["FOHI"] == "Thm1.2"
        assert all(x.grade == "theorem" for x in v)

    def test_power_at_critical(self):
        v = classify(power(2), 0.5, BL)
        assert statuses(v)["FOHI"] == "fails" and rules(v)["FOHI"] == "Thm1.3(2)"
        assert statuses(v)["RFOPI"] == "unknown"

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.9])
    def test_llogl(self, s):
        v = classify(llogl(), s, BL)
        assert statuses(v)["FOHI"] == "fails" and statuses(v)["RFOPI"] == "fails"
        assert rules(v)["FOHI"] == rules(v)["RFOPI"] == "Thm1.3(1)"

    def test_bounded_domain_fopi(self):
        v = classify(llogl(), 0.5, BL)
        assert statuses(v)["FOPI"] == "holds" and rules(v)["FOPI"] == "Thm1.10(2)"

    def test_punctured(self):
        # lam^((1-N)/s) alpha(lam) with N = 2: weight -1/s; for t^2 the product is lam^(2 - 2/s)
        v = classify(power(2), 0.8, DomainClass("PuncturedSpace", 2))
        assert statuses(v)["FOHI"] == "holds" and rules(v)["FOHI"] == "Thm1.4"
        assert statuses(v)["RFOPI"] == "fails" and statuses(v)["FOPI"] == "fails"
        assert rules(v)["FOPI"] == "Prop2.6(4)"

    def test_graph_and_exterior(self):
        v = classify(power(2), 0.8, DomainClass.of(HalfSpaceAboveGraph(((0.0, 0.0),))))
        assert rules(v)["FOHI"] == "Thm1.5(1)"
        v = classify(power(2), 0.8, DomainClass.of(ComplementOfBox(Box((0, 0), (1, 1)))))
        assert rules(v)["FOHI"] == "Thm1.5(2)"

    def test_general_1d(self):
        D = IntervalUnion(((0, 1), (2, 5)))
        v = classify(power(2), 0.8, DomainClass.of(D), D)
        assert statuses(v)["RFOPI"] == "holds" and rules(v)["RFOPI"] == "Prop5.1"
        assert statuses(v)["FOPI"] == "holds"
        D = IntervalUnion(((0, math.inf),))
        v = classify(power(2), 0.8, DomainClass.of(D), D)
        assert statuses(v)["RFOPI"] == "fails" and statuses(v)["FOPI"] == "fails"

    def test_strip_sections(self):
        D = StripUnion(IntervalUnion(((0, 1), (2, 3))))
        dc = DomainClass("OpenSetWithSections", 2, sigma=(0.0, math.pi / 4))
        v = classify(power(2), 0.8, dc, D)
        assert rules(v)["RFOPI"] == "Thm1.10(1)"
        assert v[1].grade == "evidence"  # section BC is sampled

    def test_lattice_exterior(self):
        D = LatticeHoles(0.1)
        v = classify(power(2), 0.5, DomainClass.of(D), D)
        assert statuses(v)["FOPI"] == "holds" and rules(v)["FOPI"] == "Thm1.10(2)"
        assert v[2].grade == "evidence"

    def test_ls_flag(self):
        v = classify(power(2), 0.5, DomainClass("OpenSetWithSections", 2, ls=True))
        assert statuses(v)["FOPI"] == "holds" and rules(v)["FOPI"] == "Thm1.10(3)"

    def test_inconsistent_class_data(self):
        # bounded sections with infinite BC cannot both be true; both rules fire and disagree
        dc = DomainClass("OpenSetWithSections", 2, section_bc=0.5, sigma=(0.0, 1.0), bc=math.inf)
        with pytest.raises(ContradictionError, match="Thm1.10\\(1\\).*Prop2.6\\(4\\)"):
            classify(power(2), 0.8, dc)

    def test_sampled_is_evidence_grade(self):
        import numpy as np
        nf = sampled([[t, t ** 2] for t in np.geomspace(1e-3, 1e3, 40)])
        fohi, rfopi, fopi = classify(nf, 0.8, BL)
        assert fohi.status == rfopi.status == "holds"
        assert fohi.grade == rfopi.grade == "evidence"
        assert not any(h.analytic for h in fohi.evidence)
        # the exterior-measure rule never looks at A
        assert fopi.rule == "Thm1.10(2)" and fopi.grade == "theorem"

    def test_rejects(self):
        with pytest.raises(ValueError):
            classify(power(2), 1.0, BL)
        with pytest.raises(ValueError):
            classify(power(2), 0.5, BL, PuncturedSpace((0.0,)))
        with pytest.raises(ValueError):
            DomainClass("Torus")
        assert DomainClass.parse("bounded-lipschitz").tag == "BoundedLipschitz"


class TestTable1:
    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
    def test_golden(self, q):
        rep = table1(default_s_grid(q), q)
        assert rep.matches_golden, rep.mismatches

    def test_transition_at_half(self):
        rep = table1(default_s_grid(2.0), 2.0)
        assert rep.cells[("t^q", "H>0")] == (0.6, 0.7, 0.8, 0.9)
        assert rep.cells[("t^q", "H=0")] == (0.1, 0.2, 0.3, 0.4, 0.5)

    def test_examples(self):
        rep = table1([0.2], 3.0)
        assert rep.verdicts[("t^q", 0.2)]["FOHI"].status == "fails"
        rep = table1([0.5], 2.0)
        row = rep.verdicts[("t^q/log(e+t)", 0.5)]
        assert row["FOHI"].status == "fails" and row["RFOPI"].status == "fails"

    def test_gap_is_unknown(self):
        rep = table1([1 / 3], 3.0)
        assert rep.verdicts[("t^q(1+|log t|)", 1 / 3)]["RFOPI"].status == "unknown"
        assert rep.verdicts[("t^q", 1 / 3)]["RFOPI"].status == "unknown"

    def test_csv(self):
        text = table1(default_s_grid(2.0), 2.0).to_csv()
        lines = text.splitlines()
        assert lines[0] == "A(t),H>0,H=0,P1>0,P1=0"
        assert lines[4].startswith("(1+t)log(1+t)-t,NA,")


class TestRuleSoundness:
    CASES = [(power(1.5), 0.3), (power(2), 0.5), (power(3), 0.9), (power_log_plus(2), 0.5),
             (power_log_minus(2), 0.5), (llogl(), 0.4)]

    @pytest.mark.parametrize("nf,s", CASES, ids=[f"{nf.label()}-{s}" for nf, s in CASES])
    @pytest.mark.parametrize("dc", [BL, DomainClass("PuncturedSpace", 1), DomainClass("PuncturedSpace", 2),
                                    DomainClass("AboveLipschitzGraph", 2), DomainClass("General1D", bc=0.5)],
                             ids=["bl", "punct1", "punct2", "graph", "gen1d"])
    def test_verdicts_reproduce(self, nf, s, dc):
        for v in classify(nf, s, dc):
            assert v.reproduces()
            if v.status != "unknown":
                assert v.rule and v.evidence

    @settings(max_examples=60, deadline=None)
    @given(q=st.floats(1.1, 4.0), s=st.floats(0.05, 0.95),
           tag=st.sampled_from(["BoundedLipschitz", "PuncturedSpace", "General1D"]),
           row=st.sampled_from(["power", "plus", "minus"]))
    def test_fopi_never_below_rfopi(self, q, s, tag, row):
        nf = {"power": power, "plus": power_log_plus, "minus": power_log_minus}[row](q)
        st_ = statuses(classify(nf, s, DomainClass(tag, 1, bc=1.0 if tag == "General1D" else None)))
        assert not (st_["RFOPI"] == "holds" and st_["FOPI"] == "fails")

    def test_verdict_requires_rule(self):
        with pytest.raises(ValueError):
            Verdict("FOHI", "holds", "", "theorem")
        assert not Verdict("FOHI", "holds", "Thm1.2", "theorem",
                           (clf.Hypothesis("x", 1, False),)).reproduces()

    def test_contradiction_raises(self, monkeypatch):
        bogus = clf._Rule("Bogus", ("BoundedLipschitz",), (("FOHI", "holds"),),
                          lambda g: [clf.Hypothesis("always", True, True)])
        monkeypatch.setattr(clf, "RULES", clf.RULES + (bogus,))
        with pytest.raises(ContradictionError):
            classify(llogl(), 0.5, BL)


class TestConsistencyWithNumerics:
    @pytest.mark.parametrize("nf,s", [(power(2), 0.3), (power(2), 0.5), (llogl(), 0.5), (power(2), 0.8),
                                      (power(3), 0.6)])
    def test_sweep_matches_verdict(self, nf, s):
        v = statuses(classify(nf, s, BL))
        rows = cutoff_sweep(nf, IntervalUnion(((0, 1),)), s, CutoffFamily.dyadic(2, 7))
        h = [r.hardy_quotient for r in rows]
        p = [r.poincare_quotient for r in rows]
        if v["FOHI"] == "fails":
            assert all(b < a for a, b in zip(h, h[1:]))
        if v["FOHI"] == "holds":
            assert min(h) >= 1e-3 * h[0]
        if v["RFOPI"] == "fails":
            assert all(b < a for a, b in zip(p, p[1:]))
        if v["RFOPI"] == "holds":
            assert min(p) >= 1e-3 * p[0]


class TestLS:
    def test_strip(self):
        rep = ls_check(power(2), 0.8, StripUnion(IntervalUnion(((0, 1),))))
        assert rep.is_LS_evidence and rep.sections_tested > 0
        assert rep.max_section_length <= math.sqrt(2) + 1e-9
        assert rep.min_section_P2 > 0

    def test_box(self):
        rep = ls_check(power(2), 0.8, Box((0, 0), (1, 1)), n_angles=8)
        assert rep.is_LS_evidence and rep.max_section_length <= math.sqrt(2) + 1e-9

    def test_punctured(self):
        rep = ls_check(power(2), 0.8, PuncturedSpace((0.0, 0.0)), n_angles=4)
        assert not rep.is_LS_evidence and rep.min_section_P2 == 0.0

    def test_needs_plane(self):
        with pytest.raises(ValueError):
            ls_check(power(2), 0.5, IntervalUnion(((0, 1),)))
