"""Projective normalization, exact Weil heights, morphisms, fit verifiers.

Expected heights in the frozen tests were computed by hand on canonical
coordinates (coprimality / degree counts checked on paper).
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heightlab.errors import (
    BaseLocusError,
    DomainError,
    FieldMismatchError,
    ZeroInputError,
)
from heightlab.exact_arith import GF, QQ, FunctionField, Poly, RatFunc
from heightlab.heights import (
    BlowUpPlane,
    ExactHeight,
    MorphismSpec,
    MultiProjPoint,
    apply_morphism,
    base_element_height,
    fit_linear_height_bound,
    multiprojective_height,
    normalize_point,
    segre,
    veronese,
    verify_two_sided_bound,
    weil_height,
)

F5 = GF(5)
K5 = FunctionField(5)


class TestNormalizePoint:
    def test_rational_scaling_and_sign(self):
        p = normalize_point(QQ, (Fraction(4, 6), Fraction(2, 3), 0))
        assert p.coords == (1, 1, 0)
        q = normalize_point(QQ, (-2, 4))
        assert q.coords == (1, -2)

    def test_all_zero_rejected(self):
        with pytest.raises(ZeroInputError):
            normalize_point(QQ, (0, 0))
        with pytest.raises(ZeroInputError):
            normalize_point(K5, (Poly.zero(F5), 0))

    def test_function_field_monic_leading(self):
        p = normalize_point(K5, (Poly(F5, [0, 2]), Poly(F5, [4])))
        assert p.coords == (Poly(F5, [0, 1]), Poly(F5, [2]))

    def test_function_field_clears_denominators(self):
        s = RatFunc(Poly(F5, [0, 0, 1]), Poly(F5, [1, 1]))  # u^2/(u+1)
        p = normalize_point(K5, (s, 1))
        assert p.coords == (Poly(F5, [0, 0, 1]), Poly(F5, [1, 1]))

    @given(st.lists(st.fractions(min_value=-30, max_value=30, max_denominator=20),
                    min_size=2, max_size=4).filter(lambda cs: any(cs)),
           st.fractions(min_value=-9, max_value=9, max_denominator=9)
           .filter(lambda c: c != 0))
    def test_scaling_invariance_q(self, coords, scale):
        a = normalize_point(QQ, coords)
        b = normalize_point(QQ, [scale * c for c in coords])
        assert a == b

    @given(st.lists(st.lists(st.integers(0, 4), max_size=4), min_size=2, max_size=3)
           .map(lambda rows: [Poly(F5, r) for r in rows])
           .filter(lambda ps: any(not f.is_zero() for f in ps)),
           st.lists(st.integers(0, 4), min_size=1, max_size=3)
           .map(lambda r: Poly(F5, r)).filter(lambda f: not f.is_zero()))
    def test_scaling_invariance_ff(self, coords, scale):
        a = normalize_point(K5, coords)
        b = normalize_point(K5, [scale * c for c in coords])
        assert a == b

    @given(st.lists(st.fractions(min_value=-30, max_value=30, max_denominator=20),
                    min_size=2, max_size=4).filter(lambda cs: any(cs)))
    def test_idempotent(self, coords):
        p = normalize_point(QQ, coords)
        assert normalize_point(QQ, p.coords) == p


class TestWeilHeight:
    def test_rational_heights(self):
        assert weil_height(normalize_point(QQ, (3, 5))).value == 5
        assert weil_height(normalize_point(QQ, (Fraction(3, 5), 1))).value == 5
        assert weil_height(normalize_point(QQ, (1, 0, 0))).value == 1

    def test_function_field_heights(self):
        s = RatFunc(Poly(F5, [0, 0, 1]), Poly(F5, [1, 1]))
        assert base_element_height(K5, s).value == 2
        assert weil_height(normalize_point(K5, (1, 0))).value == 0

    def test_height_at_least_trivial(self):
        assert weil_height(normalize_point(QQ, (0, 7))).value == 1

    def test_log_value(self):
        h = ExactHeight(QQ, 9)
        assert math.isclose(h.log_value(), 2 * math.log(3), rel_tol=1e-15)
        assert ExactHeight(K5, 4).log_value() == 4.0

    def test_combine(self):
        assert ExactHeight(QQ, 3).combine(ExactHeight(QQ, 5)).value == 15
        assert ExactHeight(K5, 3).combine(ExactHeight(K5, 5)).value == 8
        with pytest.raises(FieldMismatchError):
            ExactHeight(QQ, 1).combine(ExactHeight(K5, 1))

    def test_multiprojective(self):
        mp = MultiProjPoint((normalize_point(QQ, (2, 3)),
                             normalize_point(QQ, (1, 5))))
        assert multiprojective_height(mp).value == 15


class TestMorphisms:
    def test_veronese_shape(self):
        v = veronese(1, 2)
        assert v.source_dim == 1 and v.target_dim == 2 and v.degree == 2
        v3 = veronese(2, 2)
        assert v3.target_dim == 5

    def test_veronese_spot_values(self):
        p = normalize_point(QQ, (2, 3))
        img = apply_morphism(veronese(1, 2), p)
        assert img.coords == (4, 6, 9)
        q = normalize_point(QQ, (1, 2, 3))
        img2 = apply_morphism(veronese(2, 2), q)
        assert img2.coords == (1, 2, 3, 4, 6, 9)

    def test_veronese_height_identity_ff(self):
        p = normalize_point(K5, (Poly(F5, [0, 1]), Poly(F5, [1])))  # (u : 1)
        img = apply_morphism(veronese(1, 2), p)
        assert weil_height(img).value == 2

    def test_homogeneity_validation(self):
        with pytest.raises(ZeroInputError):
            MorphismSpec(1, 1, (((1, (1, 0)),), ((1, (0, 2)),)))

    def test_domain_clause(self):
        # (x:y:z) -> (x:y) away from (0:0:1)
        proj = MorphismSpec(2, 1, (((1, (1, 0, 0)),), ((1, (0, 1, 0)),)),
                            nonvanishing=((0, 1),))
        with pytest.raises(DomainError):
            apply_morphism(proj, normalize_point(QQ, (0, 0, 1)))
        img = apply_morphism(proj, normalize_point(QQ, (2, 4, 1)))
        assert img.coords == (1, 2)

    def test_base_locus_detected(self):
        proj = MorphismSpec(2, 1, (((1, (1, 0, 0)),), ((1, (0, 1, 0)),)))
        with pytest.raises(BaseLocusError):
            apply_morphism(proj, normalize_point(QQ, (0, 0, 1)))

    def test_segre_spot(self):
        p = normalize_point(QQ, (1, 2))
        q = normalize_point(QQ, (1, 3))
        assert segre(p, q).coords == (1, 3, 2, 6)

    @given(st.integers(-40, 40), st.integers(-40, 40),
           st.integers(-40, 40), st.integers(-40, 40))
    def test_segre_height_multiplicative(self, a, b, c, d):
        if (a == 0 and b == 0) or (c == 0 and d == 0):
            return
        p = normalize_point(QQ, (a, b))
        q = normalize_point(QQ, (c, d))
        assert weil_height(segre(p, q)).value == \
            weil_height(p).value * weil_height(q).value

    @given(st.integers(-60, 60), st.integers(-60, 60), st.integers(2, 3))
    def test_veronese_height_power_q(self, a, b, d):
        if a == 0 and b == 0:
            return
        p = normalize_point(QQ, (a, b))
        img = apply_morphism(veronese(1, d), p)
        assert weil_height(img).value == weil_height(p).value ** d


class TestHeightFits:
    def test_veronese_fit_is_exact(self):
        pts = [normalize_point(QQ, (a, b))
               for a in range(-6, 7) for b in range(1, 7)]
        fit = fit_linear_height_bound(veronese(1, 2), pts)
        assert fit.c1 == 2 and fit.c2 == 0 and fit.verdict

    def test_veronese_fit_exact_ff(self):
        pts = [normalize_point(K5, (Poly(F5, list(t) + [1]), 1))
               for t in [(0,), (1,), (2, 3), (1, 0, 4)]]
        fit = fit_linear_height_bound(veronese(1, 2), pts)
        assert fit.c1 == 2 and fit.c2 == 0 and fit.verdict

    def test_nontrivial_offset_detected(self):
        # (x:y) -> (x^2 + y^2 : y^2) is degree 2 but not height-exact:
        # at (1:1) the image is (2:1), so c2 = log 2 on this sample
        f = MorphismSpec(1, 1, (((1, (2, 0)), (1, (0, 2))), ((1, (0, 2)),)))
        fit = fit_linear_height_bound(f, [normalize_point(QQ, (1, 1))])
        assert fit.verdict and math.isclose(fit.c2, math.log(2), rel_tol=1e-12)


class TestBlowUp:
    def test_section_and_projection(self):
        bl = BlowUpPlane(QQ)
        p = normalize_point(QQ, (2, 3, 5))
        s = bl.section(p)
        assert s.factors[1].coords == (2, 3)
        assert bl.projection(s) == p
        assert bl.incidence_holds(s)

    def test_center_rejected(self):
        bl = BlowUpPlane(QQ)
        with pytest.raises(DomainError):
            bl.section(normalize_point(QQ, (0, 0, 1)))

    def test_two_sided_bound_rational(self):
        bl = BlowUpPlane(QQ)
        pts = [normalize_point(QQ, (a, b, c))
               for a in range(-4, 5) for b in range(-2, 3) for c in range(1, 4)
               if not (a == 0 and b == 0)]
        fit = verify_two_sided_bound(bl, pts)
        assert fit.verdict
        assert fit.c1 == 1 and fit.c2 == 2
        assert fit.d1 == 0.0 and fit.d2 == 0.0  # projection only drops height

    def test_two_sided_bound_function_field(self):
        bl = BlowUpPlane(K5)
        pts = [normalize_point(K5, coords) for coords in [
            (Poly(F5, [0, 1]), Poly(F5, [1]), Poly(F5, [3])),
            (Poly(F5, [1, 1]), Poly(F5, [2, 0, 1]), Poly(F5, [1])),
            (Poly(F5, [1]), Poly(F5, [0, 0, 1]), Poly(F5, [0, 1])),
        ]]
        fit = verify_two_sided_bound(bl, pts)
        assert fit.verdict and fit.d1 == 0 and fit.d2 == 0
