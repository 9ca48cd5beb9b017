"""Weierstrass families and the exact group law.

Oracle values: [2](0,1) = (1/4, -9/8) and [3](0,1) = (72, 611) on
y^2 = x^3 + x + 1 were computed by hand with the tangent/chord formulas
(611^2 = 373321 = 72^3 + 72 + 1 confirms the latter); the F_5(u) doubling
was likewise done symbolically on paper and checked against the curve.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightlab.errors import (
    FiberMismatchError,
    NotOnCurveError,
    SingularFiberError,
    ZeroInputError,
)
from heightlab.exact_arith import GF, QQ, FunctionField, Poly, RatFunc
from heightlab.elliptic import (
    FiberPoint,
    WeierstrassFamily,
    add,
    base_height,
    embed,
    fiber_height,
    mul_n,
    negate,
    total_height,
)

F5 = GF(5)
K5 = FunctionField(5)

S = RatFunc.variable(QQ)          # the parameter, as a rational function
S5 = RatFunc.variable(F5)


def constant_curve_q(a, b, section=None):
    """A 'family' with constant coefficients: one curve spread over all s."""
    return WeierstrassFamily(QQ, a, b, section=section)


class TestFamilyValidation:
    def test_identically_singular_rejected(self):
        with pytest.raises(SingularFiberError):
            WeierstrassFamily(QQ, 0, 0)

    def test_bad_section_rejected(self):
        with pytest.raises(NotOnCurveError):
            WeierstrassFamily(QQ, S, 1, section=(1, 1))

    def test_good_sections(self):
        WeierstrassFamily(QQ, S, 1, section=(0, 1))
        WeierstrassFamily(QQ, S, 0, section=(0, 0))
        WeierstrassFamily(K5, S5, 1, section=(0, 1))

    def test_discriminant(self):
        fam = WeierstrassFamily(QQ, S, 1)
        # Delta = -16(4 s^3 + 27)
        assert fam.discriminant() == RatFunc(Poly(QQ, [-432, 0, 0, -64]))

    def test_fiber_checks(self):
        fam = WeierstrassFamily(QQ, S, 0, section=(0, 0))  # Delta = -64 s^3
        assert not fam.fiber_check(0).ok
        assert fam.fiber_check(1).ok
        pole = WeierstrassFamily(QQ, 1 / S, 1)
        status = pole.fiber_check(0)
        assert not status.ok and "pole" in status.reason

    def test_fiber_check_function_field(self):
        fam = WeierstrassFamily(K5, S5, 1, section=(0, 1))
        u = RatFunc.variable(F5)
        assert fam.fiber_check(u).ok
        # Delta(s) = -16(4 s^3 + 27) = 0 iff s^3 = -27/4 = 2*4 = ... a cube
        # in F_5: s = 2 works since 4*8 + 27 = 59 = 4 mod 5... check directly:
        for c in range(5):
            expected = (4 * pow(c, 3, 5) + 27) % 5 != 0
            assert fam.fiber_check(c).ok == expected


class TestGroupLawSpots:
    def test_double_hand_value(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(0, 0, 1)
        d = add(p, p)
        assert d.x == Fraction(1, 4) and d.y == Fraction(-9, 8)

    def test_triple_hand_value(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(0, 0, 1)
        t = mul_n(3, p)
        assert t.x == 72 and t.y == 611

    def test_order_six_point(self):
        fam = WeierstrassFamily(QQ, 0, 1)
        p = fam.point(0, 2, 3)
        assert add(p, p) == fam.point(0, 0, 1)
        assert mul_n(3, p) == fam.point(0, -1, 0)
        assert mul_n(6, p).is_identity()
        assert not mul_n(2, p).is_identity()
        assert not mul_n(3, p).is_identity()

    def test_double_function_field(self):
        fam = WeierstrassFamily(K5, S5, 1, section=(0, 1))
        u = RatFunc.variable(F5)
        p = fam.section_at(u)
        d = add(p, p)
        assert d.x == RatFunc(Poly(F5, [0, 0, 4]))           # 4 u^2
        assert d.y == RatFunc(Poly(F5, [4, 0, 0, 3]))        # 3 u^3 + 4

    def test_two_torsion_section(self):
        fam = WeierstrassFamily(QQ, S, 0, section=(0, 0))
        p = fam.section_at(2)
        assert add(p, p).is_identity()

    def test_identity_laws(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(0, 0, 1)
        o = fam.identity(0)
        assert add(p, o) == p and add(o, p) == p
        assert add(p, negate(p)).is_identity()
        assert mul_n(0, p).is_identity()
        assert mul_n(-2, p) == negate(mul_n(2, p))


class TestGroupLawProperties:
    @given(st.integers(-6, 6), st.integers(-6, 6))
    @settings(max_examples=30, deadline=None)
    def test_mul_homomorphism_q(self, m, n):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(0, 0, 1)  # infinite order
        assert add(mul_n(m, p), mul_n(n, p)) == mul_n(m + n, p)

    @given(st.integers(-4, 4), st.integers(-4, 4))
    @settings(max_examples=20, deadline=None)
    def test_mul_composition_ff(self, m, n):
        fam = WeierstrassFamily(K5, S5, 1, section=(0, 1))
        p = fam.section_at(RatFunc.variable(F5))
        assert mul_n(m, mul_n(n, p)) == mul_n(m * n, p)

    def test_associativity_spot(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(0, 0, 1)
        a, b, c = p, mul_n(2, p), mul_n(3, p)
        assert add(add(a, b), c) == add(a, add(b, c))


class TestValidationErrors:
    def test_not_on_curve(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        with pytest.raises(NotOnCurveError):
            fam.point(0, 1, 1)

    def test_fiber_mismatch(self):
        fam = WeierstrassFamily(QQ, S, 1, section=(0, 1))
        with pytest.raises(FiberMismatchError):
            add(fam.section_at(1), fam.section_at(2))

    def test_singular_fiber_rejected(self):
        fam = WeierstrassFamily(QQ, S, 0, section=(0, 0))
        with pytest.raises(SingularFiberError):
            fam.point(0, 0, 0)
        with pytest.raises(SingularFiberError):
            fam.identity(0)

    def test_section_required(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        with pytest.raises(ZeroInputError):
            fam.section_at(0)


class TestEmbeddingAndHeights:
    def test_embed_affine(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        p = fam.point(Fraction(1, 2), 0, 1)
        mp = embed(p)
        assert mp.factors[0].coords == (0, 1, 1)
        assert mp.factors[1].coords == (1, 2)

    def test_embed_identity(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        mp = embed(fam.identity(3))
        assert mp.factors[0].coords == (0, 1, 0)
        assert mp.factors[1].coords == (3, 1)

    def test_embedded_point_on_homogeneous_curve(self):
        # Y^2 Z = X^3 + a X Z^2 + b Z^3 must hold for the embedded triple
        fam = WeierstrassFamily(QQ, 1, 1)
        for pt in [fam.point(0, 0, 1), mul_n(2, fam.point(0, 0, 1)),
                   fam.identity(0)]:
            X, Y, Z = embed(pt).factors[0].coords
            assert Y * Y * Z == X ** 3 + X * Z * Z + Z ** 3

    def test_double_height_spot_q(self):
        # embed([2](0,1)) = ((2 : -9 : 8), (s : 1)): H_fiber = 9
        fam = WeierstrassFamily(QQ, 1, 1)
        d = mul_n(2, fam.point(1, 0, 1))
        assert embed(d).factors[0].coords == (2, -9, 8)
        assert fiber_height(d).value == 9
        assert base_height(d).value == 1
        assert total_height(d).value == 9  # product convention over Q

    def test_double_height_spot_ff(self):
        fam = WeierstrassFamily(K5, S5, 1, section=(0, 1))
        p = fam.section_at(RatFunc.variable(F5))
        assert total_height(p).value == 1  # fiber 0 + base 1
        d = add(p, p)
        assert fiber_height(d).value == 3
        assert total_height(d).value == 4  # sum convention over F_5(u)

    def test_heights_fiber_with_denominators(self):
        fam = WeierstrassFamily(QQ, 1, 1)
        d = mul_n(2, fam.point(0, 0, 1))  # (1/4, -9/8) -> (2 : -9 : 8)
        assert fiber_height(d).value == 9
