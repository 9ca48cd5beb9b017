"""Places, valuations, capped factoring, and the exact product formula.

Expected factorizations below were checked by hand (or by plain integer
arithmetic in the test itself) before freezing.
"""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heightlab.errors import FactorizationError, ZeroInputError
from heightlab.exact_arith import GF, QQ, FunctionField, Poly, RatFunc
from heightlab.places import (
    Place,
    factor_monic_poly,
    factor_positive_int,
    is_irreducible,
    local_value,
    support,
    verify_product_formula,
)

F5 = GF(5)
K5 = FunctionField(5)


class TestIntegerFactoring:
    def test_360(self):
        assert factor_positive_int(360) == {2: 3, 3: 2, 5: 1}

    def test_one(self):
        assert factor_positive_int(1) == {}

    def test_large_prime_residual_certified(self):
        # 1000003 is prime; full trial division up to sqrt certifies it
        assert factor_positive_int(1000003) == {1000003: 1}

    def test_composite_residual_over_cap_raises(self):
        with pytest.raises(FactorizationError):
            factor_positive_int(1000003 * 1000003)

    @given(st.integers(1, 10 ** 6))
    def test_reconstructs(self, n):
        prod = 1
        for p, e in factor_positive_int(n).items():
            prod *= p ** e
        assert prod == n


class TestPolyFactoring:
    def test_u2_plus_1_splits_mod_5(self):
        # u^2 + 1 = (u+2)(u+3) over F_5 (since 2*3 = 6 = 1 and 2+3 = 5 = 0)
        f = Poly(F5, [1, 0, 1])
        assert factor_monic_poly(f) == {
            Poly(F5, [2, 1]): 1,
            Poly(F5, [3, 1]): 1,
        }

    def test_irreducible_quadratic(self):
        # u^2 + 2 has no root mod 5 (squares are 0,1,4; -2 = 3 is not one)
        assert is_irreducible(Poly(F5, [2, 0, 1]))
        assert factor_monic_poly(Poly(F5, [2, 0, 1])) == {Poly(F5, [2, 0, 1]): 1}

    def test_reducible_quadratic(self):
        assert not is_irreducible(Poly(F5, [4, 0, 1]))  # (u+1)(u+4)

    def test_repeated_factor(self):
        f = Poly(F5, [2, 1]) ** 3 * Poly(F5, [2, 0, 1])
        assert factor_monic_poly(f) == {
            Poly(F5, [2, 1]): 3,
            Poly(F5, [2, 0, 1]): 1,
        }

    @given(st.lists(st.integers(0, 4), min_size=0, max_size=6))
    def test_factors_multiply_back(self, tail):
        f = Poly(F5, tail + [1])
        factors = factor_monic_poly(f)
        prod = Poly.one(F5)
        for pi, e in factors.items():
            assert pi.is_monic() and is_irreducible(pi)
            prod = prod * pi ** e
        assert prod == f


class TestPlaceConstructors:
    def test_finite_prime_rejects_composite(self):
        with pytest.raises(ZeroInputError):
            Place.finite_prime(6)

    def test_irreducible_place_rejects_composite_poly(self):
        with pytest.raises(ZeroInputError):
            Place.irreducible_place(K5, Poly(F5, [4, 0, 1]))

    def test_degrees(self):
        assert Place.finite_prime(7).degree == 1
        assert Place.irreducible_place(K5, Poly(F5, [2, 0, 1])).degree == 2
        assert Place.degree_place(K5).degree == 1

    def test_labels(self):
        assert Place.archimedean().label() == "inf"
        assert Place.finite_prime(3).label() == "p=3"
        assert Place.degree_place(K5).label() == "deg"


class TestLocalValues:
    def test_prime_place_values(self):
        v3 = Place.finite_prime(3)
        lv = local_value(v3, Fraction(18, 5))
        assert lv.order == 2 and lv.value == Fraction(1, 9)
        lv = local_value(v3, Fraction(5, 3))
        assert lv.order == -1 and lv.value == 3

    def test_archimedean(self):
        lv = local_value(Place.archimedean(), Fraction(-7, 2))
        assert lv.value == Fraction(7, 2) and lv.order is None

    def test_zero_rejected(self):
        with pytest.raises(ZeroInputError):
            local_value(Place.archimedean(), 0)

    def test_function_field_values_in_degree_units(self):
        x = RatFunc(Poly(F5, [0, 0, 1]), Poly(F5, [1, 1]))  # u^2/(u+1)
        at_u = local_value(Place.irreducible_place(K5, Poly(F5, [0, 1])), x)
        assert at_u.order == 2 and at_u.value == -2
        at_u1 = local_value(Place.irreducible_place(K5, Poly(F5, [1, 1])), x)
        assert at_u1.order == -1 and at_u1.value == 1
        at_inf = local_value(Place.degree_place(K5), x)
        assert at_inf.order == -1 and at_inf.value == 1

    def test_higher_degree_place_weighted(self):
        pi = Poly(F5, [2, 0, 1])  # irreducible of degree 2
        x = RatFunc(pi) ** 3
        lv = local_value(Place.irreducible_place(K5, pi), x)
        assert lv.order == 3 and lv.value == -6

    @given(st.fractions(min_value=-300, max_value=300, max_denominator=300)
           .filter(lambda x: x != 0),
           st.fractions(min_value=-300, max_value=300, max_denominator=300)
           .filter(lambda x: x != 0))
    def test_multiplicative_at_p(self, x, y):
        v = Place.finite_prime(3)
        assert local_value(v, x * y).value == \
            local_value(v, x).value * local_value(v, y).value

    @given(st.fractions(min_value=-99, max_value=99, max_denominator=99)
           .filter(lambda x: x != 0),
           st.fractions(min_value=-99, max_value=99, max_denominator=99)
           .filter(lambda x: x != 0))
    def test_ultrametric(self, x, y):
        if x + y == 0:
            return
        v = Place.finite_prime(2)
        assert local_value(v, x + y).order >= min(
            local_value(v, x).order, local_value(v, y).order)


poly_f5_nonzero = st.lists(st.integers(0, 4), max_size=5).map(
    lambda cs: Poly(F5, cs)).filter(lambda f: not f.is_zero())


class TestSupport:
    def test_support_of_rational(self):
        lvs = support(QQ, Fraction(-6, 35))
        assert [(lv.place.prime, lv.order) for lv in lvs] == [
            (2, 1), (3, 1), (5, -1), (7, -1)]

    def test_support_reconstructs_function(self):
        x = RatFunc(Poly(F5, [0, 0, 2]), Poly(F5, [1, 1]))  # 2u^2/(u+1)
        lvs = support(K5, x)
        num = Poly.one(F5)
        den = Poly.one(F5)
        for lv in lvs:
            if lv.place.kind == "irreducible":
                if lv.order > 0:
                    num = num * lv.place.poly ** lv.order
                else:
                    den = den * lv.place.poly ** (-lv.order)
        assert num == x.num.monic() and den == x.den

    def test_unit_has_empty_support(self):
        assert support(QQ, Fraction(-1)) == []
        assert support(K5, RatFunc.constant(F5, 3)) == []


class TestProductFormula:
    def test_six(self):
        # |6| * |6|_2 * |6|_3 = 6 * 1/2 * 1/3 = 1
        assert verify_product_formula(QQ, Fraction(6)) == 1

    def test_rational_spot(self):
        assert verify_product_formula(QQ, Fraction(-84, 55)) == 1

    def test_function_field_spot(self):
        x = RatFunc(Poly(F5, [0, 0, 1]), Poly(F5, [1, 1]))
        assert verify_product_formula(K5, x) == 0

    @given(st.fractions(min_value=-5000, max_value=5000, max_denominator=5000)
           .filter(lambda x: x != 0))
    def test_rational_random(self, x):
        assert verify_product_formula(QQ, x) == 1

    @given(poly_f5_nonzero, poly_f5_nonzero)
    def test_function_field_random(self, n, d):
        assert verify_product_formula(K5, RatFunc(n, d)) == 0
