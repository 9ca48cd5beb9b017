"""Factored divisor bookkeeping against a brute-force membership oracle.

The oracle at the bottom decides ``b * f in k[t]`` by actual polynomial
division (no exponent bookkeeping), which is what denominator_support's
claim is tested against.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightlab.divisors import (
    FormRegistry,
    chart_polys,
    denominator_support,
    is_effective,
    split_effective,
)
from heightlab.errors import FieldMismatchError, ZeroInputError
from heightlab.exact_arith import GF, QQ, Poly

F5 = GF(5)

X0 = ((1, (1, 0)),)
X1 = ((1, (0, 1)),)
QUAD = ((1, (2, 0)), (1, (0, 2)))          # x0^2 + x1^2
LIN = ((1, (1, 0)), (-2, (0, 1)))          # x0 - 2 x1


def p1_registry(field=QQ):
    reg = FormRegistry(field, 1)
    reg.register("x0", X0)
    reg.register("x1", X1)
    reg.register("quad", QUAD)
    reg.register("lin", LIN)
    return reg


class TestRegistry:
    def test_rejects_common_factor_p1(self):
        reg = FormRegistry(QQ, 1)
        reg.register("x0", X0)
        with pytest.raises(ZeroInputError):
            reg.register("x0sq", ((1, (2, 0)),))

    def test_rejects_shared_x1_power(self):
        reg = FormRegistry(QQ, 1)
        reg.register("a", ((1, (1, 1)),))      # x0 x1
        with pytest.raises(ZeroInputError):
            reg.register("b", ((1, (0, 2)),))  # x1^2

    def test_rejects_nonhomogeneous_and_units(self):
        reg = FormRegistry(QQ, 1)
        with pytest.raises(ZeroInputError):
            reg.register("bad", ((1, (1, 0)), (1, (0, 2))))
        with pytest.raises(ZeroInputError):
            reg.register("unit", ((3, (0, 0)),))
        with pytest.raises(ZeroInputError):
            reg.register("zero", ((0, (1, 0)),))

    def test_merges_duplicate_terms(self):
        reg = FormRegistry(F5, 1)
        form = reg.register("f", ((2, (1, 0)), (4, (1, 0)), (1, (0, 1))))
        assert form.terms == ((1, (0, 1)), (1, (1, 0)))  # 2+4 = 6 = 1 mod 5

    def test_p2_needs_assertion(self):
        reg = FormRegistry(QQ, 2)
        reg.register("x", ((1, (1, 0, 0)),))
        with pytest.raises(ZeroInputError):
            reg.register("y", ((1, (0, 1, 0)),))
        reg.register("y", ((1, (0, 1, 0)),), assert_coprime=True)
        assert ("x", "y") in reg.asserted_pairs

    def test_p2_detects_proportional(self):
        reg = FormRegistry(QQ, 2)
        reg.register("c", ((1, (1, 1, 0)), (2, (0, 0, 2))))
        with pytest.raises(ZeroInputError):
            reg.register("c2", ((3, (1, 1, 0)), (6, (0, 0, 2))),
                         assert_coprime=True)

    def test_coprime_verification_over_f5(self):
        reg = FormRegistry(F5, 1)
        reg.register("a", ((1, (1, 0)), (2, (0, 1))))   # x0 + 2 x1
        with pytest.raises(ZeroInputError):
            # 3 x0 + 6 x1 = 3 (x0 + 2 x1) mod 5
            reg.register("b", ((3, (1, 0)), (1, (0, 1))))


class TestDivisorAlgebra:
    def test_zero_multiplicities_dropped(self):
        reg = p1_registry()
        d = reg.divisor({"x0": 0, "x1": 2})
        assert d.items == (("x1", 2),)
        assert reg.divisor({}).is_zero()

    def test_degree(self):
        reg = p1_registry()
        assert reg.divisor({"quad": 2, "x0": -1}).degree == 3

    def test_group_laws(self):
        reg = p1_registry()
        a = reg.divisor({"x0": 2, "quad": -1})
        b = reg.divisor({"x0": -2, "x1": 5})
        assert a + b == reg.divisor({"x1": 5, "quad": -1})
        assert a - a == reg.zero_divisor()
        assert -a == reg.divisor({"x0": -2, "quad": 1})
        assert a.scale(3) == reg.divisor({"x0": 6, "quad": -3})

    def test_registry_mismatch(self):
        a = p1_registry().divisor({"x0": 1})
        b = p1_registry().divisor({"x0": 1})
        with pytest.raises(FieldMismatchError):
            a + b

    def test_text(self):
        reg = p1_registry()
        assert reg.divisor({"x0": 2, "quad": -1}).to_text() == \
            "-1*[quad] + 2*[x0]"


mult_strategy = st.dictionaries(
    st.sampled_from(["x0", "x1", "quad", "lin"]),
    st.integers(-4, 4), max_size=4)


class TestSplitAndSupport:
    def test_split_spot(self):
        reg = p1_registry()
        d = reg.divisor({"x0": 2, "quad": -1, "x1": -3})
        c, e = split_effective(d)
        assert c == reg.divisor({"x0": 2})
        assert e == reg.divisor({"quad": 1, "x1": 3})
        assert is_effective(c) and is_effective(e)
        assert c - e == d
        assert not set(c.support()) & set(e.support())
        assert denominator_support(d) == e

    def test_effective_divisor_has_no_denominator(self):
        reg = p1_registry()
        d = reg.divisor({"x0": 1, "quad": 2})
        assert is_effective(d)
        assert denominator_support(d).is_zero()

    @given(mult_strategy)
    @settings(max_examples=60)
    def test_split_properties(self, mults):
        reg = p1_registry()
        d = reg.divisor(mults)
        c, e = split_effective(d)
        assert is_effective(c) and is_effective(e)
        assert c - e == d
        assert not set(c.support()) & set(e.support())
        assert is_effective(d) == e.is_zero()


class TestChartOracle:
    def oracle_requires(self, poly_b, num, den):
        """b*f is regular iff den | b*num, decided by actual division."""
        return (poly_b * num % den).is_zero()

    def test_chart_polys_spot(self):
        reg = p1_registry()
        d = reg.divisor({"x0": 2, "quad": -1})
        num, den = chart_polys(d, 1)
        assert num == Poly(QQ, [0, 0, 1])       # t^2
        assert den == Poly(QQ, [1, 0, 1])       # t^2 + 1

    def test_chart_unit_drops_out(self):
        reg = p1_registry()
        num, den = chart_polys(reg.divisor({"x1": 5, "x0": 1}), 1)
        assert num == Poly(QQ, [0, 1]) and den == Poly.one(QQ)

    @given(mult_strategy, st.lists(st.integers(-3, 3), min_size=0, max_size=6))
    @settings(max_examples=60)
    def test_denominator_support_matches_oracle(self, mults, b_tail):
        reg = p1_registry()
        d = reg.divisor(mults)
        num, den = chart_polys(d, 1)
        e_num, e_den = chart_polys(denominator_support(d), 1)
        assert e_den == Poly.one(QQ)  # the denominator divisor is effective
        b = Poly(QQ, b_tail + [1])
        # b is a denominator for d's local equation iff E's equation divides b
        assert self.oracle_requires(b, num, den) == (b % e_num).is_zero()
