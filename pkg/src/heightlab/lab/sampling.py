"""Deterministic sampling for experiment runs.

Everything downstream of a seed is reproducible: the PRNG is SplitMix64
(identifier ``"splitmix64"`` in report headers), and samplers draw through
it exclusively — no ``random`` module, no hashing of object ids.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ConfigError
from ..exact_arith import BaseField, Poly, RatFunc, Rationals
from ..heights import ProjPoint, normalize_point

PRNG_ID = "splitmix64"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """64-bit SplitMix generator (Steele-Lea-Flood finalizer constants).

    Small state, full 64-bit output, and a cheap `split` for carving
    independent streams out of one seed so sub-experiments stay
    order-independent.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], endpoints included."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.below(hi - lo + 1)

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


def sample_parameter(rng: SplitMix64, field: BaseField, bound: int,
                     integral: bool = False):
    """One base-field element of height at most ``bound``.

    Over Q: a/b with |a| <= bound, 1 <= b <= bound.  Over F_p(u): a ratio
    of random polynomials of degree <= bound (denominator monic).  With
    ``integral`` the denominator is 1 — an integer resp. a polynomial.
    """
    if bound < 1:
        raise ConfigError("height bound must be >= 1")
    if isinstance(field, Rationals):
        den = 1 if integral else rng.randint(1, bound)
        return Fraction(rng.randint(-bound, bound), den)
    p = field.p
    num_deg = rng.below(bound + 1)
    num = Poly(field.coeff_field, [rng.below(p) for _ in range(num_deg + 1)])
    if integral:
        return RatFunc(num)
    den_deg = rng.below(bound + 1)
    den_coeffs = [rng.below(p) for _ in range(den_deg)] + [1]
    den = Poly(field.coeff_field, den_coeffs)
    return RatFunc(num, den)


def sample_fiber(rng: SplitMix64, family, bound: int, max_tries: int = 500,
                 integral: bool = False):
    """A parameter value whose fiber is a genuine elliptic curve.

    Rejects singular fibers and coefficient poles; gives up with
    ConfigError after ``max_tries`` draws (a sign the bound is so small
    that the bad fibers exhaust the sample space).
    """
    for _ in range(max_tries):
        s = sample_parameter(rng, family.field, bound, integral=integral)
        if family.fiber_check(s).ok:
            return s
    raise ConfigError(
        f"no nonsingular fiber found in {max_tries} draws at height bound "
        f"{bound}")


def sample_proj_point(rng: SplitMix64, field: BaseField, dim: int,
                      bound: int) -> ProjPoint:
    """A normalized point of P^dim with coordinates of size <= bound
    (integers |c| <= bound over Q, polynomial degrees <= bound over F_p(u))."""
    while True:
        if isinstance(field, Rationals):
            coords = [Fraction(rng.randint(-bound, bound))
                      for _ in range(dim + 1)]
        else:
            p = field.p
            coords = []
            for _ in range(dim + 1):
                deg = rng.below(bound + 1)
                poly = Poly(field.coeff_field,
                            [rng.below(p) for _ in range(deg + 1)])
                coords.append(RatFunc(poly, Poly.one(field.coeff_field)))
        if any(not _is_zero_coord(c) for c in coords):
            return normalize_point(field, coords)


def _is_zero_coord(c) -> bool:
    if isinstance(c, Fraction):
        return c == 0
    return c.is_zero()
