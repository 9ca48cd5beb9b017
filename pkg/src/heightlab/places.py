"""Places and local values for the two product-formula fields.

Over Q the places are the archimedean absolute value and one place per prime
p, with ``|x|_p = p^(-ord_p x)`` kept as an exact ``Fraction``.  The product
formula states ``prod_v |x|_v = 1`` for nonzero x, and the product here is
computed exactly, so the residual is the fraction 1 — not approximately 1.

Over F_p(u) the places are the monic irreducible polynomials pi (with degree
``deg pi``) and the degree place at infinity (degree 1, ``ord_inf x =
-deg x``).  Local values are kept *additively* in integer degree units:
``value_v(x) = -ord_v(x) * deg(v)``, i.e. ``log_p |x|_v`` without the log p
factor.  The product formula becomes the exact integer identity
``sum_v value_v(x) = 0``.

Factoring is honest desk-scale trial division with explicit caps:

* integers: divisors up to 10^6 are tried; a residual above 10^12 that is
  still composite-or-unknown raises :class:`FactorizationError` rather than
  silently pretending (a residual <= 10^12 with no divisor below 10^6 is
  certified prime, since a composite would exceed (10^6)^2).
* polynomials over F_p: monic divisors are enumerated in lexicographic order
  by increasing degree; composite candidates can never divide because their
  smaller irreducible factors were already stripped.  Enumeration stops with
  :class:`FactorizationError` if p^d exceeds the cap for a needed degree d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _itproduct
from typing import Union

from .errors import (
    FactorizationError,
    FieldMismatchError,
    ZeroInputError,
)
from .exact_arith import (
    BaseField,
    FunctionField,
    Poly,
    QQ,
    RatFunc,
    Rationals,
)

TRIAL_DIVISION_CAP = 10 ** 6
PRIME_CERTIFICATE_CAP = TRIAL_DIVISION_CAP ** 2
POLY_ENUMERATION_CAP = 10 ** 6

ARCHIMEDEAN = "archimedean"
PRIME = "prime"
IRREDUCIBLE = "irreducible"
DEGREE = "degree"


# ---------------------------------------------------------------------------
# factoring helpers
# ---------------------------------------------------------------------------

def factor_positive_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division (capped).

    Raises :class:`FactorizationError` when the unfactored residual cannot
    be certified prime within the cap.
    """
    if n < 1:
        raise ZeroInputError(f"expected a positive integer, got {n}")
    out: dict[int, int] = {}
    rem = n
    for small in (2, 3):
        while rem % small == 0:
            out[small] = out.get(small, 0) + 1
            rem //= small
    f = 5
    while f * f <= rem and f <= TRIAL_DIVISION_CAP:
        for cand in (f, f + 2):
            while rem % cand == 0:
                out[cand] = out.get(cand, 0) + 1
                rem //= cand
        f += 6
    if rem > 1:
        if rem > PRIME_CERTIFICATE_CAP:
            raise FactorizationError(
                f"residual {rem} exceeds the trial-division certificate cap")
        # no divisor <= 10^6 and rem <= 10^12 => rem is prime
        out[rem] = out.get(rem, 0) + 1
    return out


def _monic_polys_of_degree(field, d: int):
    """All monic degree-d polynomials over F_p, lexicographic in coefficients."""
    p = field.p
    for tail in _itproduct(range(p), repeat=d):
        yield Poly._raw(field, tuple(tail) + (1,))


def is_irreducible(f: Poly) -> bool:
    """Irreducibility over F_p via capped trial division by monic divisors."""
    p = f.field.p
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    half = f.degree // 2  # >= 1 here, so the cap also covers the root scan
    if p ** half > POLY_ENUMERATION_CAP:
        raise FactorizationError(
            f"irreducibility check needs {p}^{half} trial divisors (over the cap)")
    for a in range(p):
        if f.evaluate(a) == 0:
            return False
    for d in range(2, half + 1):
        for g in _monic_polys_of_degree(f.field, d):
            if (f % g).is_zero():
                return False
    return True


def factor_monic_poly(f: Poly) -> dict[Poly, int]:
    """Factor a monic polynomial over F_p into monic irreducibles (capped).

    Trial division by monic polynomials in increasing degree; since every
    composite candidate has an irreducible factor of strictly smaller degree
    that was already divided out, only irreducible divisors succeed.
    """
    if not f.is_monic():
        raise ZeroInputError(f"expected a monic polynomial, got {f!r}")
    p = f.field.p
    out: dict[Poly, int] = {}
    rem = f
    if rem.degree >= 1 and p > POLY_ENUMERATION_CAP:
        raise FactorizationError(
            f"root scan over F_{p} exceeds the enumeration cap")
    # linear factors via root scan (cheap, and p can be largish)
    for a in range(p):
        if rem.degree < 1:
            break
        lin = Poly(f.field, [-a, 1])
        while rem.degree >= 1 and rem.evaluate(a) == 0:
            rem = rem.exact_div(lin)
            out[lin] = out.get(lin, 0) + 1
    d = 2
    while 2 * d <= rem.degree:
        if p ** d > POLY_ENUMERATION_CAP:
            raise FactorizationError(
                f"factoring needs {p}^{d} trial divisors (over the cap)")
        for g in _monic_polys_of_degree(f.field, d):
            while 2 * d <= rem.degree and (rem % g).is_zero():
                rem = rem.exact_div(g)
                out[g] = out.get(g, 0) + 1
            if rem.degree < 2 * d:
                break
        d += 1
    if rem.degree >= 1:
        out[rem] = out.get(rem, 0) + 1
    return out


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of Q or of F_p(u).

    ``kind`` is one of ``archimedean`` / ``prime`` (over Q) and
    ``irreducible`` / ``degree`` (over F_p(u)).  Finite data lives in
    ``prime`` (an int) or ``poly`` (a monic irreducible ``Poly``).
    Constructors certify their data (primality / irreducibility).
    """

    kind: str
    field: BaseField
    prime: int | None = None
    poly: Poly | None = None

    @staticmethod
    def archimedean() -> "Place":
        return Place(ARCHIMEDEAN, QQ)

    @staticmethod
    def finite_prime(p: int) -> "Place":
        if p < 2 or factor_positive_int(p) != {p: 1}:
            raise ZeroInputError(f"{p} is not prime")
        return Place(PRIME, QQ, prime=p)

    @staticmethod
    def irreducible_place(field: FunctionField, poly: Poly) -> "Place":
        if poly.field != field.coeff_field:
            raise FieldMismatchError(
                f"polynomial over {poly.field!r}, field is {field!r}")
        if not poly.is_monic() or not is_irreducible(poly):
            raise ZeroInputError(f"{poly!r} is not monic irreducible")
        return Place(IRREDUCIBLE, field, poly=poly)

    @staticmethod
    def degree_place(field: FunctionField) -> "Place":
        return Place(DEGREE, field)

    @property
    def degree(self) -> int:
        """Degree of the place (1 except for irreducibles of higher degree)."""
        if self.kind == IRREDUCIBLE:
            return self.poly.degree
        return 1

    def sort_key(self):
        if self.kind == ARCHIMEDEAN:
            return (0, 0, ())
        if self.kind == PRIME:
            return (1, self.prime, ())
        if self.kind == IRREDUCIBLE:
            return (1, self.poly.degree, self.poly.coeffs)
        return (2, 0, ())  # degree place sorts last

    def label(self) -> str:
        """Stable text form used in reports."""
        if self.kind == ARCHIMEDEAN:
            return "inf"
        if self.kind == PRIME:
            return f"p={self.prime}"
        if self.kind == IRREDUCIBLE:
            return f"pi={self.poly.to_text('u')}"
        return "deg"

    def __repr__(self) -> str:
        return f"Place({self.label()})"


@dataclass(frozen=True)
class LocalValue:
    """The exact local datum of a nonzero element at one place.

    Over Q, ``value`` is the absolute value ``|x|_v`` as a ``Fraction``
    (archimedean included).  Over F_p(u), ``value`` is the additive integer
    ``-ord_v(x) * deg(v)`` in degree units.  ``order`` is the valuation
    ``ord_v(x)`` where one exists (``None`` at the archimedean place).
    """

    place: Place
    value: Union[Fraction, int]
    order: int | None


def _ord_prime(x: Fraction, p: int) -> int:
    ord_ = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        ord_ += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        ord_ -= 1
    return ord_


def _ord_poly(x: RatFunc, pi: Poly) -> int:
    ord_ = 0
    n = x.num
    while n.degree >= pi.degree:
        q, r = divmod(n, pi)
        if not r.is_zero():
            break
        n = q
        ord_ += 1
    d = x.den
    while d.degree >= pi.degree:
        q, r = divmod(d, pi)
        if not r.is_zero():
            break
        d = q
        ord_ -= 1
    return ord_


def local_value(place: Place, x) -> LocalValue:
    """Exact local value of a nonzero field element at ``place``."""
    if isinstance(place.field, Rationals):
        x = QQ.coerce(x)
        if not x:
            raise ZeroInputError("local value of 0 is undefined")
        if place.kind == ARCHIMEDEAN:
            return LocalValue(place, abs(x), None)
        ord_ = _ord_prime(x, place.prime)
        value = (Fraction(1, place.prime ** ord_) if ord_ >= 0
                 else Fraction(place.prime ** (-ord_)))
        return LocalValue(place, value, ord_)
    field = place.field
    x = field.coerce(x)
    if x.is_zero():
        raise ZeroInputError("local value of 0 is undefined")
    if place.kind == DEGREE:
        ord_ = -x.degree()
        return LocalValue(place, -ord_, ord_)
    ord_ = _ord_poly(x, place.poly)
    return LocalValue(place, -ord_ * place.degree, ord_)


def support(field: BaseField, x) -> list[LocalValue]:
    """All places where a nonzero element has nonzero valuation, sorted.

    Over Q these are the primes dividing numerator or denominator; over
    F_p(u) the irreducible factors of numerator and denominator plus the
    degree place when ``deg x != 0``.
    """
    if isinstance(field, Rationals):
        x = QQ.coerce(x)
        if not x:
            raise ZeroInputError("support of 0 is undefined")
        ords: dict[int, int] = {}
        for p, e in factor_positive_int(abs(x.numerator)).items():
            ords[p] = ords.get(p, 0) + e
        for p, e in factor_positive_int(x.denominator).items():
            ords[p] = ords.get(p, 0) - e
        out = []
        for p in sorted(ords):
            if ords[p]:
                out.append(local_value(Place(PRIME, QQ, prime=p), x))
        return out
    x = field.coerce(x)
    if x.is_zero():
        raise ZeroInputError("support of 0 is undefined")
    ords: dict[Poly, int] = {}
    for pi, e in factor_monic_poly(x.num.monic()).items():
        ords[pi] = ords.get(pi, 0) + e
    for pi, e in factor_monic_poly(x.den).items():  # den already monic
        ords[pi] = ords.get(pi, 0) - e
    places = [Place(IRREDUCIBLE, field, poly=pi) for pi, e in ords.items() if e]
    places.sort(key=Place.sort_key)
    out = [LocalValue(pl, -ords[pl.poly] * pl.degree, ords[pl.poly])
           for pl in places]
    if x.degree() != 0:
        out.append(local_value(Place.degree_place(field), x))
    return out


def verify_product_formula(field: BaseField, x):
    """Exact product-formula residual of a nonzero element.

    Over Q: ``prod_v |x|_v`` over the support plus the archimedean place,
    as a ``Fraction`` (must equal 1).  Over F_p(u): ``sum_v -ord_v(x) deg v``
    over the support including the degree place, as an int (must equal 0).
    """
    if isinstance(field, Rationals):
        residual = local_value(Place.archimedean(), x).value
        for lv in support(field, x):
            residual *= lv.value
        return residual
    return sum(lv.value for lv in support(field, x))
