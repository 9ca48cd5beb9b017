"""Exact arithmetic substrate: rationals, dense univariate polynomials, and
rational functions over Q or a prime field F_p (p >= 5).

Everything in this module is exact.  No floats enter any computation; callers
convert to floats only when they *report* a value.

Representations
---------------
``BigRat``
    Alias of :class:`fractions.Fraction`: arbitrary-precision rationals that
    are always stored reduced with positive denominator, compare exactly and
    hash consistently with their value.

``Poly``
    Immutable dense univariate polynomial.  Coefficients are ``Fraction``
    over Q or plain ints in ``[0, p)`` over F_p, stored low degree first with
    trailing zeros stripped (the zero polynomial has an empty coefficient
    tuple and degree -1).

``RatFunc``
    Reduced fraction of two ``Poly`` with gcd(num, den) = 1 and *monic*
    denominator, so equal functions have identical representations and
    structural equality is semantic equality.

gcds
----
Over F_p the gcd is the plain Euclidean algorithm.  Over Q we avoid
coefficient explosion with a fraction-free primitive polynomial remainder
sequence: strip each operand to a primitive integer polynomial, take
pseudo-remainders, re-primitivize after every step, and make the result
monic at the very end.  Both return the monic gcd (or zero).

Performance
-----------
Doubling points on an elliptic family over F_p(u) squares coordinate degrees,
so polynomials with tens of thousands of coefficients appear after a few
doublings.  Pure-Python coefficient loops are far too slow there, hence two
kernels used transparently above a size cutoff:

* multiplication by Kronecker substitution: pack coefficients into a single
  big integer with a fixed byte width chosen so convolution sums cannot
  overlap, multiply with CPython's native big-int multiply, unpack, reduce
  mod p.  Exact by construction.
* division/gcd by vectorized synthetic division on int64 numpy arrays with
  deferred reduction mod p.  Intermediate entries are bounded by
  ``(steps+1) * (p-1)^2`` which stays far inside int64 for desk-scale p;
  the kernels refuse (and fall back to pure Python) if that bound could
  overflow.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import FieldMismatchError, ZeroInputError

BigRat = Fraction

# Cutoffs (in coefficient counts) above which the F_p numpy/Kronecker kernels
# take over from the schoolbook loops.  Chosen by quick benchmarking; both
# paths are exact, so the exact values only affect speed.
_MUL_KERNEL_CUTOFF = 32
_DIV_KERNEL_CUTOFF = 128

_INT64_SAFE = 2**62


def _is_prime(n: int) -> bool:
    """Trial-division primality check (adequate for desk-scale moduli)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


class Rationals:
    """The field Q.  Elements are ``Fraction``; also serves as a coefficient
    field for ``Poly``."""

    p = None  # characteristic 0 marker

    def coerce(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise FieldMismatchError(f"cannot coerce {value!r} into Q")

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Rationals)

    def __hash__(self) -> int:
        return hash("heightlab.QQ")

    def __repr__(self) -> str:
        return "QQ"


QQ = Rationals()


class PrimeField:
    """The prime field F_p for p >= 5 (char 2 and 3 are excluded because the
    short Weierstrass model needs them invertible)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 5 or not _is_prime(p):
            raise FieldMismatchError(f"modulus must be a prime >= 5, got {p!r}")
        self.p = p

    def coerce(self, value) -> int:
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroInputError(f"denominator of {value} vanishes mod {self.p}")
            return value.numerator * pow(den, -1, self.p) % self.p
        raise FieldMismatchError(f"cannot coerce {value!r} into F_{self.p}")

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("heightlab.GF", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    """Cached constructor for :class:`PrimeField` (primality checked once)."""
    return PrimeField(p)


CoeffField = Union[Rationals, PrimeField]


# ---------------------------------------------------------------------------
# F_p coefficient kernels (tuples/lists of ints in [0, p))
# ---------------------------------------------------------------------------

def _fp_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    """Product of two nonempty F_p coefficient sequences."""
    n, m = len(a), len(b)
    if min(n, m) <= _MUL_KERNEL_CUTOFF:
        out = [0] * (n + m - 1)
        if n > m:  # iterate over the shorter operand outside
            a, b, n, m = b, a, m, n
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return tuple(c % p for c in out)
    # Kronecker substitution.  Width w is chosen so each convolution sum
    # min(n, m) * (p-1)^2 fits in w bytes: digits of the big-int product in
    # base 256^w are then exactly the convolution sums, with no carries.
    width = ((min(n, m) * (p - 1) * (p - 1)).bit_length() + 7) // 8
    packed_a = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in a), "little")
    packed_b = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in b), "little")
    buf = (packed_a * packed_b).to_bytes(width * (n + m), "little")
    return tuple(
        int.from_bytes(buf[i * width:(i + 1) * width], "little") % p
        for i in range(n + m - 1)
    )


def _strip(coeffs: list[int]) -> list[int]:
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _fp_divmod(a: Sequence[int], b: Sequence[int], p: int
               ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Quotient and remainder of F_p coefficient sequences (b nonzero)."""
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return (), tuple(a)
    ilc = pow(b[-1], -1, p)
    steps = da - db + 1
    use_numpy = (
        db >= 1
        and steps * db > _DIV_KERNEL_CUTOFF ** 2
        and (steps + 1) * (p - 1) * (p - 1) < _INT64_SAFE
    )
    if use_numpy:
        rem = np.array(a, dtype=np.int64)
        monic = (np.array(b, dtype=np.int64) * ilc) % p
        head = monic[:db]
        quo = [0] * steps
        for i in range(steps - 1, -1, -1):
            c = int(rem[i + db]) % p
            if c:
                quo[i] = c
                rem[i:i + db] -= c * head
        remainder = _strip([int(x) % p for x in rem[:db]])
    else:
        rem = list(a)
        monic = [(c * ilc) % p for c in b]
        quo = [0] * steps
        for i in range(steps - 1, -1, -1):
            c = rem[i + db] % p
            if c:
                quo[i] = c
                for j in range(db):
                    if monic[j]:
                        rem[i + j] -= c * monic[j]
        remainder = _strip([c % p for c in rem[:db]])
    # a = q' * monic + r with monic = b * ilc, hence q = q' * ilc against b.
    return tuple((c * ilc) % p for c in quo), tuple(remainder)


def _fp_gcd(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    """Monic gcd over F_p; Euclid with the same kernel split as division."""
    big = max(len(a), len(b))
    if big > _DIV_KERNEL_CUTOFF and (big + 1) * (p - 1) * (p - 1) < _INT64_SAFE:
        ra = np.array(a, dtype=np.int64)
        rb = np.array(b, dtype=np.int64)
        while rb.size:
            db = rb.size - 1
            if ra.size - 1 >= db:
                ilc = pow(int(rb[-1]), -1, p)
                head = (rb[:db] * ilc) % p
                for i in range(ra.size - 1 - db, -1, -1):
                    c = int(ra[i + db]) % p
                    if c:
                        ra[i:i + db] -= c * head
                ra = ra[:db] % p
                nz = np.nonzero(ra)[0]
                ra = ra[: nz[-1] + 1] if nz.size else ra[:0]
            ra, rb = rb, ra
        g = [int(c) for c in ra]
    else:
        ga, gb = list(a), list(b)
        while gb:
            _, r = _fp_divmod(ga, gb, p)
            ga, gb = gb, list(r)
        g = ga
    if not g:
        return ()
    ilc = pow(g[-1], -1, p)
    return tuple((c * ilc) % p for c in g)


# ---------------------------------------------------------------------------
# Q coefficient kernels (primitive PRS on integer sequences)
# ---------------------------------------------------------------------------

def _q_primitive(coeffs: Sequence[Fraction]) -> list[int]:
    """Primitive integer polynomial (positive leading coefficient) that is a
    Q-multiple of ``coeffs`` (nonzero input)."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def _int_pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer polynomials, deg a >= deg b >= 0."""
    da, db = len(a) - 1, len(b) - 1
    rem = list(a)
    lead = b[-1]
    for i in range(da - db, -1, -1):
        c = rem[i + db]
        if c:
            for k in range(i + db):
                rem[k] *= lead
            for j in range(db):
                rem[i + j] -= c * b[j]
        rem[i + db] = 0
    return _strip(rem[:db])


def _q_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Monic gcd over Q via a primitive polynomial remainder sequence."""
    pa, pb = _q_primitive(a), _q_primitive(b)
    if len(pa) < len(pb):
        pa, pb = pb, pa
    while pb:
        r = _int_pseudo_rem(pa, pb)
        if r:
            g = 0
            for c in r:
                g = math.gcd(g, c)
            if r[-1] < 0:
                g = -g
            r = [c // g for c in r]
        pa, pb = pb, r
    lead = Fraction(pa[-1])
    return tuple(Fraction(c) / lead for c in pa)


# ---------------------------------------------------------------------------
# Poly
# ---------------------------------------------------------------------------

class Poly:
    """Immutable dense univariate polynomial over Q or F_p.

    Coefficients are stored low degree first with trailing zeros stripped;
    ``Poly(field, ())`` is the zero polynomial (degree -1 by convention).
    Arithmetic never mixes coefficient fields: that raises
    :class:`FieldMismatchError` rather than guessing a coercion.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: CoeffField, coeffs: Iterable = ()):
        coerce = field.coerce
        cs = [coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, field: CoeffField, coeffs: tuple) -> "Poly":
        # internal: coefficients already coerced and stripped
        self = object.__new__(cls)
        self.field = field
        self.coeffs = coeffs
        return self

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field: CoeffField) -> "Poly":
        return cls._raw(field, ())

    @classmethod
    def one(cls, field: CoeffField) -> "Poly":
        return cls._raw(field, (field.one,))

    @classmethod
    def constant(cls, field: CoeffField, value) -> "Poly":
        c = field.coerce(value)
        return cls._raw(field, (c,) if c else ())

    @classmethod
    def variable(cls, field: CoeffField) -> "Poly":
        return cls._raw(field, (field.zero, field.one))

    # -- basic queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading_coefficient(self):
        if not self.coeffs:
            raise ZeroInputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant_value(self):
        """Value of a constant polynomial as a field element."""
        if len(self.coeffs) > 1:
            raise ValueError(f"{self!r} is not constant")
        return self.coeffs[0] if self.coeffs else self.field.zero

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            try:
                c = self.field.coerce(other)
            except FieldMismatchError:
                return NotImplemented
            return self.coeffs == ((c,) if c else ())
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.field != other.field:
            raise FieldMismatchError(
                f"mixed coefficient fields {self.field!r} and {other.field!r}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.field, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        p = getattr(self.field, "p", None)
        if p is None:
            out = [x + y for x, y in zip(a, b)]
        else:
            out = [(x + y) % p for x, y in zip(a, b)]
        out.extend(a[len(b):])
        return Poly._raw(self.field, tuple(_strip(out)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = getattr(self.field, "p", None)
        if p is None:
            return Poly._raw(self.field, tuple(-c for c in self.coeffs))
        return Poly._raw(self.field, tuple((-c) % p for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.field)
        p = getattr(self.field, "p", None)
        if p is not None:
            return Poly._raw(self.field, _fp_mul(a, b, p))
        if len(a) == 1:
            c = a[0]
            return Poly._raw(self.field, tuple(c * x for x in b))
        if len(b) == 1:
            c = b[0]
            return Poly._raw(self.field, tuple(c * x for x in a))
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Poly._raw(self.field, tuple(_strip(out)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a nonnegative int")
        result = Poly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def __divmod__(self, other) -> tuple["Poly", "Poly"]:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = getattr(self.field, "p", None)
        if p is not None:
            q, r = _fp_divmod(self.coeffs, other.coeffs, p)
            return Poly._raw(self.field, q), Poly._raw(self.field, r)
        a, b = list(self.coeffs), other.coeffs
        db = len(b) - 1
        if len(a) - 1 < db:
            return Poly.zero(self.field), self
        inv_lead = 1 / b[-1]
        quo = [Fraction(0)] * (len(a) - db)
        for i in range(len(a) - 1 - db, -1, -1):
            c = a[i + db] * inv_lead
            if c:
                quo[i] = c
                for j in range(db):
                    if b[j]:
                        a[i + j] -= c * b[j]
            a[i + db] = Fraction(0)
        return (Poly._raw(self.field, tuple(_strip(quo))),
                Poly._raw(self.field, tuple(_strip(a[:db]))))

    def __floordiv__(self, other) -> "Poly":
        out = divmod(self, other)
        return out[0] if out is not NotImplemented else NotImplemented

    def __mod__(self, other) -> "Poly":
        out = divmod(self, other)
        return out[1] if out is not NotImplemented else NotImplemented

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient self/other, raising if the division is not exact."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError(f"{other!r} does not divide {self!r}")
        return q

    def monic(self) -> "Poly":
        """Scalar multiple with leading coefficient 1 (zero stays zero)."""
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        if lead == self.field.one:
            return self
        p = getattr(self.field, "p", None)
        if p is None:
            return Poly._raw(self.field, tuple(c / lead for c in self.coeffs))
        ilc = pow(lead, -1, p)
        return Poly._raw(self.field, tuple((c * ilc) % p for c in self.coeffs))

    def derivative(self) -> "Poly":
        p = getattr(self.field, "p", None)
        if p is None:
            cs = tuple(i * c for i, c in enumerate(self.coeffs) if i)
        else:
            cs = tuple((i * c) % p for i, c in enumerate(self.coeffs) if i)
        return Poly(self.field, cs)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x):
        """Horner evaluation.

        Over F_p an ``int`` argument is reduced mod p and an int is returned.
        Otherwise the argument may be any value supporting field arithmetic
        with the coefficients (Fraction, Poly, RatFunc over the same field),
        and the result has the argument's type.
        """
        p = getattr(self.field, "p", None)
        if p is not None and isinstance(x, int):
            acc = 0
            for c in reversed(self.coeffs):
                acc = (acc * x + c) % p
            return acc
        if not self.coeffs:
            if isinstance(x, (RatFunc, Poly)):
                return RatFunc.zero_over(self.field) if isinstance(x, RatFunc) else Poly.zero(self.field)
            return self.field.zero
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    # -- rendering -----------------------------------------------------------

    def to_text(self, var: str = "u") -> str:
        """Human-readable form, highest degree first, e.g. ``u^2 + 3``."""
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                body = str(c)
            else:
                xpow = var if i == 1 else f"{var}^{i}"
                if c == self.field.one:
                    body = xpow
                elif c == -self.field.one and getattr(self.field, "p", None) is None:
                    body = f"-{xpow}"
                else:
                    body = f"{c}*{xpow}"
            parts.append(body)
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self.field!r}, {self.to_text()!r})"


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd of two polynomials over the same coefficient field.

    ``poly_gcd(0, 0) = 0``; otherwise the result is monic and divides both
    arguments exactly, and any common divisor divides it.
    """
    if f.field != g.field:
        raise FieldMismatchError(
            f"gcd operands over {f.field!r} and {g.field!r}")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    p = getattr(f.field, "p", None)
    if p is not None:
        return Poly._raw(f.field, _fp_gcd(f.coeffs, g.coeffs, p))
    return Poly._raw(f.field, _q_gcd(f.coeffs, g.coeffs))


# ---------------------------------------------------------------------------
# RatFunc
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced rational function num/den over Q or F_p.

    Canonical form: gcd(num, den) = 1 and den monic, enforced on every
    construction, so ``==`` on the (num, den) pair decides equality of
    functions.  The zero function is 0/1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one(num.field)
        normalized = ratfunc_normalize(num, den)
        self.num = normalized.num
        self.den = normalized.den

    @classmethod
    def _reduced(cls, num: Poly, den: Poly) -> "RatFunc":
        # internal: already coprime with monic denominator
        self = object.__new__(cls)
        self.num = num
        self.den = den
        return self

    @classmethod
    def zero_over(cls, field: CoeffField) -> "RatFunc":
        return cls._reduced(Poly.zero(field), Poly.one(field))

    @classmethod
    def one_over(cls, field: CoeffField) -> "RatFunc":
        return cls._reduced(Poly.one(field), Poly.one(field))

    @classmethod
    def variable(cls, field: CoeffField) -> "RatFunc":
        return cls._reduced(Poly.variable(field), Poly.one(field))

    @classmethod
    def constant(cls, field: CoeffField, value) -> "RatFunc":
        return cls._reduced(Poly.constant(field, value), Poly.one(field))

    @property
    def field(self) -> CoeffField:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self!r} is not constant")
        return self.num.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def degree(self) -> int:
        """deg num - deg den; raises on the zero function."""
        if self.is_zero():
            raise ZeroInputError("the zero function has no degree")
        return self.num.degree - self.den.degree

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"mixed fields {self.field!r} and {other.field!r}")
            return other
        if isinstance(other, Poly):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"mixed fields {self.field!r} and {other.field!r}")
            return RatFunc._reduced(other, Poly.one(self.field))
        if isinstance(other, (int, Fraction)):
            return RatFunc.constant(self.field, other)
        return NotImplemented

    def __add__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        num = self.num * other.den + other.num * self.den
        return ratfunc_normalize(num, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._reduced(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        # cross-reduce first so the expensive gcds run on smaller operands
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num if g1.is_constant() else self.num.exact_div(g1)
        d2 = other.den if g1.is_constant() else other.den.exact_div(g1)
        n2 = other.num if g2.is_constant() else other.num.exact_div(g2)
        d1 = self.den if g2.is_constant() else self.den.exact_div(g2)
        num, den = n1 * n2, d1 * d2
        if den.is_monic():
            return RatFunc._reduced(num, den)
        lead = den.leading_coefficient()
        return RatFunc._reduced(num * _inv_scalar(self.field, lead), den.monic())

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return self * RatFunc(other.den, other.num)

    def __rtruediv__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "RatFunc":
        if not isinstance(n, int):
            raise ValueError("exponent must be an int")
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of the zero function")
            return RatFunc(self.den, self.num) ** (-n)
        # coprime stays coprime under powers, monic den stays monic
        return RatFunc._reduced(self.num ** n, self.den ** n)

    def evaluate(self, x):
        """Value at a field element (Fraction over Q, RatFunc/int over F_p).

        Raises :class:`PoleError` when the denominator vanishes at ``x``.
        """
        from .errors import PoleError  # local to avoid cycle noise at import
        num_val = _eval_in_field(self.num, x)
        den_val = _eval_in_field(self.den, x)
        if not den_val:
            raise PoleError(f"evaluation at a pole of {self!r}")
        if isinstance(den_val, int):  # F_p scalar: divide via modular inverse
            return num_val * pow(den_val, -1, self.field.p) % self.field.p
        return num_val / den_val

    def to_text(self, var: str = "u") -> str:
        num = self.num.to_text(var)
        if self.den.is_constant():
            return num
        den = self.den.to_text(var)
        ntxt = num if ("+" not in num and "- " not in num) else f"({num})"
        dtxt = den if ("+" not in den and "- " not in den) else f"({den})"
        return f"{ntxt}/{dtxt}"

    def __repr__(self) -> str:
        return f"RatFunc({self.field!r}, {self.to_text()!r})"


def _inv_scalar(field: CoeffField, value):
    if getattr(field, "p", None) is None:
        return 1 / value
    return pow(value, -1, field.p)


def _eval_in_field(poly: Poly, x):
    """Horner evaluation returning a *field element* even for constants."""
    p = getattr(poly.field, "p", None)
    if isinstance(x, Fraction):
        if p is not None:
            raise FieldMismatchError("Fraction argument for an F_p polynomial")
        return poly.evaluate(x)  # Fraction in, Fraction out (zero poly included)
    if p is not None and isinstance(x, int):
        return poly.evaluate(x)  # modular Horner, int in [0, p)
    if isinstance(x, RatFunc):
        if x.field != poly.field:
            raise FieldMismatchError("argument over a different field")
        acc = RatFunc.zero_over(poly.field)
        for c in reversed(poly.coeffs):
            acc = acc * x + c
        return acc
    raise FieldMismatchError(f"cannot evaluate at {x!r}")


def ratfunc_normalize(num: Poly, den: Poly) -> RatFunc:
    """Canonical reduced form of num/den: coprime, monic denominator.

    Raises ``ZeroDivisionError`` when ``den`` is the zero polynomial.
    """
    if num.field != den.field:
        raise FieldMismatchError(
            f"numerator over {num.field!r}, denominator over {den.field!r}")
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return RatFunc._reduced(num, Poly.one(num.field))
    g = poly_gcd(num, den)
    if not g.is_constant():
        num, den = num.exact_div(g), den.exact_div(g)
    if not den.is_monic():
        lead = den.leading_coefficient()
        num = num * _inv_scalar(num.field, lead)
        den = den.monic()
    return RatFunc._reduced(num, den)


# ---------------------------------------------------------------------------
# Base fields (where points and fibers live): Q itself, or F_p(u)
# ---------------------------------------------------------------------------

class FunctionField:
    """The rational function field F_p(u), p >= 5.

    Elements are :class:`RatFunc` over ``GF(p)``; the displayed variable is
    ``u``.  Heights over this field are integers in degree units (multiples
    of log p on the absolute-value side); reports state that convention.
    """

    __slots__ = ("p",)

    def __init__(self, p: int):
        GF(p)  # validates p
        self.p = p

    @property
    def coeff_field(self) -> PrimeField:
        return GF(self.p)

    def coerce(self, value) -> RatFunc:
        if isinstance(value, RatFunc):
            if value.field != self.coeff_field:
                raise FieldMismatchError(
                    f"element over {value.field!r}, expected {self.coeff_field!r}")
            return value
        if isinstance(value, Poly):
            if value.field != self.coeff_field:
                raise FieldMismatchError(
                    f"element over {value.field!r}, expected {self.coeff_field!r}")
            return RatFunc._reduced(value, Poly.one(value.field))
        if isinstance(value, int):
            return RatFunc.constant(self.coeff_field, value)
        raise FieldMismatchError(f"cannot coerce {value!r} into F_{self.p}(u)")

    @property
    def zero(self) -> RatFunc:
        return RatFunc.zero_over(self.coeff_field)

    @property
    def one(self) -> RatFunc:
        return RatFunc.one_over(self.coeff_field)

    def __eq__(self, other) -> bool:
        return isinstance(other, FunctionField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("heightlab.FF", self.p))

    def __repr__(self) -> str:
        return f"F{self.p}(u)"


BaseField = Union[Rationals, FunctionField]


def base_field_label(field: BaseField) -> str:
    """Stable text label used in reports and file names: ``Q`` or ``F5(u)``."""
    if isinstance(field, Rationals):
        return "Q"
    return f"F{field.p}(u)"


def parse_base_field(label: str) -> BaseField:
    """Inverse of :func:`base_field_label`, also accepting ``Fp(u):5``."""
    text = label.strip()
    if text in ("Q", "QQ", "q"):
        return QQ
    if text.lower().startswith("fp(u):"):
        return FunctionField(int(text.split(":", 1)[1]))
    if text.startswith("F") and text.endswith("(u)"):
        return FunctionField(int(text[1:-3]))
    raise FieldMismatchError(
        f"unknown field label {label!r} (expected 'Q', 'F5(u)' or 'Fp(u):5')")
