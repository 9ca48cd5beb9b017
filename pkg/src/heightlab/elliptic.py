"""Short Weierstrass families y^2 = x^3 + a(s) x + b(s) parametrized by the
projective line, with the exact chord-tangent group law on smooth fibers.

The base field k is Q or F_p(u) (p >= 5, so 2 and 3 are invertible and the
short form is general enough).  The coefficients a, b are rational functions
of the parameter s with coefficients in Q resp. F_p; a fiber at s = s0 is
usable when neither coefficient has a pole there and the discriminant
``Delta(s0) = -16 (4 a^3 + 27 b^2)(s0)`` is nonzero.

Points are affine pairs (x, y) of base-field elements, or the identity O
(the point at infinity (0:1:0)).  Every constructed point — including every
group-law result — is checked exactly against the curve equation, so the
closure invariant is enforced by construction, and growth guards abort with
:class:`ResourceLimitError` before coordinates exceed about 10^6 digits
(or degree 10^6 over F_p(u)).

``embed`` sends a point to P^2 x P^1 via ((x : y : 1), (s : 1)) with O at
((0 : 1 : 0), (s : 1)); ``total_height`` is the multiprojective height of
that embedding (fiber height plus/times base height depending on the field's
height convention), ``fiber_height`` the fiber factor alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    FiberMismatchError,
    FieldMismatchError,
    NotOnCurveError,
    PoleError,
    ResourceLimitError,
    SingularFiberError,
    ZeroInputError,
)
from .exact_arith import (
    BaseField,
    FunctionField,
    Poly,
    QQ,
    RatFunc,
    Rationals,
    poly_gcd,
)
from .heights import (
    ExactHeight,
    MultiProjPoint,
    multiprojective_height,
    normalize_point,
    weil_height,
)

MAX_COORD_DIGITS = 10 ** 6
_MAX_COORD_BITS = int(MAX_COORD_DIGITS * math.log2(10)) + 1
MAX_COORD_DEGREE = 10 ** 6


def _coeff_function(field: BaseField, value) -> RatFunc:
    """Coerce a family coefficient into a rational function of the parameter."""
    if isinstance(field, Rationals):
        if isinstance(value, RatFunc):
            if value.field != QQ:
                raise FieldMismatchError(f"{value!r} is not over Q")
            return value
        if isinstance(value, Poly):
            return RatFunc(value)
        if isinstance(value, (int, Fraction)):
            return RatFunc.constant(QQ, value)
        raise FieldMismatchError(f"cannot use {value!r} as a coefficient over Q")
    if isinstance(value, RatFunc):
        if value.field != field.coeff_field:
            raise FieldMismatchError(f"{value!r} is not over F_{field.p}")
        return value
    if isinstance(value, (Poly, int)):
        return field.coerce(value)
    raise FieldMismatchError(
        f"cannot use {value!r} as a coefficient over F_{field.p}(u)")


def _guard_size(field: BaseField, value) -> None:
    if isinstance(field, Rationals):
        if value.numerator.bit_length() + value.denominator.bit_length() \
                > _MAX_COORD_BITS:
            raise ResourceLimitError(
                f"coordinate exceeds {MAX_COORD_DIGITS} digits")
    else:
        if value.num.degree + value.den.degree > MAX_COORD_DEGREE:
            raise ResourceLimitError(
                f"coordinate degree exceeds {MAX_COORD_DEGREE}")


@dataclass(frozen=True)
class FiberStatus:
    """Outcome of a fiber usability check."""

    ok: bool
    reason: str | None = None


class WeierstrassFamily:
    """The family y^2 = x^3 + a(s) x + b(s) with an optional marked section.

    ``section``, when given, is a pair of rational functions (x(s), y(s))
    satisfying the equation identically; it is verified symbolically at
    construction time.
    """

    def __init__(self, field: BaseField, a, b, section=None):
        self.field = field
        self.a = _coeff_function(field, a)
        self.b = _coeff_function(field, b)
        disc = self.a ** 3 * 4 + self.b ** 2 * 27
        if disc.is_zero():
            raise SingularFiberError(
                "discriminant vanishes identically: not an elliptic family")
        self._disc = disc * (-16)
        if section is not None:
            sx = _coeff_function(field, section[0])
            sy = _coeff_function(field, section[1])
            if sy * sy != sx ** 3 + self.a * sx + self.b:
                raise NotOnCurveError(
                    "declared section does not satisfy the family equation")
            self.section = (sx, sy)
        else:
            self.section = None
        self._fiber_cache: dict = {}

    def discriminant(self) -> RatFunc:
        """-16 (4 a^3 + 27 b^2) as a rational function of the parameter."""
        return self._disc

    def __eq__(self, other) -> bool:
        return isinstance(other, WeierstrassFamily) and \
            self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.field, self.a, self.b))

    def __repr__(self) -> str:
        var = "s"
        return (f"WeierstrassFamily(y^2 = x^3 + ({self.a.to_text(var)}) x"
                f" + ({self.b.to_text(var)}) over {self.field!r})")

    # -- fibers ------------------------------------------------------------

    def _coerce_parameter(self, s):
        if isinstance(self.field, Rationals):
            return QQ.coerce(s)
        return self.field.coerce(s)

    def _fiber_data(self, s):
        """(status, a(s), b(s)) with per-fiber memoization."""
        s = self._coerce_parameter(s)
        cached = self._fiber_cache.get(s)
        if cached is not None:
            return cached
        try:
            a_s = self.a.evaluate(s)
            b_s = self.b.evaluate(s)
        except PoleError:
            data = (FiberStatus(False, "coefficient has a pole"), None, None)
            self._fiber_cache[s] = data
            return data
        disc = 4 * a_s ** 3 + 27 * b_s ** 2
        if not disc:
            data = (FiberStatus(False, "discriminant vanishes"), a_s, b_s)
        else:
            data = (FiberStatus(True, None), a_s, b_s)
        self._fiber_cache[s] = data
        return data

    def fiber_check(self, s) -> FiberStatus:
        """Whether the fiber at s is a smooth curve with usable coefficients."""
        return self._fiber_data(s)[0]

    def coefficients_at(self, s):
        """(a(s), b(s)) on a usable fiber; raises on singular/pole fibers."""
        status, a_s, b_s = self._fiber_data(s)
        if not status.ok:
            raise SingularFiberError(
                f"fiber at s = {s!r} unusable: {status.reason}")
        return a_s, b_s

    # -- points --------------------------------------------------------------

    def point(self, s, x, y) -> "FiberPoint":
        """The affine point (x, y) on the fiber at s (checked exactly)."""
        return FiberPoint(self, s, x, y)

    def identity(self, s) -> "FiberPoint":
        """The identity O on the fiber at s."""
        return FiberPoint(self, s, None, None)

    def section_at(self, s) -> "FiberPoint":
        """The marked section evaluated at s."""
        if self.section is None:
            raise ZeroInputError("this family has no marked section")
        sx, sy = self.section
        s_val = self._coerce_parameter(s)
        return FiberPoint(self, s_val, sx.evaluate(s_val), sy.evaluate(s_val))


class FiberPoint:
    """A point on one fiber: affine (x, y), or the identity when x is None.

    Constructing a point verifies the curve equation exactly and applies the
    coordinate growth guard; since all group-law results pass through the
    constructor, closure under the curve equation holds by construction.
    """

    __slots__ = ("family", "s", "x", "y")

    def __init__(self, family: WeierstrassFamily, s, x, y):
        s = family._coerce_parameter(s)
        a_s, b_s = family.coefficients_at(s)  # raises on bad fibers
        if x is None:
            if y is not None:
                raise ZeroInputError("identity point takes x = y = None")
        else:
            x = family._coerce_parameter(x)
            y = family._coerce_parameter(y)
            if y * y != x ** 3 + a_s * x + b_s:
                raise NotOnCurveError(
                    f"({x!r}, {y!r}) not on the fiber at s = {s!r}")
            _guard_size(family.field, x)
            _guard_size(family.field, y)
        self.family = family
        self.s = s
        self.x = x
        self.y = y

    def is_identity(self) -> bool:
        return self.x is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiberPoint):
            return NotImplemented
        return (self.family == other.family and self.s == other.s
                and self.x == other.x and self.y == other.y)

    def __hash__(self) -> int:
        return hash((self.family, self.s, self.x, self.y))

    def __neg__(self) -> "FiberPoint":
        return negate(self)

    def __add__(self, other) -> "FiberPoint":
        return add(self, other)

    def __rmul__(self, n: int) -> "FiberPoint":
        return mul_n(n, self)

    def __repr__(self) -> str:
        if self.is_identity():
            return f"O(s={self.s!r})"
        return f"P(s={self.s!r}, x={self.x!r}, y={self.y!r})"


def _check_same_fiber(p: FiberPoint, q: FiberPoint) -> None:
    if p.family != q.family:
        raise FiberMismatchError("points belong to different families")
    if p.s != q.s:
        raise FiberMismatchError(
            f"points on different fibers: s = {p.s!r} vs {q.s!r}")


def negate(p: FiberPoint) -> FiberPoint:
    """-(x, y) = (x, -y); the identity is its own negative."""
    if p.is_identity():
        return p
    return FiberPoint(p.family, p.s, p.x, -p.y)


def add(p: FiberPoint, q: FiberPoint) -> FiberPoint:
    """Chord-tangent addition; exact in the base field."""
    _check_same_fiber(p, q)
    if p.is_identity():
        return q
    if q.is_identity():
        return p
    a_s, _ = p.family.coefficients_at(p.s)
    if p.x == q.x:
        if p.y == q.y and p.y:
            slope = (3 * p.x * p.x + a_s) / (2 * p.y)  # tangent
        else:
            return p.family.identity(p.s)  # vertical chord or 2-torsion
    else:
        slope = (q.y - p.y) / (q.x - p.x)
    x3 = slope * slope - p.x - q.x
    y3 = slope * (p.x - x3) - p.y
    return FiberPoint(p.family, p.s, x3, y3)


def mul_n(n: int, p: FiberPoint) -> FiberPoint:
    """[n]P by binary double-and-add (n may be negative or zero)."""
    if not isinstance(n, int):
        raise ZeroInputError(f"multiplier must be an int, got {n!r}")
    if n < 0:
        return mul_n(-n, negate(p))
    result = p.family.identity(p.s)
    base = p
    while n:
        if n & 1:
            result = add(result, base)
        n >>= 1
        if n:
            base = add(base, base)
    return result


def embed(p: FiberPoint) -> MultiProjPoint:
    """((x : y : 1), (s : 1)) with the identity at ((0 : 1 : 0), (s : 1))."""
    field = p.family.field
    if p.is_identity():
        fiber = normalize_point(field, (0, 1, 0))
    else:
        fiber = normalize_point(field, (p.x, p.y, 1))
    base = normalize_point(field, (p.s, 1))
    return MultiProjPoint((fiber, base))


def fiber_height(p: FiberPoint) -> ExactHeight:
    """Weil height of the fiber factor (x : y : 1) of the embedding."""
    return weil_height(embed(p).factors[0])


def base_height(p: FiberPoint) -> ExactHeight:
    """Weil height of the base factor (s : 1)."""
    return weil_height(embed(p).factors[1])


def total_height(p: FiberPoint) -> ExactHeight:
    """Multiprojective height of the embedded point (fiber and base parts
    combined per the field's height convention)."""
    return multiprojective_height(embed(p))


# ---------------------------------------------------------------------------
# fast doubling-chain heights over F_p(u)
#
# Doubling tables need fiber heights of [2^l]P up to l = 7, where coordinate
# degrees reach ~4^7 times the starting height.  The reduced-fraction group
# law would spend quadratic-time polynomial gcds on every intermediate, so
# instead the chain tracks only the x-line: with x = N/D in lowest terms,
#
#   x([2]P) = N' / D',   N' = N^4 - 2aN^2D^2 - 8bND^3 + a^2D^4,
#                        D' = 4 D (N^3 + aND^2 + bD^3).
#
# The two binary quartics have resultant 16 (4a^3 + 27b^2)^2, so any common
# factor of (N', D') divides the FIXED polynomial (4a^3 + 27b^2)^2: one
# division of a huge polynomial by a small one recovers the full gcd, and
# every level stays in lowest terms at linear cost per coefficient.
# ---------------------------------------------------------------------------


def _x_line_height(alpha: Poly, beta: Poly, num: Poly, den: Poly) -> int:
    """Exact fiber height max deg of normalized (x : y : 1) from the x-line
    data alone, valid when alpha and beta are polynomials.

    Write x = num/den in lowest terms and V = num^3 + alpha num den^2 +
    beta den^3 (so y^2 = V / den^3 with gcd(V, den) = 1).  At a finite place
    dividing den, ord(x) = -2k forces ord(y) = -3k, so those places
    contribute (3/2) deg den; the place at infinity contributes
    max(0, -ord_inf x, -ord_inf y) read off from degrees.  No square root
    and no y-coordinate is ever materialized.
    """
    v = num * num * num + alpha * num * den * den + beta * den * den * den
    if den.degree % 2:
        raise ZeroInputError("x-denominator of a curve point must be a square")
    finite = 3 * (den.degree // 2)
    parts = [0]
    if not num.is_zero():
        parts.append(num.degree - den.degree)
    if not v.is_zero():
        if (v.degree - 3 * den.degree) % 2:
            raise ZeroInputError("V-degree parity violates y^2 den^3 = V")
        parts.append((v.degree - 3 * den.degree) // 2)
    return finite + max(parts)


def doubling_fiber_heights(p: FiberPoint, depth: int) -> tuple[int, ...] | None:
    """Fiber heights of P, [2]P, ..., [2^depth]P via the x-line duplication
    recurrence, or None when the fast route does not apply (rational base
    field, or non-polynomial fiber coefficients).

    Exactness: each level's (N, D) is fully reduced because the stripped gcd
    is the whole gcd (it divides the duplication resultant), and the height
    formula in :func:`_x_line_height` agrees with
    ``weil_height(embed(point))`` place by place.  Once a level hits the
    identity (doubling 2-torsion) all later heights are 0.
    """
    field = p.family.field
    if not isinstance(field, FunctionField):
        return None
    coeff = field.coeff_field
    a_s, b_s = p.family.coefficients_at(p.s)
    if not (a_s.is_polynomial() and b_s.is_polynomial()):
        return None
    alpha = a_s.num.exact_div(a_s.den)
    beta = b_s.num.exact_div(b_s.den)

    if p.is_identity():
        return (0,) * (depth + 1)
    num, den = p.x.num, p.x.den
    ilc = coeff.coerce(den.leading_coefficient())
    if ilc != coeff.one:
        inv = _inv_in(coeff, ilc)
        num, den = num * inv, den * inv

    disc = alpha * alpha * alpha * 4 + beta * beta * 27
    strip_bound = disc * disc

    heights = [_x_line_height(alpha, beta, num, den)]
    for _ in range(depth):
        n2 = num * num
        d2 = den * den
        v = num * n2 + alpha * num * d2 + beta * den * d2
        if v.is_zero():
            # 2-torsion: the double and all further doubles are the identity
            heights.extend([0] * (depth + 1 - len(heights)))
            return tuple(heights)
        new_num = (n2 * n2 - alpha * n2 * d2 * 2 - beta * num * den * d2 * 8
                   + alpha * alpha * d2 * d2)
        new_den = den * v * 4
        g = poly_gcd(poly_gcd(strip_bound, new_num), new_den)
        if not g.is_constant():
            new_num = new_num.exact_div(g)
            new_den = new_den.exact_div(g)
        inv = _inv_in(coeff, new_den.leading_coefficient())
        num, den = new_num * inv, new_den * inv
        if den.degree > MAX_COORD_DEGREE:
            raise ResourceLimitError(
                f"doubling-chain denominator degree {den.degree} exceeds "
                f"{MAX_COORD_DEGREE}")
        heights.append(_x_line_height(alpha, beta, num, den))
    return tuple(heights)


def _inv_in(coeff_field, value):
    return coeff_field.coerce(pow(int(value), -1, coeff_field.p))
