"""Projective points, exact Weil heights, morphisms between projective
spaces, and empirical height-comparison verifiers.

Height conventions
------------------
Points are held in a canonical normalized form, so heights are exact:

* over Q: coprime integer coordinates, first nonzero coordinate positive;
  the height is the integer ``H(P) = max |x_i|`` (multiplicative scale).
* over F_p(u): polynomial coordinates with no common factor, first nonzero
  coordinate monic; the height is the integer ``h(P) = max deg x_i``
  (additive degree units).

:class:`ExactHeight` carries that integer together with its field, combines
heights of multiprojective factors (product over Q, sum over F_p(u)), and
converts to the common log scale only on request.

Height-comparison verifiers
---------------------------
``fit_linear_height_bound`` fits the smallest constants in
``h(f(P)) <= c1 h(P) + c2`` over a sample with ``c1`` pinned to the form
degree, and re-checks the fitted bound by exact comparisons (ratios of
integers, never floats).  ``verify_two_sided_bound`` does the analogous
two-sided fit for a section/projection pair such as the blow-up of P^2 at
a point, after first checking the round-trip identity projection(section(P))
== P on every sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence, Union

from .errors import (
    BaseLocusError,
    DomainError,
    FieldMismatchError,
    RoundTripError,
    ZeroInputError,
)
from .exact_arith import (
    BaseField,
    FunctionField,
    Poly,
    QQ,
    RatFunc,
    Rationals,
    base_field_label,
    poly_gcd,
)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    """A point of P^n in canonical normalized coordinates (see module doc)."""

    field: BaseField
    coords: tuple

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def coordinate_texts(self) -> list[str]:
        if isinstance(self.field, Rationals):
            return [str(c) for c in self.coords]
        return [c.to_text("u") for c in self.coords]

    def __repr__(self) -> str:
        return f"({' : '.join(self.coordinate_texts())})"


@dataclass(frozen=True)
class MultiProjPoint:
    """A point of a product P^{n_1} x ... x P^{n_k}, one factor per entry."""

    factors: tuple[ProjPoint, ...]

    def __post_init__(self):
        if not self.factors:
            raise ZeroInputError("empty multiprojective point")
        field = self.factors[0].field
        for f in self.factors[1:]:
            if f.field != field:
                raise FieldMismatchError("factors over different fields")

    @property
    def field(self) -> BaseField:
        return self.factors[0].field

    def __repr__(self) -> str:
        return " x ".join(repr(f) for f in self.factors)


def normalize_point(field: BaseField, coords: Sequence) -> ProjPoint:
    """Canonical representative of (x_0 : ... : x_n); see the module doc.

    Accepts ints/Fractions over Q and ints/Polys/RatFuncs over F_p(u).
    Raises :class:`ZeroInputError` when every coordinate is zero.
    """
    if len(coords) == 0:
        raise ZeroInputError("a projective point needs at least one coordinate")
    if isinstance(field, Rationals):
        fracs = [QQ.coerce(c) for c in coords]
        if not any(fracs):
            raise ZeroInputError("all projective coordinates are zero")
        scale = 1
        for c in fracs:
            scale = scale * c.denominator // math.gcd(scale, c.denominator)
        ints = [int(c * scale) for c in fracs]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        for c in ints:
            if c:
                if c < 0:
                    g = -g
                break
        return ProjPoint(field, tuple(c // g for c in ints))
    els = [field.coerce(c) for c in coords]
    if all(e.is_zero() for e in els):
        raise ZeroInputError("all projective coordinates are zero")
    lcm = Poly.one(field.coeff_field)
    for e in els:
        lcm = lcm * e.den.exact_div(poly_gcd(lcm, e.den))
    nums = [e.num * lcm.exact_div(e.den) for e in els]
    g = Poly.zero(field.coeff_field)
    for n in nums:
        g = poly_gcd(g, n)
    nums = [n.exact_div(g) for n in nums]
    for n in nums:
        if not n.is_zero():
            lead = n.leading_coefficient()
            if lead != 1:
                inv = pow(lead, -1, field.coeff_field.p)
                nums = [m * inv for m in nums]
            break
    return ProjPoint(field, tuple(nums))


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactHeight:
    """An exact height: the integer ``max |x_i|`` over Q (multiplicative,
    >= 1) or ``max deg x_i`` over F_p(u) (degree units, >= 0)."""

    field: BaseField
    value: int

    def log_value(self) -> float:
        """Common log scale: ln H over Q, plain degree float over F_p(u)."""
        if isinstance(self.field, Rationals):
            return math.log(self.value)
        return float(self.value)

    def combine(self, other: "ExactHeight") -> "ExactHeight":
        """Height of a product of factors: product over Q, sum over F_p(u)."""
        if self.field != other.field:
            raise FieldMismatchError("combining heights over different fields")
        if isinstance(self.field, Rationals):
            return ExactHeight(self.field, self.value * other.value)
        return ExactHeight(self.field, self.value + other.value)

    def __repr__(self) -> str:
        unit = "H" if isinstance(self.field, Rationals) else "deg"
        return f"ExactHeight({unit}={self.value}, {base_field_label(self.field)})"


def weil_height(point: ProjPoint) -> ExactHeight:
    """Exact Weil height of a normalized projective point."""
    if isinstance(point.field, Rationals):
        return ExactHeight(point.field, max(abs(c) for c in point.coords))
    degs = [c.degree for c in point.coords if not c.is_zero()]
    return ExactHeight(point.field, max(degs))


def log_of_fraction(x: Fraction) -> float:
    """ln of a positive Fraction via integer logs (no float overflow even
    when numerator or denominator has thousands of digits)."""
    if x <= 0:
        raise ZeroInputError("log of a nonpositive value")
    return math.log(x.numerator) - math.log(x.denominator)


def multiprojective_height(point: MultiProjPoint) -> ExactHeight:
    """Height of a multiprojective point: factor heights combined."""
    total = weil_height(point.factors[0])
    for f in point.factors[1:]:
        total = total.combine(weil_height(f))
    return total


def base_element_height(field: BaseField, s) -> ExactHeight:
    """Height of a base parameter s, i.e. of the point (s : 1) on P^1."""
    return weil_height(normalize_point(field, (s, 1)))


# ---------------------------------------------------------------------------
# morphisms of projective spaces
# ---------------------------------------------------------------------------

Coeff = Union[int, Fraction]
Term = tuple[Coeff, tuple[int, ...]]
Form = tuple[Term, ...]


@dataclass(frozen=True)
class MorphismSpec:
    """A tuple of homogeneous forms of a common degree, P^n -> P^m.

    ``forms[j]`` defines the j-th target coordinate as a sum of terms
    ``(coefficient, exponent tuple)``.  ``nonvanishing`` lists domain
    clauses: for each clause (a tuple of source coordinate indices) at least
    one listed coordinate must be nonzero, which is how a morphism defined
    away from a linear center (e.g. P^2 minus one point) declares its domain.
    """

    source_dim: int
    target_dim: int
    forms: tuple[Form, ...]
    nonvanishing: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if len(self.forms) != self.target_dim + 1:
            raise ZeroInputError(
                f"need {self.target_dim + 1} forms, got {len(self.forms)}")
        degree = None
        any_term = False
        for form in self.forms:
            for _, exps in form:
                if len(exps) != self.source_dim + 1:
                    raise ZeroInputError(
                        f"exponent tuple {exps} does not match source P^{self.source_dim}")
                if any(e < 0 for e in exps):
                    raise ZeroInputError("negative exponent in a form")
                total = sum(exps)
                if degree is None:
                    degree = total
                elif total != degree:
                    raise ZeroInputError("forms are not homogeneous of equal degree")
                any_term = True
        if not any_term:
            raise ZeroInputError("all forms are empty")
        for clause in self.nonvanishing:
            for i in clause:
                if not 0 <= i <= self.source_dim:
                    raise ZeroInputError(f"domain clause index {i} out of range")

    @property
    def degree(self) -> int:
        for form in self.forms:
            for _, exps in form:
                return sum(exps)
        raise ZeroInputError("empty morphism")  # unreachable after validation


def apply_morphism(spec: MorphismSpec, point: ProjPoint) -> ProjPoint:
    """Evaluate the forms on canonical coordinates and renormalize.

    Raises :class:`DomainError` when a nonvanishing clause fails and
    :class:`BaseLocusError` when every form vanishes at the point.
    """
    if point.dim != spec.source_dim:
        raise FieldMismatchError(
            f"point lives in P^{point.dim}, morphism expects P^{spec.source_dim}")
    coords = point.coords
    if isinstance(point.field, Rationals):
        is_zero = [c == 0 for c in coords]
    else:
        is_zero = [c.is_zero() for c in coords]
    for clause in spec.nonvanishing:
        if all(is_zero[i] for i in clause):
            raise DomainError(
                f"point {point!r} violates nonvanishing clause {clause}")
    rational = isinstance(point.field, Rationals)
    values = []
    for form in spec.forms:
        if rational:
            acc = Fraction(0)
        else:
            acc = Poly.zero(point.field.coeff_field)
        for coeff, exps in form:
            if rational:
                term = Fraction(coeff)
            else:
                term = Poly.constant(point.field.coeff_field, coeff)
            for c, e in zip(coords, exps):
                if e:
                    term = term * c ** e
            acc = acc + term
        values.append(acc)
    if rational:
        if not any(values):
            raise BaseLocusError(f"all forms vanish at {point!r}")
    else:
        if all(v.is_zero() for v in values):
            raise BaseLocusError(f"all forms vanish at {point!r}")
    return normalize_point(point.field, values)


def veronese(n: int, d: int) -> MorphismSpec:
    """Degree-d Veronese embedding of P^n: all monomials of degree d in
    lexicographic order."""
    if n < 1 or d < 1:
        raise ZeroInputError("veronese needs n >= 1 and d >= 1")
    forms = []
    for combo in combinations_with_replacement(range(n + 1), d):
        exps = [0] * (n + 1)
        for idx in combo:
            exps[idx] += 1
        forms.append(((1, tuple(exps)),))
    target_dim = len(forms) - 1
    return MorphismSpec(n, target_dim, tuple(forms))


def segre(p: ProjPoint, q: ProjPoint) -> ProjPoint:
    """Segre product P^n x P^m -> P^(nm+n+m): coordinates x_i y_j, row major.

    A product map has two sources, so it is kept as its own function rather
    than squeezed into :class:`MorphismSpec`.
    """
    if p.field != q.field:
        raise FieldMismatchError("segre factors over different fields")
    values = [x * y for x in p.coords for y in q.coords]
    return normalize_point(p.field, values)


# ---------------------------------------------------------------------------
# empirical height-comparison fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightFit:
    """Fitted constants for ``h(f(P)) <= c1 h(P) + c2`` over a sample.

    ``c1`` is the form degree; ``c2`` is the smallest nonnegative constant
    that makes the bound hold on the sample (a float log over Q, an integer
    over F_p(u)).  ``verdict`` is re-derived by exact comparisons.
    """

    c1: int
    c2: Union[float, int]
    verdict: bool
    samples: int
    argmax_index: int | None


def fit_linear_height_bound(spec: MorphismSpec,
                            points: Sequence[ProjPoint]) -> HeightFit:
    if not points:
        raise ZeroInputError("cannot fit a bound over an empty sample")
    d = spec.degree
    rational = isinstance(points[0].field, Rationals)
    worst = None  # exact excess: Fraction ratio over Q, int difference over F_p(u)
    worst_idx = None
    excesses = []
    for idx, point in enumerate(points):
        h_in = weil_height(point).value
        h_out = weil_height(apply_morphism(spec, point)).value
        excess = Fraction(h_out, h_in ** d) if rational else h_out - d * h_in
        excesses.append(excess)
        if worst is None or excess > worst:
            worst, worst_idx = excess, idx
    if rational:
        c2 = log_of_fraction(worst) if worst > 1 else 0.0
        bound = max(worst, Fraction(1))
    else:
        c2 = max(worst, 0)
        bound = c2
    verdict = all(e <= bound for e in excesses)
    return HeightFit(d, c2, verdict, len(points), worst_idx)


@dataclass(frozen=True)
class TwoSidedBoundFit:
    """Fitted constants for ``c1 h(P) - d1 <= h(sigma(P)) <= c2 h(P) + d2``."""

    c1: int
    d1: Union[float, int]
    c2: int
    d2: Union[float, int]
    verdict: bool
    samples: int


class BlowUpPlane:
    """The blow-up of P^2 at (0:0:1), as the incidence surface
    ``x v = y u`` inside P^2 x P^1.

    ``section`` sends a point of P^2 away from the center to
    ``((x:y:z), (x:y))``; ``projection`` is the first projection.  The pair
    satisfies projection(section(P)) = P wherever section is defined.
    """

    def __init__(self, field: BaseField):
        self.field = field

    def section(self, point: ProjPoint) -> MultiProjPoint:
        if point.dim != 2:
            raise FieldMismatchError("blow-up section expects a point of P^2")
        x, y, _ = point.coords
        zero = (x == 0 and y == 0) if isinstance(self.field, Rationals) \
            else (x.is_zero() and y.is_zero())
        if zero:
            raise DomainError("the blow-up center (0:0:1) is outside the domain")
        return MultiProjPoint((point, normalize_point(self.field, (x, y))))

    def projection(self, point: MultiProjPoint) -> ProjPoint:
        if len(point.factors) != 2 or point.factors[0].dim != 2 \
                or point.factors[1].dim != 1:
            raise FieldMismatchError("expected a point of P^2 x P^1")
        return point.factors[0]

    def incidence_holds(self, point: MultiProjPoint) -> bool:
        """Whether ``x v = y u`` (bihomogeneous, so representative-free)."""
        (x, y, _), (u, v) = point.factors[0].coords, point.factors[1].coords
        return x * v == y * u


def verify_two_sided_bound(pair: BlowUpPlane,
                           points: Sequence[ProjPoint]) -> TwoSidedBoundFit:
    """Fit and exactly re-check both sides of the height comparison for a
    section/projection pair, after verifying the round trip on each sample.

    Lower side uses c1 = 1 (the projection drops a factor), upper side uses
    c2 = 2 (the section at most doubles in log height: the P^1 factor is a
    pair of coordinates of the P^2 factor).  Raises :class:`RoundTripError`
    if projection(section(P)) != P for some sample.
    """
    if not points:
        raise ZeroInputError("cannot fit a bound over an empty sample")
    rational = isinstance(points[0].field, Rationals)
    low_excesses = []   # exact h_n - h_m (must be bounded by d1)
    up_excesses = []    # exact h_m - 2 h_n (must be bounded by d2)
    for point in points:
        image = pair.section(point)
        back = pair.projection(image)
        if back != point:
            raise RoundTripError(f"projection(section({point!r})) = {back!r}")
        if not pair.incidence_holds(image):
            raise RoundTripError(f"section({point!r}) violates the incidence")
        h_n = weil_height(point).value
        h_m = multiprojective_height(image).value
        if rational:
            low_excesses.append(Fraction(h_n, h_m))
            up_excesses.append(Fraction(h_m, h_n * h_n))
        else:
            low_excesses.append(h_n - h_m)
            up_excesses.append(h_m - 2 * h_n)
    worst_low = max(low_excesses)
    worst_up = max(up_excesses)
    if rational:
        d1 = log_of_fraction(worst_low) if worst_low > 1 else 0.0
        d2 = log_of_fraction(worst_up) if worst_up > 1 else 0.0
        low_bound = max(worst_low, Fraction(1))
        up_bound = max(worst_up, Fraction(1))
    else:
        d1 = max(worst_low, 0)
        d2 = max(worst_up, 0)
        low_bound, up_bound = d1, d2
    verdict = all(e <= low_bound for e in low_excesses) and \
        all(e <= up_bound for e in up_excesses)
    return TwoSidedBoundFit(1, d1, 2, d2, verdict, len(points))
