"""Formal Cartier divisors on P^1 or P^2 in factored form.

A :class:`FormRegistry` holds named homogeneous forms that are certified
pairwise coprime — verified by polynomial gcds on P^1, asserted explicitly
by the caller on P^2 where a multivariate gcd is out of scope.  A
:class:`FormalDivisor` is an integer combination of registered forms.  On a
registry of pairwise-coprime forms the divisor lattice is free on the form
names, so the interesting operations are exact exponent bookkeeping:

* ``split_effective``: the unique decomposition D = C - E into effective
  divisors with disjoint supports (C collects positive multiplicities, E the
  negated negative ones).
* ``denominator_support``: E alone — on the chart ring this generates the
  colon ideal of denominators ``{b : b * f in A}`` for the local equation
  f of D, because the positive part is coprime to the negative part.
* ``is_effective``: no negative multiplicities.

For divisors on P^1 the local equation in either standard chart is exposed
as an explicit pair of polynomials (``chart_polys``), which is what the
membership oracle in the test suite divides against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import FieldMismatchError, ZeroInputError
from .exact_arith import CoeffField, Poly, PrimeField, Rationals, poly_gcd

Coeff = Union[int, Fraction]
Term = tuple[Coeff, tuple[int, ...]]


def _canonical_terms(field: CoeffField, terms: Sequence[Term],
                     nvars: int) -> tuple[Term, ...]:
    merged: dict[tuple[int, ...], object] = {}
    for coeff, exps in terms:
        if len(exps) != nvars:
            raise ZeroInputError(
                f"exponent tuple {exps} needs {nvars} entries")
        if any(e < 0 for e in exps):
            raise ZeroInputError("negative exponent in a form")
        c = field.coerce(coeff)
        key = tuple(exps)
        merged[key] = merged.get(key, field.zero) + c
        if isinstance(field, PrimeField):
            merged[key] %= field.p
    cleaned = [(c, e) for e, c in merged.items() if c]
    if not cleaned:
        raise ZeroInputError("form is zero")
    degrees = {sum(e) for _, e in cleaned}
    if len(degrees) != 1:
        raise ZeroInputError("form is not homogeneous")
    if degrees == {0}:
        raise ZeroInputError("a unit (degree-0 form) is not a divisor")
    cleaned.sort(key=lambda t: t[1])
    return tuple(cleaned)


def _dehomogenize(terms: Sequence[Term], field: CoeffField, chart: int) -> Poly:
    """Set coordinate ``chart`` to 1 on a binary form; poly in the other."""
    other = 1 - chart
    maxdeg = max(e[other] for _, e in terms)
    coeffs = [field.zero] * (maxdeg + 1)
    for c, e in terms:
        coeffs[e[other]] = coeffs[e[other]] + c
    return Poly(field, coeffs)


def _divisible_by_var(terms: Sequence[Term], var: int) -> bool:
    return all(e[var] >= 1 for _, e in terms)


@dataclass(frozen=True)
class RegisteredForm:
    name: str
    terms: tuple[Term, ...]
    degree: int

    def to_text(self, variables: Sequence[str]) -> str:
        parts = []
        for c, exps in self.terms:
            factors = [] if c == 1 and any(exps) else [str(c)]
            for v, e in zip(variables, exps):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            parts.append("*".join(factors) or str(c))
        return " + ".join(parts).replace("+ -", "- ")


class FormRegistry:
    """Named pairwise-coprime homogeneous forms on P^1 or P^2.

    On P^1 coprimality of a new form against every registered one is
    *verified* (gcd of dehomogenizations, plus the shared-variable-factor
    check that dehomogenization hides).  On P^2 only scalar proportionality
    is detected; anything else needs the caller's explicit
    ``assert_coprime=True``, which the registry records.
    """

    def __init__(self, field: CoeffField, ambient_dim: int):
        if ambient_dim not in (1, 2):
            raise ZeroInputError("ambient dimension must be 1 or 2")
        self.field = field
        self.ambient_dim = ambient_dim
        self.forms: dict[str, RegisteredForm] = {}
        self.asserted_pairs: list[tuple[str, str]] = []

    def register(self, name: str, terms: Sequence[Term], *,
                 assert_coprime: bool = False) -> RegisteredForm:
        if name in self.forms:
            raise ZeroInputError(f"form name {name!r} already registered")
        canon = _canonical_terms(self.field, terms, self.ambient_dim + 1)
        new = RegisteredForm(name, canon, sum(canon[0][1]))
        for old in self.forms.values():
            self._check_coprime(old, new, assert_coprime)
        self.forms[name] = new
        return new

    def _check_coprime(self, old: RegisteredForm, new: RegisteredForm,
                       asserted: bool) -> None:
        if self.ambient_dim == 1:
            if _divisible_by_var(old.terms, 0) and _divisible_by_var(new.terms, 0):
                raise ZeroInputError(
                    f"forms {old.name!r} and {new.name!r} share the factor x0")
            if _divisible_by_var(old.terms, 1) and _divisible_by_var(new.terms, 1):
                raise ZeroInputError(
                    f"forms {old.name!r} and {new.name!r} share the factor x1")
            g = poly_gcd(_dehomogenize(old.terms, self.field, 1),
                         _dehomogenize(new.terms, self.field, 1))
            if not g.is_constant():
                raise ZeroInputError(
                    f"forms {old.name!r} and {new.name!r} are not coprime")
            return
        if _scalar_multiple(old, new, self.field):
            raise ZeroInputError(
                f"forms {old.name!r} and {new.name!r} are proportional")
        if not asserted:
            raise ZeroInputError(
                f"coprimality of {new.name!r} with {old.name!r} on P^2 "
                f"cannot be verified here; pass assert_coprime=True to state it")
        self.asserted_pairs.append((old.name, new.name))

    def divisor(self, multiplicities: Mapping[str, int]) -> "FormalDivisor":
        for name in multiplicities:
            if name not in self.forms:
                raise ZeroInputError(f"unknown form {name!r}")
        items = tuple(sorted((n, int(m)) for n, m in multiplicities.items() if m))
        return FormalDivisor(self, items)

    def zero_divisor(self) -> "FormalDivisor":
        return FormalDivisor(self, ())


def _scalar_multiple(a: RegisteredForm, b: RegisteredForm,
                     field: CoeffField) -> bool:
    if len(a.terms) != len(b.terms):
        return False
    if [e for _, e in a.terms] != [e for _, e in b.terms]:
        return False
    ratio = None
    for (ca, _), (cb, _) in zip(a.terms, b.terms):
        if isinstance(field, Rationals):
            r = Fraction(cb) / Fraction(ca)
        else:
            r = cb * pow(ca, -1, field.p) % field.p
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


@dataclass(frozen=True)
class FormalDivisor:
    """An integer combination of registered forms (zero terms dropped,
    items sorted by name, so equality is structural)."""

    registry: FormRegistry
    items: tuple[tuple[str, int], ...]

    def _check_registry(self, other: "FormalDivisor") -> None:
        if self.registry is not other.registry:
            raise FieldMismatchError("divisors from different registries")

    def multiplicity(self, name: str) -> int:
        for n, m in self.items:
            if n == name:
                return m
        return 0

    def support(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.items)

    def is_zero(self) -> bool:
        return not self.items

    @property
    def degree(self) -> int:
        return sum(m * self.registry.forms[n].degree for n, m in self.items)

    def __add__(self, other: "FormalDivisor") -> "FormalDivisor":
        self._check_registry(other)
        out = dict(self.items)
        for n, m in other.items:
            out[n] = out.get(n, 0) + m
        return self.registry.divisor(out)

    def __neg__(self) -> "FormalDivisor":
        return FormalDivisor(self.registry,
                             tuple((n, -m) for n, m in self.items))

    def __sub__(self, other: "FormalDivisor") -> "FormalDivisor":
        self._check_registry(other)
        return self + (-other)

    def scale(self, k: int) -> "FormalDivisor":
        if k == 0:
            return self.registry.zero_divisor()
        return FormalDivisor(self.registry,
                             tuple((n, k * m) for n, m in self.items))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalDivisor):
            return NotImplemented
        return self.registry is other.registry and self.items == other.items

    def __hash__(self) -> int:
        return hash((id(self.registry), self.items))

    def to_text(self) -> str:
        if not self.items:
            return "0"
        return " + ".join(f"{m}*[{n}]" for n, m in self.items).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"FormalDivisor({self.to_text()})"


def is_effective(divisor: FormalDivisor) -> bool:
    """Whether every multiplicity is nonnegative."""
    return all(m >= 0 for _, m in divisor.items)


def split_effective(divisor: FormalDivisor
                    ) -> tuple[FormalDivisor, FormalDivisor]:
    """The unique decomposition D = C - E with C, E effective of disjoint
    support: C keeps the positive part, E the negated negative part."""
    pos = {n: m for n, m in divisor.items if m > 0}
    neg = {n: -m for n, m in divisor.items if m < 0}
    return divisor.registry.divisor(pos), divisor.registry.divisor(neg)


def denominator_support(divisor: FormalDivisor) -> FormalDivisor:
    """The effective divisor of denominators of D (the negative part E).

    On the chart ring of pairwise-coprime forms, the local equation of D is
    (positive part)/(negative part) with coprime numerator and denominator,
    so a function b satisfies ``b * f in A`` exactly when the negative part
    divides b: E generates the colon ideal.
    """
    return split_effective(divisor)[1]


def chart_polys(divisor: FormalDivisor, chart: int) -> tuple[Poly, Poly]:
    """Local equation of a divisor on P^1 in chart ``chart`` (0 or 1): the
    pair (numerator, denominator) of the product of dehomogenized forms.

    Forms that are pure powers of the chart variable are units on the chart
    and correctly drop to constants.
    """
    registry = divisor.registry
    if registry.ambient_dim != 1:
        raise ZeroInputError("chart equations implemented on P^1 only")
    if chart not in (0, 1):
        raise ZeroInputError("chart index must be 0 or 1")
    num = Poly.one(registry.field)
    den = Poly.one(registry.field)
    for name, mult in divisor.items:
        local = _dehomogenize(registry.forms[name].terms, registry.field, chart)
        if mult > 0:
            num = num * local ** mult
        else:
            den = den * local ** (-mult)
    return num, den
