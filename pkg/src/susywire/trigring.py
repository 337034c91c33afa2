"""Exact arithmetic on half-angle trigonometric monomials.

Every function handled by the package is a finite sum

    sum_k  r_k * sin(beta/2)**a_k * cos(beta/2)**b_k

with rational coefficients ``r_k`` and half-integer exponents ``a_k, b_k``.
Below, ``s`` and ``c`` abbreviate ``sin(beta/2)`` and ``cos(beta/2)``.

Exponents are kept as twice-values (``a2 = 2*a``) and coefficients as
:class:`fractions.Fraction`, so every ring operation is exact. On the
open interval ``0 < beta < pi`` both ``s`` and ``c`` are positive. That
makes fractional powers well defined and gives a decidable zero test
through the rewrite ``s**2 -> 1 - c**2``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, NamedTuple, Union

import numpy as np

__all__ = [
    "HalfInt",
    "TrigMonomial",
    "TrigPoly",
    "TrigDomainError",
    "DivergenceError",
    "canonicalize",
    "add",
    "scale",
    "mul_monomial",
    "differentiate",
    "is_zero",
    "eval_at",
    "inner_product",
    "is_normalizable",
    "beta_integral",
]

RationalLike = Union[Fraction, int, str]


class TrigDomainError(ValueError):
    """Evaluation requested where the monomials are not defined."""


class DivergenceError(ArithmeticError):
    """An integral over (0, pi) does not converge."""


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """Exact half-integer stored as twice its value."""

    twice: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise TypeError(f"HalfInt needs an int twice-value, got {self.twice!r}")

    @classmethod
    def of(cls, value: "HalfInt | RationalLike | float") -> "HalfInt":
        """Build from a value such as ``Fraction(3, 2)``, ``"-1/2"`` or ``2``."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, float):
            if not value.is_integer() and not (2 * value).is_integer():
                raise ValueError(f"{value!r} is not a half-integer")
            return cls(int(round(2 * value)))
        frac = Fraction(value)
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(doubled))

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse ``"p/2"`` or an integer string; anything else raises ValueError."""
        text = text.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            if den.strip() != "2":
                raise ValueError(f"{text!r} is not of the form p/2")
            return cls(int(num))
        return cls(2 * int(text))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_half_odd(self) -> bool:
        return self.twice % 2 == 1

    def __add__(self, other: "HalfInt | int") -> "HalfInt":
        other = other if isinstance(other, HalfInt) else HalfInt(2 * other)
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other: "HalfInt | int") -> "HalfInt":
        other = other if isinstance(other, HalfInt) else HalfInt(2 * other)
        return HalfInt(self.twice - other.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __lt__(self, other: "HalfInt") -> bool:
        if not isinstance(other, HalfInt):
            return NotImplemented
        return self.twice < other.twice

    def __float__(self) -> float:
        return self.twice / 2

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def _twice(x: "HalfInt | RationalLike") -> int:
    return HalfInt.of(x).twice


class TrigMonomial(NamedTuple):
    coeff: Fraction
    a: HalfInt
    b: HalfInt


# Dense polynomials in c are lists of Fractions, index = power of c.


def _strip(poly: list[Fraction]) -> list[Fraction]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _divides_by_one_minus_c2(poly: list[Fraction]) -> bool:
    # (1 - c^2) | P  iff  P(1) = P(-1) = 0
    return sum(poly) == 0 and sum(x if k % 2 == 0 else -x for k, x in enumerate(poly)) == 0


def _div_one_minus_c2(poly: list[Fraction]) -> list[Fraction]:
    # P = (1 - c^2) R, solved from the top coefficient down.
    n = len(poly) - 1
    quot = [Fraction(0)] * (n - 1)
    rem = list(poly)
    for k in range(n, 1, -1):
        q = -rem[k]
        quot[k - 2] = q
        rem[k] += q
        rem[k - 2] -= q
    assert all(x == 0 for x in rem), "non-exact division by 1 - c^2"
    return quot


def _canonical_terms(raw: Mapping[tuple[int, int], Fraction]) -> tuple[tuple[int, int, Fraction], ...]:
    classes: dict[tuple[int, int], dict[tuple[int, int], Fraction]] = defaultdict(dict)
    for (a2, b2), coeff in raw.items():
        if coeff:
            classes[(a2 % 2, b2 % 2)][(a2, b2)] = coeff

    out: dict[tuple[int, int], Fraction] = {}
    for terms in classes.values():
        a0 = min(a2 for a2, _ in terms)
        b0 = min(b2 for _, b2 in terms)
        even: dict[int, Fraction] = defaultdict(Fraction)
        odd: dict[int, Fraction] = defaultdict(Fraction)
        for (a2, b2), coeff in terms.items():
            i, k = (a2 - a0) // 2, (b2 - b0) // 2
            target = even if i % 2 == 0 else odd
            m = i // 2
            for r in range(m + 1):
                term = coeff * math.comb(m, r)
                target[k + 2 * r] += -term if r % 2 else term
        P = _strip(_dense(even))
        Q = _strip(_dense(odd))
        if not P and not Q:
            continue

        shift = min(_low_degree(P), _low_degree(Q))
        if shift:
            P = P[shift:] if P else P
            Q = Q[shift:] if Q else Q
            b0 += 2 * shift

        # s^a0 c^b0 (P + s Q): pull out every factor of s.
        while True:
            if not P:
                P, Q = Q, []
                a0 += 2
            elif len(P) > 2 and _divides_by_one_minus_c2(P):
                P, Q = Q, _strip(_div_one_minus_c2(P))
                a0 += 2
            else:
                break

        for k, coeff in enumerate(P):
            if coeff:
                out[(a0, b0 + 2 * k)] = coeff
        for k, coeff in enumerate(Q):
            if coeff:
                out[(a0 + 2, b0 + 2 * k)] = coeff

    return tuple((a2, b2, out[(a2, b2)]) for a2, b2 in sorted(out))


def _dense(sparse: Mapping[int, Fraction]) -> list[Fraction]:
    if not sparse:
        return []
    poly = [Fraction(0)] * (max(sparse) + 1)
    for k, v in sparse.items():
        poly[k] += v
    return poly


def _low_degree(poly: list[Fraction]) -> int:
    for k, v in enumerate(poly):
        if v:
            return k
    return 10**9


class TrigPoly:
    """Immutable, always-canonical element of the half-angle monomial ring.

    Canonical form: terms grouped by the fractional parts of ``(a, b)``;
    within a class the polynomial is written ``s^a0 c^b0 (P(c) + s Q(c))``
    with the largest possible ``a0`` and ``b0``. Two polynomials are equal
    as functions on ``(0, pi)`` iff their canonical term tuples coincide.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], RationalLike] | None = None) -> None:
        raw: dict[tuple[int, int], Fraction] = {}
        for key, coeff in (terms or {}).items():
            raw[key] = raw.get(key, Fraction(0)) + Fraction(coeff)
        self._terms = _canonical_terms(raw)
        self._hash: int | None = None

    @classmethod
    def _from_canonical(cls, terms: tuple[tuple[int, int, Fraction], ...]) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def from_monomials(cls, items: Iterable[tuple[RationalLike, "HalfInt | RationalLike", "HalfInt | RationalLike"]]) -> "TrigPoly":
        raw: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for coeff, a, b in items:
            raw[(_twice(a), _twice(b))] += Fraction(coeff)
        return cls(raw)

    @classmethod
    def monomial(cls, coeff: RationalLike, a: "HalfInt | RationalLike", b: "HalfInt | RationalLike") -> "TrigPoly":
        return cls({(_twice(a), _twice(b)): Fraction(coeff)})

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls._from_canonical(())

    @classmethod
    def one(cls) -> "TrigPoly":
        return cls._from_canonical(((0, 0, Fraction(1)),))

    @property
    def terms(self) -> tuple[TrigMonomial, ...]:
        return tuple(TrigMonomial(c, HalfInt(a2), HalfInt(b2)) for a2, b2, c in self._terms)

    @property
    def raw_terms(self) -> tuple[tuple[int, int, Fraction], ...]:
        """Canonical terms as ``(a2, b2, coeff)`` with twice-value exponents."""
        return self._terms

    def as_dict(self) -> dict[tuple[int, int], Fraction]:
        return {(a2, b2): c for a2, b2, c in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        merged = self.as_dict()
        for a2, b2, c in other._terms:
            merged[(a2, b2)] = merged.get((a2, b2), Fraction(0)) + c
        return TrigPoly(merged)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._from_canonical(tuple((a2, b2, -c) for a2, b2, c in self._terms))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "TrigPoly | RationalLike") -> "TrigPoly":
        if isinstance(other, TrigPoly):
            prod: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
            for a2, b2, c in self._terms:
                for a2q, b2q, cq in other._terms:
                    prod[(a2 + a2q, b2 + b2q)] += c * cq
            return TrigPoly(prod)
        if isinstance(other, (Fraction, int)):
            r = Fraction(other)
            if r == 0:
                return TrigPoly.zero()
            # nonzero scaling keeps the canonical form
            return TrigPoly._from_canonical(tuple((a2, b2, c * r) for a2, b2, c in self._terms))
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, da2: int, db2: int, r: RationalLike = 1) -> "TrigPoly":
        """Multiply by ``r * s**(da2/2) * c**(db2/2)``."""
        r = Fraction(r)
        return TrigPoly({(a2 + da2, b2 + db2): c * r for a2, b2, c in self._terms})

    def diff(self) -> "TrigPoly":
        return differentiate(self)

    def ratio_to(self, other: "TrigPoly") -> Fraction | None:
        """Return ``r`` with ``self == r * other`` exactly, or None."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        if self.is_zero():
            return Fraction(0)
        if len(self._terms) != len(other._terms):
            return None
        r = self._terms[0][2] / other._terms[0][2]
        return r if self == other * r else None

    def __call__(self, beta):
        return eval_at(self, beta)

    def __repr__(self) -> str:
        return f"TrigPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for a2, b2, c in self._terms:
            factors = []
            if a2:
                factors.append(f"s^{HalfInt(a2)}")
            if b2:
                factors.append(f"c^{HalfInt(b2)}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def canonicalize(terms: Iterable[tuple[RationalLike, "HalfInt | RationalLike", "HalfInt | RationalLike"]] | TrigPoly) -> TrigPoly:
    """Reduce ``(coeff, a, b)`` triples to the canonical :class:`TrigPoly`."""
    if isinstance(terms, TrigPoly):
        return terms
    return TrigPoly.from_monomials(terms)


def is_zero(p: TrigPoly) -> bool:
    return p.is_zero()


def add(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    return p + q


def scale(p: TrigPoly, r: RationalLike) -> TrigPoly:
    return p * Fraction(r)


def mul_monomial(p: TrigPoly, da: "HalfInt | RationalLike", db: "HalfInt | RationalLike", r: RationalLike = 1) -> TrigPoly:
    return p.shift(_twice(da), _twice(db), r)


def differentiate(p: TrigPoly) -> TrigPoly:
    """d/dbeta, using d(s^a c^b) = (a/2) s^(a-1) c^(b+1) - (b/2) s^(a+1) c^(b-1)."""
    out: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for a2, b2, c in p.raw_terms:
        if a2:
            out[(a2 - 2, b2 + 2)] += c * Fraction(a2, 4)
        if b2:
            out[(a2 + 2, b2 - 2)] -= c * Fraction(b2, 4)
    return TrigPoly(out)


def eval_at(p: TrigPoly, beta):
    """Evaluate ``p`` at ``beta`` (float or array) in floating point."""
    arr = np.asarray(beta, dtype=float)
    needs_interior = any(a2 < 0 or b2 < 0 or a2 % 2 or b2 % 2 for a2, b2, _ in p.raw_terms)
    if needs_interior and np.any((arr <= 0.0) | (arr >= math.pi)):
        raise TrigDomainError("beta must lie in the open interval (0, pi) for negative or fractional exponents")
    s = np.sin(arr / 2)
    c = np.cos(arr / 2)
    total = np.zeros_like(arr)
    for a2, b2, coeff in p.raw_terms:
        total = total + float(coeff) * s ** (a2 / 2) * c ** (b2 / 2)
    return float(total) if np.ndim(beta) == 0 else total


def beta_integral(a2: int, b2: int) -> float:
    """``int_0^pi s^(a2/2) c^(b2/2) dbeta`` = Beta((a+1)/2, (b+1)/2)."""
    if a2 <= -2 or b2 <= -2:
        raise DivergenceError(f"integral of s^{HalfInt(a2)} c^{HalfInt(b2)} diverges on (0, pi)")
    x = (a2 + 2) / 4
    y = (b2 + 2) / 4
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def _gamma_half(x2: int) -> tuple[Fraction, int]:
    """Gamma(x2/2) for positive integer x2 as ``(rational, power of sqrt(pi))``."""
    if x2 % 2 == 0:
        return Fraction(math.factorial(x2 // 2 - 1)), 0
    n = (x2 - 1) // 2
    return Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), 1


def _beta_exact(a2: int, b2: int) -> tuple[Fraction, int]:
    # integer exponents: Beta at half-integer arguments is rational or rational * pi
    gx, px = _gamma_half(a2 // 2 + 1)
    gy, py = _gamma_half(b2 // 2 + 1)
    gxy, pxy = _gamma_half((a2 + b2) // 2 + 2)
    return gx * gy / gxy, (px + py - pxy) // 2


def inner_product(p: TrigPoly, q: TrigPoly) -> float:
    """``int_0^pi p q dbeta``, termwise over the exact product.

    Terms with integer exponents are summed exactly (as ``R0 + pi R1``)
    before rounding; the rest go through log-gamma.
    """
    exact = [Fraction(0), Fraction(0)]
    inexact = []
    for a2, b2, c in (p * q).raw_terms:
        if a2 <= -2 or b2 <= -2:
            raise DivergenceError(f"integral of s^{HalfInt(a2)} c^{HalfInt(b2)} diverges on (0, pi)")
        if a2 % 2 == 0 and b2 % 2 == 0:
            value, pi_power = _beta_exact(a2, b2)
            exact[pi_power] += c * value
        else:
            inexact.append(float(c) * beta_integral(a2, b2))
    return math.fsum([float(exact[0]), math.pi * float(exact[1]), *inexact])


def is_normalizable(p: TrigPoly) -> bool:
    """True iff every fractional class has minimal exponents above -1/2."""
    mins: dict[tuple[int, int], list[int]] = {}
    for a2, b2, _ in p.raw_terms:
        key = (a2 % 2, b2 % 2)
        lo = mins.setdefault(key, [a2, b2])
        lo[0] = min(lo[0], a2)
        lo[1] = min(lo[1], b2)
    return all(a2 > -1 and b2 > -1 for a2, b2 in mins.values())
