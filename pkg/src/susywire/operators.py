"""Exact SUSY and ladder operators acting on ring elements and spinors.

Conventions (``s = sin(beta/2)``, ``c = cos(beta/2)``, ``d = d/dbeta``):

* superpotential ``W_jz = (jz/2)(tan(beta/2) + cot(beta/2)) = jz / sin(beta)``
* ``A = d + W``, ``A_dag = -d + W``; ``H_+ = A A_dag`` acts on the upper
  radial component, ``H_- = A_dag A`` on the lower one.
* ladder multipliers ``k_upper(m) = ((m-1)/2) cot - (m/2) tan`` and
  ``k_lower(m) = (m/2) cot - ((m-1)/2) tan``.  ``J_+`` raises ``jz`` with
  ``-d + k(jz+1)`` on each component and ``J_-`` lowers it with
  ``d + k(jz)``.  With these choices

      (-d + k(jz)) (d + k(jz))     = H_jz - (jz - 1/2)**2
      (d + k(jz+1)) (-d + k(jz+1)) = H_jz - (jz + 1/2)**2

  hold as exact operator identities in both components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .trigring import HalfInt, TrigPoly, differentiate, inner_product

__all__ = [
    "OperatorConsistencyError",
    "SectorParams",
    "SpinorState",
    "superpotential_W",
    "potential",
    "susy_A_apply",
    "susy_Adag_apply",
    "hamiltonian_apply",
    "hamiltonian_direct",
    "hamiltonian_composed",
    "ladder_k",
    "raise_component",
    "lower_component",
    "jplus_apply",
    "jminus_apply",
    "jz_apply",
    "casimir_apply",
    "spinor_hamiltonian_apply",
    "spinor_inner",
]

Sign = Literal["+", "-"]
Family = Literal["upper", "lower"]

_TAN = TrigPoly({(2, -2): 1})
_COT = TrigPoly({(-2, 2): 1})
_CSC2 = TrigPoly({(-4, 0): 1})
_SEC2 = TrigPoly({(0, -4): 1})


class OperatorConsistencyError(AssertionError):
    """Two independent constructions of the same operator disagree."""


def _half_odd(jz: HalfInt | str | Fraction | int) -> HalfInt:
    jz = HalfInt.parse(jz) if isinstance(jz, str) else HalfInt.of(jz)
    if not jz.is_half_odd:
        raise ValueError(f"jz must be half-odd, got {jz}")
    return jz


@dataclass(frozen=True)
class SectorParams:
    """Angular sector: ``jz`` and which spinor component (``+`` upper, ``-`` lower)."""

    jz: HalfInt
    sz_sign: Sign

    def __post_init__(self) -> None:
        object.__setattr__(self, "jz", _half_odd(self.jz))
        if self.sz_sign not in ("+", "-"):
            raise ValueError(f"sz_sign must be '+' or '-', got {self.sz_sign!r}")

    @property
    def sz(self) -> Fraction:
        return Fraction(1, 2) if self.sz_sign == "+" else Fraction(-1, 2)


@dataclass(frozen=True)
class SpinorState:
    """Radial spinor ``(Phi+, Phi-)`` carrying the ``J_z`` label.

    The angular factors ``exp(i(jz -+ 1/2) theta)`` are implicit.
    """

    jz: HalfInt
    upper: TrigPoly
    lower: TrigPoly

    @classmethod
    def zero(cls, jz: HalfInt) -> "SpinorState":
        return cls(jz, TrigPoly.zero(), TrigPoly.zero())

    def is_zero(self) -> bool:
        return self.upper.is_zero() and self.lower.is_zero()

    def scaled(self, r: Fraction | int) -> "SpinorState":
        return SpinorState(self.jz, self.upper * r, self.lower * r)

    def __add__(self, other: "SpinorState") -> "SpinorState":
        if self.jz != other.jz:
            raise ValueError(f"cannot add spinors with jz {self.jz} and {other.jz}")
        return SpinorState(self.jz, self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other: "SpinorState") -> "SpinorState":
        return self + other.scaled(-1)

    def ratio_to(self, other: "SpinorState") -> Fraction | None:
        """Return ``r`` with ``self == r * other`` (both components), or None."""
        if self.jz != other.jz:
            return None
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        ref_self, ref_other = (self.upper, other.upper) if other.upper else (self.lower, other.lower)
        r = ref_self.ratio_to(ref_other)
        if r is None or self != other.scaled(r):
            return None
        return r


def superpotential_W(jz) -> TrigPoly:
    """Multiplier ``(jz/2)(s/c + c/s)``."""
    jz = _half_odd(jz)
    half = jz.value / 2
    return TrigPoly({(2, -2): half, (-2, 2): half})


def susy_A_apply(jz, p: TrigPoly) -> TrigPoly:
    return differentiate(p) + superpotential_W(jz) * p


def susy_Adag_apply(jz, p: TrigPoly) -> TrigPoly:
    return superpotential_W(jz) * p - differentiate(p)


def potential(params: SectorParams) -> TrigPoly:
    """First Poschl-Teller potential of the sector as a ring element."""
    jz, sz = params.jz.value, params.sz
    half = Fraction(1, 2)
    csc_coef = (jz - sz + half) * (jz - sz - half) / 4
    sec_coef = (jz + sz + half) * (jz + sz - half) / 4
    return _CSC2 * csc_coef + _SEC2 * sec_coef


def hamiltonian_composed(params: SectorParams, p: TrigPoly) -> TrigPoly:
    if params.sz_sign == "+":
        return susy_A_apply(params.jz, susy_Adag_apply(params.jz, p))
    return susy_Adag_apply(params.jz, susy_A_apply(params.jz, p))


def hamiltonian_direct(params: SectorParams, p: TrigPoly) -> TrigPoly:
    return potential(params) * p - differentiate(differentiate(p))


def hamiltonian_apply(params: SectorParams, p: TrigPoly) -> TrigPoly:
    """Apply ``H_{jz;+-}`` via composition and via the potential; they must agree."""
    composed = hamiltonian_composed(params, p)
    direct = hamiltonian_direct(params, p)
    if composed != direct:
        raise OperatorConsistencyError(
            f"H[{params.jz};{params.sz_sign}] composition and potential routes differ on {p}"
        )
    return composed


def ladder_k(family: Family, m) -> TrigPoly:
    m = _half_odd(m).value
    if family == "upper":
        cot_coef, tan_coef = (m - 1) / 2, m / 2
    elif family == "lower":
        cot_coef, tan_coef = m / 2, (m - 1) / 2
    else:
        raise ValueError(f"family must be 'upper' or 'lower', got {family!r}")
    return _COT * cot_coef - _TAN * tan_coef


def raise_component(family: Family, m, p: TrigPoly) -> TrigPoly:
    """``(-d + k_family(m)) p``: the B-type factor."""
    return ladder_k(family, m) * p - differentiate(p)


def lower_component(family: Family, m, p: TrigPoly) -> TrigPoly:
    """``(d + k_family(m)) p``: the B-dagger-type factor."""
    return ladder_k(family, m) * p + differentiate(p)


def jplus_apply(Z: SpinorState) -> SpinorState:
    m = Z.jz + 1
    return SpinorState(m, raise_component("upper", m, Z.upper), raise_component("lower", m, Z.lower))


def jminus_apply(Z: SpinorState) -> SpinorState:
    m = Z.jz
    return SpinorState(m - 1, lower_component("upper", m, Z.upper), lower_component("lower", m, Z.lower))


def jz_apply(Z: SpinorState) -> tuple[HalfInt, SpinorState]:
    return Z.jz, Z


def casimir_apply(Z: SpinorState) -> SpinorState:
    """``J^2 = J_- J_+ + J_z (J_z + 1)``."""
    jz = Z.jz.value
    return jminus_apply(jplus_apply(Z)) + Z.scaled(jz * (jz + 1))


def spinor_hamiltonian_apply(Z: SpinorState) -> SpinorState:
    """Matrix Hamiltonian ``diag(H_+, H_-)`` at the spinor's own ``jz``."""
    return SpinorState(
        Z.jz,
        hamiltonian_apply(SectorParams(Z.jz, "+"), Z.upper),
        hamiltonian_apply(SectorParams(Z.jz, "-"), Z.lower),
    )


def spinor_inner(Z: SpinorState, Y: SpinorState) -> float:
    """Radial part of the spinor inner product (the 2 pi from theta is dropped)."""
    if Z.jz != Y.jz:
        return 0.0
    return inner_product(Z.upper, Y.upper) + inner_product(Z.lower, Y.lower)
