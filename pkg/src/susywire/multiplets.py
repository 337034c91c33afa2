"""su(2) multiplets, the energy spectrum and the broken-SUSY diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .operators import (
    SectorParams,
    SpinorState,
    casimir_apply,
    hamiltonian_apply,
    jminus_apply,
    jplus_apply,
    jz_apply,
    spinor_hamiltonian_apply,
    spinor_inner,
    susy_A_apply,
    susy_Adag_apply,
)
from .trigring import HalfInt, TrigPoly, is_normalizable

__all__ = [
    "ConstructionError",
    "Multiplet",
    "SpectrumRow",
    "LadderCheck",
    "BrokenSusyReport",
    "indicial_exponents",
    "build_highest_weight",
    "build_multiplet",
    "ladder_coefficient_check",
    "spectrum_table",
    "broken_susy_report",
    "lattice_matrix",
    "lattice_kernel",
    "sector_levels",
    "state_checks",
    "uniqueness_check",
    "orthogonality_defect",
    "epsilon_of",
]


class ConstructionError(RuntimeError):
    """A multiplet could not be built consistently (convention drift)."""


def _positive_half_odd(j) -> HalfInt:
    j = HalfInt.parse(j) if isinstance(j, str) else HalfInt.of(j)
    if not j.is_half_odd or j.twice < 1:
        raise ValueError(f"j must be a positive half-odd integer, got {j}")
    return j


def epsilon_of(j) -> Fraction:
    """Reduced eigenvalue ``(j + 1/2)**2``."""
    return (HalfInt.of(j).value + Fraction(1, 2)) ** 2


def indicial_exponents(params: SectorParams) -> tuple[HalfInt, HalfInt]:
    """Normalizable endpoint exponents of ``sin(beta/2)`` and ``cos(beta/2)``.

    Near ``beta = 0`` the sector Hamiltonian behaves like
    ``-d^2 + ((jz - sz)^2 - 1/4) / beta^2``; the root ``gamma >= 1/2`` of
    ``gamma (gamma - 1) = (jz - sz)^2 - 1/4`` is kept. Same at ``beta = pi``
    with ``jz + sz``.
    """
    jz, sz = params.jz.value, params.sz
    gamma = abs(jz - sz) + Fraction(1, 2)
    delta = abs(jz + sz) + Fraction(1, 2)
    return HalfInt.of(gamma), HalfInt.of(delta)


def build_highest_weight(j) -> SpinorState:
    """Top state ``Z_{j,j}`` from ``J_+ Z = 0`` and the SUSY partner relation."""
    j = _positive_half_odd(j)
    m = j + 1
    # (-d + a cot - b tan) f = 0  is solved by  f = s^(2a) c^(2b)
    a, b = (m.value - 1) / 2, m.value / 2
    upper = TrigPoly.monomial(1, 2 * a, 2 * b)
    sqrt_eps = j.value + Fraction(1, 2)
    lower = susy_Adag_apply(j, upper) * (1 / sqrt_eps)
    top = SpinorState(j, upper, lower)

    if not jplus_apply(top).is_zero():
        raise ConstructionError(f"J+ does not annihilate the top state of j={j}")
    if spinor_hamiltonian_apply(top).ratio_to(top) != sqrt_eps**2:
        raise ConstructionError(f"top state of j={j} is not an H eigenstate with eps={sqrt_eps**2}")
    if susy_A_apply(j, lower) != upper * sqrt_eps:
        raise ConstructionError(f"SUSY partner relation A Phi- = sqrt(eps) Phi+ fails for j={j}")
    return top


@dataclass(frozen=True)
class Multiplet:
    j: HalfInt
    states: dict[HalfInt, SpinorState] = field(compare=False)
    epsilon: Fraction

    @property
    def degeneracy(self) -> int:
        return len(self.states)

    @property
    def labels(self) -> list[HalfInt]:
        return sorted(self.states)

    def __getitem__(self, jz) -> SpinorState:
        return self.states[HalfInt.parse(jz) if isinstance(jz, str) else HalfInt.of(jz)]


def build_multiplet(j) -> Multiplet:
    """Highest weight, then ``2j`` applications of ``J_-``, then sign fixing."""
    j = _positive_half_odd(j)
    eps = epsilon_of(j)
    chain = [build_highest_weight(j)]
    for _ in range(j.twice):
        chain.append(jminus_apply(chain[-1]))

    bottom = chain[-1]
    if bottom.is_zero() or not jminus_apply(bottom).is_zero():
        raise ConstructionError(f"J- chain of j={j} does not terminate after 2j+1 states")

    # Condon-Shortley: J+ Z_{jz} must be a positive multiple of Z_{jz+1}.
    for idx in range(1, len(chain)):
        r = jplus_apply(chain[idx]).ratio_to(chain[idx - 1])
        if r is None or r == 0:
            raise ConstructionError(f"J+ Z[{chain[idx].jz}] is not proportional to Z[{chain[idx - 1].jz}]")
        if r < 0:
            chain[idx] = chain[idx].scaled(-1)

    for Z in chain:
        if spinor_hamiltonian_apply(Z).ratio_to(Z) != eps:
            raise ConstructionError(f"state jz={Z.jz} of j={j} is not an H eigenstate")
    return Multiplet(j=j, states={Z.jz: Z for Z in chain}, epsilon=eps)


def state_checks(Z: SpinorState, j: HalfInt, eps: Fraction) -> dict[str, bool]:
    """Exact eigen- and algebra relations for one multiplet state."""
    jz = Z.jz.value
    jv = j.value
    H = spinor_hamiltonian_apply(Z)
    up, down = jplus_apply(Z), jminus_apply(Z)
    label, same = jz_apply(Z)
    quarter = Fraction(1, 4)

    def jz_of(state: SpinorState) -> SpinorState:
        return state.scaled(jz_apply(state)[0].value)

    return {
        "H_eigen": H == Z.scaled(eps),
        "casimir": casimir_apply(Z) == Z.scaled(jv * (jv + 1)),
        "jz_eigen": label == Z.jz and same is Z,
        "comm_plus_minus": jplus_apply(down) - jminus_apply(up) == Z.scaled(2 * jz),
        "comm_z_plus": jz_of(up) - jplus_apply(jz_of(Z)) == up,
        "comm_z_minus": jz_of(down) - jminus_apply(jz_of(Z)) == down.scaled(-1),
        "prod_minus_plus": jminus_apply(up) == H - Z.scaled((jz + Fraction(1, 2)) ** 2),
        "prod_plus_minus": jplus_apply(down) == H - Z.scaled((jz - Fraction(1, 2)) ** 2),
        "H_is_casimir_plus_quarter": H == casimir_apply(Z) + Z.scaled(quarter),
    }


class LadderCheck(NamedTuple):
    jz: HalfInt
    ratio: float
    expected: float
    deviation: float


def ladder_coefficient_check(m: Multiplet) -> list[LadderCheck]:
    """Norm ratio ``|J_+ Z| / |Z|`` against ``sqrt(j(j+1) - jz(jz+1))``."""
    out = []
    jv = m.j.value
    for jz in m.labels:
        if jz == m.j:
            continue
        Z = m.states[jz]
        raised = jplus_apply(Z)
        ratio = math.sqrt(spinor_inner(raised, raised) / spinor_inner(Z, Z))
        expected = math.sqrt(jv * (jv + 1) - jz.value * (jz.value + 1))
        out.append(LadderCheck(jz, ratio, expected, abs(ratio - expected)))
    return out


class SpectrumRow(NamedTuple):
    j: HalfInt
    epsilon: Fraction
    E_tilde: float
    E_total: float
    degeneracy: int


def spectrum_table(j_max, G: float, k: int = 0, L: float = 1.0) -> list[SpectrumRow]:
    """Levels ``j = 1/2 .. j_max`` with ``E~_j = -G^2 / (2 (j+1/2)^2)``.

    ``E_total`` adds the longitudinal offset ``2 pi k^2 / L^2`` exactly as
    the reduced energy was defined (``E~ = E - 2 pi k^2 / L^2``).
    """
    j_max = _positive_half_odd(j_max)
    if not G > 0:
        raise ValueError(f"G must be positive, got {G}")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    offset = 2 * math.pi * k * k / (L * L)
    rows = []
    for twice in range(1, j_max.twice + 1, 2):
        j = HalfInt(twice)
        eps = epsilon_of(j)
        e_tilde = -(G * G) / (2 * float(eps))
        rows.append(SpectrumRow(j, eps, e_tilde, e_tilde + offset, twice + 1))
    return rows


# exact tridiagonal restriction of H to an exponent lattice


def lattice_matrix(params: SectorParams, width: int) -> tuple[list[TrigPoly], list[list[Fraction]]]:
    """Matrix of ``H`` on ``s^(g+2k) c^(d+2(N-k))``, ``k = 0..N``, ``N = width - 1``.

    ``H`` keeps ``a + b`` fixed and moves ``a`` by ``-2, 0, +2``; the outward
    coefficients vanish at both lattice ends, so the span is invariant.
    Column ``k`` holds the image of basis monomial ``k``.
    """
    if width < 1:
        raise ValueError("lattice width must be positive")
    gamma, delta = (x.value for x in indicial_exponents(params))
    jz, sz = params.jz.value, params.sz
    half = Fraction(1, 2)
    X = (jz - sz + half) * (jz - sz - half)
    Y = (jz + sz + half) * (jz + sz - half)
    N = width - 1
    sigma = gamma + delta + 2 * N
    basis = []
    M = [[Fraction(0)] * width for _ in range(width)]
    for k in range(width):
        a = gamma + 2 * k
        b = sigma - a
        basis.append(TrigPoly.monomial(1, a, b))
        if k > 0:
            M[k - 1][k] = (X - a * (a - 1)) / 4
        M[k][k] = (2 * a * b + a + b + X + Y) / 4
        if k < N:
            M[k + 1][k] = (Y - b * (b - 1)) / 4
    for k, mono in enumerate(basis):
        image = TrigPoly.zero()
        for i in range(width):
            if M[i][k]:
                image = image + basis[i] * M[i][k]
        if hamiltonian_apply(params, mono) != image:
            raise ConstructionError(f"lattice matrix column {k} disagrees with H for {params}")
    return basis, M


def _nullspace(M: list[list[Fraction]]) -> list[list[Fraction]]:
    rows, cols = len(M), len(M[0]) if M else 0
    A = [list(r) for r in M]
    pivots = []
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][col]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        basis.append(v)
    return basis


def lattice_kernel(params: SectorParams, eps: Fraction, width: int) -> list[TrigPoly]:
    """Exact eigenfunctions of ``H`` with eigenvalue ``eps`` on the lattice."""
    basis, M = lattice_matrix(params, width)
    shifted = [[M[i][k] - (eps if i == k else 0) for k in range(width)] for i in range(width)]
    out = []
    for vec in _nullspace(shifted):
        poly = TrigPoly.zero()
        for coeff, mono in zip(vec, basis):
            if coeff:
                poly = poly + mono * coeff
        out.append(poly)
    return out


def sector_levels(params: SectorParams, count: int) -> list[Fraction]:
    """The lowest ``count`` exact eigenvalues of a sector, each confirmed by a lattice kernel."""
    gamma, delta = indicial_exponents(params)
    base = (gamma.value + delta.value) / 2
    levels = [(base + n) ** 2 for n in range(count)]
    for eps in levels:
        if len(lattice_kernel(params, eps, count)) != 1:
            raise ConstructionError(f"level {eps} of {params} has no unique lattice eigenfunction")
    return levels


def uniqueness_check(m: Multiplet) -> dict[tuple[HalfInt, str], bool]:
    """Kernel of ``H - eps`` on a width ``2j + 4`` lattice is one-dimensional and spanned by the state."""
    width = m.j.twice + 4
    out = {}
    for jz, Z in m.states.items():
        for sign, comp in (("+", Z.upper), ("-", Z.lower)):
            kernel = lattice_kernel(SectorParams(jz, sign), m.epsilon, width)
            out[(jz, sign)] = len(kernel) == 1 and comp.ratio_to(kernel[0]) not in (None, 0)
    return out


def orthogonality_defect(a: Multiplet, b: Multiplet, jz) -> float:
    """Normalized spinor overlap of the ``jz`` states of two multiplets."""
    jz = HalfInt.of(jz)
    Za, Zb = a.states[jz], b.states[jz]
    return abs(spinor_inner(Za, Zb)) / math.sqrt(spinor_inner(Za, Za) * spinor_inner(Zb, Zb))


@dataclass(frozen=True)
class BrokenSusyReport:
    jz: HalfInt
    zero_mode_minus: TrigPoly
    zero_mode_plus: TrigPoly
    annihilated: bool
    normalizable_minus: bool
    normalizable_plus: bool
    divergent_endpoint: str
    levels_plus: list[Fraction]
    levels_minus: list[Fraction]
    no_zero_mode: bool

    @property
    def spectra_coincide(self) -> bool:
        return self.levels_plus == self.levels_minus

    @property
    def broken(self) -> bool:
        return (
            self.annihilated
            and not self.normalizable_minus
            and not self.normalizable_plus
            and self.spectra_coincide
            and self.no_zero_mode
        )


def broken_susy_report(jz, levels: int = 4) -> BrokenSusyReport:
    """Check that neither partner Hamiltonian has a normalizable zero mode.

    ``A psi = 0`` is solved by ``psi = s^(-jz) c^(jz)`` and ``A_dag phi = 0``
    by ``phi = s^(jz) c^(-jz)``. For half-odd ``jz`` one exponent is always
    ``<= -1/2``, so neither is square integrable and the exact spectra of
    ``H_+`` and ``H_-`` coincide with no unpaired ground state.
    """
    params_p = SectorParams(jz, "+")
    jz = params_p.jz
    params_m = SectorParams(jz, "-")
    psi = TrigPoly.monomial(1, -jz, jz)
    phi = TrigPoly.monomial(1, jz, -jz)
    annihilated = susy_A_apply(jz, psi).is_zero() and susy_Adag_apply(jz, phi).is_zero()
    width = levels + 2
    no_zero = not lattice_kernel(params_p, Fraction(0), width) and not lattice_kernel(params_m, Fraction(0), width)
    return BrokenSusyReport(
        jz=jz,
        zero_mode_minus=psi,
        zero_mode_plus=phi,
        annihilated=annihilated,
        normalizable_minus=is_normalizable(psi),
        normalizable_plus=is_normalizable(phi),
        divergent_endpoint="beta=0" if jz.twice > 0 else "beta=pi",
        levels_plus=sector_levels(params_p, levels),
        levels_minus=sector_levels(params_m, levels),
        no_zero_mode=no_zero,
    )
