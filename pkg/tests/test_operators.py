import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from susywire import operators
from susywire.operators import (
    OperatorConsistencyError,
    SectorParams,
    SpinorState,
    casimir_apply,
    hamiltonian_apply,
    hamiltonian_composed,
    hamiltonian_direct,
    jminus_apply,
    jplus_apply,
    jz_apply,
    ladder_k,
    lower_component,
    raise_component,
    spinor_hamiltonian_apply,
    spinor_inner,
    superpotential_W,
    susy_A_apply,
    susy_Adag_apply,
)
from susywire.trigring import HalfInt, TrigPoly, eval_at, inner_product

H = Fraction(1, 2)
JZ_VALUES = [HalfInt(t) for t in (1, -1, 3, -3, 5, -5)]


def mono(coeff, a, b):
    return TrigPoly.monomial(coeff, a, b)


def z_half_half():
    return SpinorState(HalfInt(1), mono(1, H, Fraction(3, 2)), mono(1, Fraction(3, 2), H))


def random_monomials(seed, count=20):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        a2 = rng.randrange(-5, 12)
        b2 = rng.randrange(-5, 12)
        out.append(TrigPoly({(a2, b2): Fraction(rng.randint(1, 9), rng.randint(1, 5))}))
    return out


def test_sector_params_validation():
    assert SectorParams(HalfInt(1), "+").sz == H
    with pytest.raises(ValueError):
        SectorParams(HalfInt(2), "+")
    with pytest.raises(ValueError):
        SectorParams(HalfInt(1), "0")


def test_superpotential_examples():
    w = superpotential_W(HalfInt(1)) * TrigPoly.one()
    assert w == TrigPoly({(2, -2): Fraction(1, 4), (-2, 2): Fraction(1, 4)})
    assert eval_at(w, math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert eval_at(superpotential_W(HalfInt(-3)), math.pi / 2) == pytest.approx(-1.5, abs=1e-15)


def test_superpotential_is_jz_over_sin():
    for jz in JZ_VALUES:
        for beta in (0.3, 1.1, 2.7):
            assert eval_at(superpotential_W(jz), beta) == pytest.approx(float(jz) / math.sin(beta), rel=1e-14)


def test_susy_A_examples():
    jz = HalfInt(1)
    assert susy_Adag_apply(jz, mono(1, H, Fraction(3, 2))) == mono(1, Fraction(3, 2), H)
    assert susy_A_apply(jz, mono(1, Fraction(3, 2), H)) == mono(1, H, Fraction(3, 2))
    assert susy_A_apply(HalfInt(5), TrigPoly.zero()).is_zero()


def test_hamiltonian_examples():
    p = mono(1, H, Fraction(3, 2))
    assert hamiltonian_apply(SectorParams(HalfInt(1), "+"), p) == p
    q = mono(1, Fraction(3, 2), H)
    assert hamiltonian_apply(SectorParams(HalfInt(1), "-"), q) == q
    r = mono(1, Fraction(3, 2), Fraction(5, 2))
    params = SectorParams(HalfInt(3), "+")
    assert hamiltonian_composed(params, r) == hamiltonian_direct(params, r)


def test_hamiltonian_consistency_error(monkeypatch):
    wrong = lambda params: TrigPoly({(-4, 0): 7})  # noqa: E731
    monkeypatch.setattr(operators, "potential", wrong)
    with pytest.raises(OperatorConsistencyError):
        hamiltonian_apply(SectorParams(HalfInt(1), "+"), mono(1, H, Fraction(3, 2)))


def test_ladder_k_examples():
    assert ladder_k("upper", HalfInt(3)) == TrigPoly({(-2, 2): Fraction(1, 4), (2, -2): Fraction(-3, 4)})
    assert ladder_k("lower", HalfInt(3)) == TrigPoly({(-2, 2): Fraction(3, 4), (2, -2): Fraction(-1, 4)})
    with pytest.raises(ValueError):
        ladder_k("sideways", HalfInt(3))


@pytest.mark.parametrize("jz", JZ_VALUES, ids=str)
def test_factorizations_on_random_monomials(jz):
    for family, sign in (("upper", "+"), ("lower", "-")):
        params = SectorParams(jz, sign)
        for p in random_monomials(jz.twice * 31 + (sign == "+")):
            Hp = hamiltonian_apply(params, p)
            # with m = jz:   (-d + k(m)) (d + k(m)) = H - (jz - 1/2)^2
            lhs = raise_component(family, jz, lower_component(family, jz, p))
            assert lhs == Hp - p * (jz.value - H) ** 2
            # with m = jz+1: (d + k(m)) (-d + k(m)) = H - (jz + 1/2)^2
            m = jz + 1
            lhs = lower_component(family, m, raise_component(family, m, p))
            assert lhs == Hp - p * (jz.value + H) ** 2
            # SUSY pair: A A_dag - A_dag A = H_+ - H_-, both routes of H agree
            assert susy_A_apply(jz, susy_Adag_apply(jz, p)) == hamiltonian_direct(SectorParams(jz, "+"), p)
            assert susy_Adag_apply(jz, susy_A_apply(jz, p)) == hamiltonian_direct(SectorParams(jz, "-"), p)


def test_literal_printed_k_fails_factorization():
    """The uncorrected multiplier (jz/2)(cot - tan) does not factorize H_+ (kept as a guard)."""
    jz = HalfInt(3)
    k = TrigPoly({(-2, 2): jz.value / 2, (2, -2): -jz.value / 2})
    p = mono(1, Fraction(3, 2), Fraction(5, 2))
    lhs = k * (k * p + p.diff()) - (k * p + p.diff()).diff()
    rhs = hamiltonian_apply(SectorParams(jz, "+"), p) - p * (jz.value - H) ** 2
    assert lhs != rhs


def test_jplus_jminus_examples():
    Z = z_half_half()
    assert jplus_apply(Z).is_zero() and jplus_apply(Z).jz == HalfInt(3)
    down = jminus_apply(Z)
    assert down.jz == HalfInt(-1)
    assert down.upper == mono(-1, Fraction(3, 2), H)
    assert down.lower == mono(1, H, Fraction(3, 2))
    assert math.sqrt(spinor_inner(down, down) / spinor_inner(Z, Z)) == pytest.approx(1.0, rel=1e-14)
    assert jplus_apply(SpinorState.zero(HalfInt(1))).is_zero()


def test_jz_apply_bookkeeping():
    Z = z_half_half()
    label, same = jz_apply(Z)
    assert label == HalfInt(1) and same is Z
    assert jz_apply(jplus_apply(Z))[0] == HalfInt(3)
    assert jz_apply(jminus_apply(Z))[0] == HalfInt(-1)


def test_casimir_examples():
    Z = z_half_half()
    assert casimir_apply(Z) == Z.scaled(Fraction(3, 4))
    down = jminus_apply(Z)
    assert casimir_apply(down) == down.scaled(Fraction(3, 4))
    for state in (Z, down):
        assert spinor_hamiltonian_apply(state) == casimir_apply(state) + state.scaled(Fraction(1, 4))
        assert spinor_hamiltonian_apply(state) == state


def test_spinor_algebra():
    Z = z_half_half()
    assert (Z - Z).is_zero()
    assert Z.scaled(3).ratio_to(Z) == 3
    assert jminus_apply(Z).ratio_to(Z) is None
    with pytest.raises(ValueError):
        Z + jminus_apply(Z)
    assert spinor_inner(Z, jminus_apply(Z)) == 0.0


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(JZ_VALUES),
    st.integers(0, 3),
    st.integers(0, 3),
    st.integers(0, 3),
    st.integers(0, 3),
    st.sampled_from([(1, 1), (1, 3), (3, 1), (0, 0), (2, 2)]),
)
def test_formal_adjointness(jz, a, b, c, d, offset):
    # exponents at least 2 at both ends so boundary terms vanish
    p = TrigPoly({(2 * a + 4 + offset[0] % 2, 2 * b + 4 + offset[1] % 2): 1})
    q = TrigPoly({(2 * c + 4 + offset[0] % 2, 2 * d + 4 + offset[1] % 2): Fraction(1, 3)})
    lhs = inner_product(susy_A_apply(jz, p), q)
    rhs = inner_product(p, susy_Adag_apply(jz, q))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
