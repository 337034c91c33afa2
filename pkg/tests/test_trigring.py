import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from susywire.trigring import (
    DivergenceError,
    HalfInt,
    TrigDomainError,
    TrigPoly,
    add,
    beta_integral,
    canonicalize,
    differentiate,
    eval_at,
    inner_product,
    is_normalizable,
    is_zero,
    mul_monomial,
    scale,
)

H = Fraction(1, 2)


def mono(coeff, a, b):
    return TrigPoly.monomial(coeff, a, b)


# strategies

exps = st.integers(min_value=-2, max_value=8)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6).filter(lambda r: r != 0)


@st.composite
def polys(draw, max_terms=3, half_class=None):
    terms = {}
    cls = draw(st.sampled_from([(0, 0), (1, 1), (1, 0), (0, 1)])) if half_class is None else half_class
    for _ in range(draw(st.integers(1, max_terms))):
        a2 = 2 * draw(exps) + cls[0]
        b2 = 2 * draw(exps) + cls[1]
        terms[(a2, b2)] = draw(coeffs)
    return TrigPoly(terms)


@st.composite
def normalizable_polys(draw):
    terms = {}
    cls = draw(st.sampled_from([(0, 0), (1, 1), (1, 0), (0, 1)]))
    for _ in range(draw(st.integers(1, 3))):
        a2 = 2 * draw(st.integers(0, 5)) + cls[0]
        b2 = 2 * draw(st.integers(0, 5)) + cls[1]
        terms[(a2, b2)] = draw(coeffs)
    return TrigPoly(terms)


# HalfInt


def test_halfint_exact_arithmetic_and_order():
    a, b = HalfInt.parse("3/2"), HalfInt.parse("-1/2")
    assert a.value * 2 == a.twice
    assert (a + b) == HalfInt(2) and str(a + b) == "1"
    assert (a - b) == HalfInt(4)
    assert -a == HalfInt(-3) and abs(b) == HalfInt(1)
    assert b < a and sorted([a, b]) == [b, a]
    assert HalfInt.of(Fraction(5, 2)) == HalfInt(5)
    assert float(HalfInt(-3)) == -1.5


@pytest.mark.parametrize("text", ["1/3", "x", "3/4", ""])
def test_halfint_parse_rejects(text):
    with pytest.raises(ValueError):
        HalfInt.parse(text)


def test_halfint_of_rejects_non_half_integer():
    with pytest.raises(ValueError):
        HalfInt.of(Fraction(1, 3))


# ring operations, worked examples


def test_mul_monomial_tan_shift():
    assert mul_monomial(mono(1, H, Fraction(3, 2)), 1, -1, 1) == mono(1, Fraction(3, 2), H)


def test_additive_inverse():
    p = TrigPoly({(1, 3): 2, (5, -1): Fraction(-1, 3)})
    assert is_zero(add(p, scale(p, -1)))


def test_scale_half():
    q = scale(mono(1, 1, 0), H)
    assert q.terms == ((Fraction(1, 2), HalfInt(2), HalfInt(0)),)


def test_differentiate_examples():
    assert differentiate(mono(1, 1, 0)) == mono(H, 0, 1)
    assert differentiate(TrigPoly.one()).is_zero()
    expected = mono(Fraction(1, 4), -H, Fraction(3, 2)) - mono(Fraction(1, 4), Fraction(3, 2), -H)
    assert differentiate(mono(1, H, H)) == expected


def test_canonicalize_examples():
    assert canonicalize([(1, 2, 0), (1, 0, 2), (-1, 0, 0)]).is_zero()
    p = canonicalize([(1, Fraction(5, 2), H), (1, H, Fraction(5, 2)), (-1, H, H)])
    assert p.is_zero()
    q = mono(1, H, Fraction(3, 2))
    assert canonicalize(q) == q and q.raw_terms == ((1, 3, Fraction(1)),)


def test_canonical_terms_sorted_without_duplicates():
    p = TrigPoly({(3, 1): 1, (1, 3): 2, (1, 1): -1})
    keys = [(a, b) for a, b, _ in p.raw_terms]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert all(c != 0 for _, _, c in p.raw_terms)


def test_eval_examples():
    assert eval_at(mono(1, 1, 1), math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert eval_at(TrigPoly.one(), 1.234) == 1.0
    assert eval_at(mono(1, H, Fraction(3, 2)), math.pi / 2) == pytest.approx(0.5, abs=1e-15)


def test_eval_domain():
    with pytest.raises(TrigDomainError):
        eval_at(mono(1, H, 0), 0.0)
    with pytest.raises(TrigDomainError):
        eval_at(mono(1, -1, 0), np.array([0.5, 4.0]))
    # nonnegative integer exponents are entire: evaluation at the endpoint is allowed
    assert eval_at(mono(1, 2, 0), 0.0) == 0.0


def test_inner_product_examples():
    assert inner_product(TrigPoly.one(), TrigPoly.one()) == pytest.approx(math.pi, rel=1e-15)
    p = mono(1, H, Fraction(3, 2))
    assert inner_product(p, p) == pytest.approx(0.5, rel=1e-15)
    assert is_normalizable(mono(1, -H, H)) is False
    assert is_normalizable(p) is True


def test_inner_product_divergence():
    q = mono(1, -H, 0)
    with pytest.raises(DivergenceError):
        inner_product(q, q)
    with pytest.raises(DivergenceError):
        beta_integral(-2, 0)


@pytest.mark.parametrize("a2,b2", [(0, 0), (1, 3), (3, 5), (-1, 4), (2, 7), (5, -1)])
def test_beta_integral_against_quadrature(a2, b2):
    oracle, _ = quad(lambda b: math.sin(b / 2) ** (a2 / 2) * math.cos(b / 2) ** (b2 / 2), 0, math.pi, limit=200)
    assert beta_integral(a2, b2) == pytest.approx(oracle, rel=1e-9)


def test_exactness_of_coefficients():
    p = TrigPoly({(1, 3): Fraction(1, 3), (3, 1): Fraction(2, 7)})
    for q in (p + p, p * Fraction(5, 11), differentiate(p), p * p, p.shift(2, -2, 3)):
        assert all(isinstance(c, Fraction) for _, _, c in q.raw_terms)


# properties


@settings(max_examples=60, deadline=None)
@given(polys(), st.integers(-3, 3), st.integers(-3, 3))
def test_leibniz_for_monomial_multiplication(p, da2, db2):
    m = TrigPoly({(da2, db2): 1})
    assert differentiate(p * m) == differentiate(p) * m + p * differentiate(m)


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_zero_test_soundness(p, q):
    rng = np.random.default_rng(7)
    betas = rng.uniform(0.1, math.pi - 0.1, 100)
    s2c2 = TrigPoly({(4, 0): 1, (0, 4): 1})  # s^2 + c^2
    candidates = [
        (p * q - q * p, lambda b: eval_at(p, b) * eval_at(q, b) - eval_at(q, b) * eval_at(p, b)),
        ((p + q) * (p - q) - (p * p - q * q), lambda b: (eval_at(p, b) + eval_at(q, b)) * (eval_at(p, b) - eval_at(q, b)) - eval_at(p, b) ** 2 + eval_at(q, b) ** 2),
        (p * s2c2 - p, lambda b: eval_at(p, b) * (np.sin(b / 2) ** 2 + np.cos(b / 2) ** 2) - eval_at(p, b)),
    ]
    for z, numeric in candidates:
        assert z.is_zero()
        vals = numeric(betas)
        size = np.abs(eval_at(p, betas)) + np.abs(eval_at(q, betas)) + 1.0
        assert np.max(np.abs(vals) / size**2) <= 1e-12
    # a nonzero difference must be detected
    bump = TrigPoly({(6, 6): 1})
    assert (p * q + bump) - p * q == bump and not bump.is_zero()


@settings(max_examples=40, deadline=None)
@given(polys())
def test_canonical_form_is_unique(p):
    pyth = TrigPoly({(4, 0): 1, (0, 4): 1})  # s^2 + c^2, equals one
    assert p * pyth == p
    assert hash(p * pyth) == hash(p)
    betas = np.linspace(0.2, math.pi - 0.2, 25)
    np.testing.assert_allclose(eval_at(p * pyth, betas), eval_at(p, betas), rtol=1e-9, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(normalizable_polys(), normalizable_polys())
def test_inner_product_symmetric_positive(p, q):
    assert inner_product(p, q) == pytest.approx(inner_product(q, p), rel=1e-13, abs=1e-15)
    assert inner_product(p, p) > 0
    oracle, _ = quad(lambda b: float(eval_at(p, b)) * float(eval_at(q, b)), 0, math.pi, limit=200)
    assert inner_product(p, q) == pytest.approx(oracle, rel=1e-7, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(polys())
def test_differentiate_matches_finite_difference(p):
    beta = np.linspace(0.4, math.pi - 0.4, 7)
    h = 1e-5
    fd = (eval_at(p, beta + h) - eval_at(p, beta - h)) / (2 * h)
    scale_ = max(1.0, float(np.max(np.abs(fd))))
    np.testing.assert_allclose(eval_at(differentiate(p), beta), fd, atol=1e-6 * scale_)
