import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expapprox import padic as pa


def test_val_factorial():
    assert pa.val_factorial(3, 9) == 4
    assert pa.val_factorial(7, 0) == 0
    assert pa.val_factorial(2, 4) == 3


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 400))
def test_val_factorial_matches_legendre_sum(p, k):
    import math
    assert pa.val_factorial(p, k) == pa.val_int(p, math.factorial(k)) if k else True


def test_val_rational():
    assert pa.val_rational(3, Fraction(9, 2)) == 2
    assert pa.val_rational(3, Fraction(2, 27)) == -3
    assert pa.val_rational(5, 0) == float("inf")


def test_delta_compare():
    assert pa.delta_compare(3, 1) == -1       # p^-1 < delta: converges
    assert pa.delta_compare(2, 1) == 0        # boundary, not convergent
    assert pa.delta_compare(2, 2) == -1


def test_padic_exp_values():
    assert pa.padic_exp(pa.PAdicContext(3, 2), 3).residue == 4
    assert pa.padic_exp(pa.PAdicContext(3, 4), 0).residue == 1
    with pytest.raises(pa.DivergenceError):
        pa.padic_exp(pa.PAdicContext(3, 3), 1)
    with pytest.raises(pa.DivergenceError):
        pa.padic_exp(pa.PAdicContext(2, 4), Fraction(2))  # |2|_2 on the boundary


def test_factorial_sandwich():
    # delta^k <= |k!|_p <= p^2 k delta^k in exponent arithmetic
    for p in (2, 3, 5, 7):
        dexp = pa.delta_exponent(p)
        for k in range(0, 201):
            v = Fraction(pa.val_factorial(p, k))
            assert v >= 0
            assert pa.bounded_by(p, pa.LogAbs(v), pa.LogAbs(dexp * k), scale=max(1, p * p * k))
            assert pa.bounded_by(p, pa.LogAbs(dexp * k), pa.LogAbs(v))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 6), st.integers(1, 6), st.integers(2, 24))
def test_exp_homomorphism(p, i, j, k):
    a, b = Fraction(i * p), Fraction(j * p)
    ctx = pa.PAdicContext(p, k)
    ea = pa.padic_exp(ctx, a).residue
    eb = pa.padic_exp(ctx, b).residue
    eab = pa.padic_exp(ctx, a + b).residue
    assert ea * eb % p ** k == eab


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(2, 12), st.integers(1, 12))
def test_exp_precision_refinement(p, mult, k, extra):
    alpha = Fraction(mult * (4 if p == 2 else p))
    lo = pa.padic_exp(pa.PAdicContext(p, k), alpha).residue
    hi = pa.padic_exp(pa.PAdicContext(p, k + extra), alpha).residue
    assert hi % p ** k == lo


def test_exact_valuation_reporting():
    x = pa.PAdicApprox(3, 4, 18)
    assert x.exact_valuation == 2
    assert pa.PAdicApprox(3, 4, 81).exact_valuation is None


def test_bounds_report_example():
    rep = pa.check_ultrametric_bounds((0, 3), (2, 2), 1, 2, pa.PAdicContext(3, 16))
    assert rep.plain == pa.HOLDS
    assert rep.factorial == pa.HOLDS
    assert rep.mixed == pa.HOLDS
    assert rep.all_hold


def test_bounds_mixed_skipped_when_far():
    # |0 - 1|_5 = 1 >= delta: the mixed estimate does not apply
    rep = pa.check_ultrametric_bounds((0, 1), (2, 1), 1, 2, pa.PAdicContext(5, 8))
    assert rep.mixed == pa.SKIPPED
    assert rep.factorial == pa.HOLDS


def _random_instance(rng):
    p = rng.choice([2, 3, 5, 7])
    s = rng.randint(2, 4)
    step = 4 if p == 2 else p
    # mix of p-adically close and unit-distance points, p-integral
    base = Fraction(rng.randint(-6, 6), rng.choice([1, 1, 2, 3, 5, 7, 11]) if p != 2 else 1)
    while base.denominator % p == 0:
        base = Fraction(rng.randint(-6, 6))
    alphas = {base}
    while len(alphas) < s:
        if rng.random() < 0.6:
            alphas.add(base + step * rng.randint(1, 9))
        else:
            alphas.add(base + rng.randint(1, 9))
    alphas = tuple(alphas)
    n = tuple(rng.randint(0, 4) for _ in range(s))
    i, j = rng.sample(range(1, s + 1), 2)
    return alphas, n, i, j, p


@pytest.mark.parametrize("seed", range(100))
def test_bounds_random_suite(seed):
    rng = random.Random(1000 + seed)
    alphas, n, i, j, p = _random_instance(rng)
    rep = pa.check_ultrametric_bounds_auto(alphas, n, i, j, p)
    assert rep.all_hold, (alphas, n, i, j, p, rep)
