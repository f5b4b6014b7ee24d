import math
from fractions import Fraction

import pytest

from expapprox import cf

E3_PREFIX = [20, 11, 1, 2, 4, 3, 1, 5, 1, 2, 16]


def test_cascade_matrix_values():
    assert cf.cascade_matrix(1, 3) == (-2, 1, 1, 4)
    assert cf.cascade_matrix(2, 3) == (0, 3, 3, 6)
    assert cf.cascade_matrix(1, Fraction(1, 2)) == (1, 2, 2, 3)
    with pytest.raises(ValueError):
        cf.cascade_matrix(1, 0)


def test_domain_membership():
    assert cf.in_domain((0, 1, 1, 4))
    assert not cf.in_domain((-2, 1, 1, 4))
    assert not cf.in_domain((1, 2, 2, 4))  # t u' = t' u


def test_is_reduced():
    assert cf.is_reduced((0, 1, 1, 4))
    assert cf.is_reduced((3, 12, 0, 27))
    assert not cf.is_reduced((2, 5, 3, 7))
    with pytest.raises(ValueError):
        cf.is_reduced((5, 2, 3, 7))


def test_extract_quotients():
    red, qs = cf.extract_quotients((2, 5, 3, 7))
    assert red == (1, 2, 1, 3) and qs == [2]
    red, qs = cf.extract_quotients((3, 12, 0, 27))
    assert red == (3, 12, 0, 27) and qs == []
    # reconstruction: original = reduced * (0 1 / 1 a_k) ... (0 1 / 1 a_1)
    m = (8, 21, 13, 34)
    red, qs = cf.extract_quotients(m)
    assert cf.mat_mul(red, cf.quotient_matrix_product(qs)) == m


def test_domain_closed_under_multiplication():
    ms = [(2, 5, 3, 7), (0, 1, 1, 4), (1, 4, 0, 9), (8, 21, 13, 34)]
    for a in ms:
        for b in ms:
            assert cf.in_domain(cf.mat_mul(a, b))


def test_stream_prefixes():
    assert list(cf.stream_cf(3, count=11)) == E3_PREFIX
    assert list(cf.stream_cf(1, count=10)) == [2, 1, 2, 1, 1, 4, 1, 1, 6, 1]
    # e^{1/2} = [1; 1,1,1,5,1,1,9,...] (Hurwitz pattern)
    assert list(cf.stream_cf(Fraction(1, 2), count=11)) == [1, 1, 1, 1, 5, 1, 1, 9, 1, 1, 13]


def _cf_of_interval(lo: Fraction, hi: Fraction, count: int) -> list[int]:
    """Shared partial quotients of every number in [lo, hi]: an independent oracle."""
    out = []
    for _ in range(count):
        flo, fhi = math.floor(lo), math.floor(hi)
        if flo != fhi:
            break
        out.append(flo)
        lo, hi = 1 / (hi - fhi), 1 / (lo - flo)
        if lo > hi:
            lo, hi = hi, lo
    return out


@pytest.mark.parametrize("alpha,count", [(Fraction(2), 25), (Fraction(3), 25),
                                         (Fraction(1, 3), 25), (Fraction(5, 2), 20),
                                         (Fraction(5), 20), (Fraction(7, 2), 20)])
def test_stream_against_interval_oracle(alpha, count):
    from expapprox.minima import exp_interval
    iv = exp_interval(alpha, bits=220)
    oracle = _cf_of_interval(iv.lo, iv.hi, count)
    assert len(oracle) >= count
    assert list(cf.stream_cf(alpha, count=count)) == oracle[:count]


def test_step_reconstruction_200():
    alpha = Fraction(3)
    state = cf.initial_state(alpha)
    raw = cf.IDENT
    for i in range(1, state.n + 1):
        raw = cf.mat_mul(cf.cascade_matrix(i, alpha), raw)
    emitted = list(state.pending)
    for _ in range(200):
        emitted.extend(cf.step(state, alpha))
        raw = cf.mat_mul(cf.cascade_matrix(state.n, alpha), raw)
        scaled = cf.mat_mul(state.reduced, cf.quotient_matrix_product(emitted))
        assert tuple(state.content * x for x in scaled) == raw
        assert cf.in_domain(state.reduced) and cf.is_reduced(state.reduced)


def test_batching_independence():
    # multiplying several cascade factors before extraction gives the same stream
    alpha = Fraction(3)
    state = cf.initial_state(alpha)
    stepped = list(state.pending)
    for _ in range(120):
        stepped.extend(cf.step(state, alpha))
    m = cf.IDENT
    for i in range(1, state.n + 1):
        m = cf.mat_mul(cf.cascade_matrix(i, alpha), m)
        m, _ = cf.strip_content(m)
    _, batched = cf.extract_quotients(m)
    k = min(len(stepped), len(batched))
    assert stepped[:k] == batched[:k] and k > 50


def test_quotient_count_monotone():
    state = cf.initial_state(Fraction(3))
    last = state.emitted
    for _ in range(60):
        cf.step(state, Fraction(3))
        assert state.emitted >= last
        last = state.emitted


def test_log_q_drift_against_exact():
    # float tracking of ln(q) stays within 1e-6 * n of the exact value
    q_prev, q_prev2 = 1, 0
    log_q, ratio = 0.0, 0.0
    n = 0
    for a in cf.stream_cf(3, count=3000):
        if n >= 1:
            log_q += math.log(a + ratio)
            ratio = 1.0 / (a + ratio)
            q_prev, q_prev2 = a * q_prev + q_prev2, q_prev
            if n % 1000 == 0:
                assert abs(log_q - math.log(q_prev)) <= 1e-6 * n
        n += 1


def test_record_scan_small():
    rows = cf.record_scan(3, 40 * math.log(10))
    got = [(r.n, r.a_n, cf.truncate1(r.log_q_prev)) for r in rows]
    assert got[:3] == [(1, 11, 0.0), (10, 16, 9.4), (31, 68, 34.5)]


def test_record_scan_rejects_bad_bound():
    with pytest.raises(ValueError):
        cf.record_scan(3, -1.0)


def test_verify_measure_reduced_range():
    rep = cf.verify_measure(qmax_log10=120.0)
    assert rep.ok
    assert rep.min_ratio >= 1.0
    assert [n for n, _ in rep.small_ratios] == list(range(2, 10))
    assert all(r >= 1.0 for _, r in rep.small_ratios)
    assert all(v >= 1.0 for _, v in rep.direct_small_x)
