"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
lines and timings.
"""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from expapprox import ascent as asc
from expapprox import cf
from expapprox import forest as fo
from expapprox import hermite as h
from expapprox import minima as mm
from expapprox import padic as pa
from expapprox.cli import main

E3_PREFIX = [20, 11, 1, 2, 4, 3, 1, 5, 1, 2, 16]

RECORD_TABLE = [
    (1, 11, 0.0), (10, 16, 9.4), (31, 68, 34.5), (87, 189, 97.9),
    (133, 492, 151.1), (211, 739, 256.6), (244, 2566, 297.6),
    (388, 5885, 475.0), (2708, 6384, 3307.2), (8055, 10409, 9614.8),
]
RECORD_NEXT = (9437, 19362, 11258.4)


def _cli_lines(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [l for l in out.splitlines() if l and not l.startswith("#")]


def test_criterion_1_cf_prefix_e3(capsys):
    t0 = time.monotonic()
    code, lines = _cli_lines(capsys, "cf", "--alpha", "3", "--count", "11")
    elapsed = time.monotonic() - t0
    quotients = [int(l.split("\t")[1]) for l in lines]
    assert code == 0
    assert quotients == E3_PREFIX
    assert elapsed < 1.0
    print(f"\nPASS criterion 1: e^3 prefix exact in {elapsed:.3f}s")


def test_criterion_2_cf_prefix_e(capsys):
    code, lines = _cli_lines(capsys, "cf", "--alpha", "1", "--count", "10")
    assert code == 0
    assert [int(l.split("\t")[1]) for l in lines] == [2, 1, 2, 1, 1, 4, 1, 1, 6, 1]
    print("\nPASS criterion 2: e prefix matches the Euler pattern")


def test_criterion_3_record_table(capsys):
    t0 = time.monotonic()
    code, lines = _cli_lines(capsys, "records", "--alpha", "3", "--qmax-log10", "5000")
    elapsed = time.monotonic() - t0
    assert code == 0
    rows = [(int(a), int(b), float(c)) for a, b, c in
            (l.split("\t") for l in lines)]
    assert rows[:10] == [(n, a, lq) for n, a, lq in RECORD_TABLE]
    assert rows[10] == RECORD_NEXT
    for (_, _, got), (_, _, want) in zip(rows, RECORD_TABLE + [RECORD_NEXT]):
        assert abs(got - want) <= 0.1
    assert elapsed < 300.0
    print(f"\nPASS criterion 3: record table through n=9437 in {elapsed:.1f}s")


def test_criterion_4_measure_inequality(capsys):
    code, lines = _cli_lines(capsys, "verify-measure", "--qmax-log10", "2000")
    assert code == 0
    assert lines[-1] == "all checks passed"
    print("\nPASS criterion 4: measure inequality at qmax 10^2000")


def test_criterion_5_exact_identities():
    rng = random.Random(500)
    for trial in range(200):
        s = rng.randint(1, 4)
        vals = set()
        while len(vals) < s:
            vals.add(Fraction(rng.randint(-12, 12), rng.randint(1, 9)))
        alphas = tuple(vals)
        n = tuple(rng.randint(1, 6) for _ in range(s))
        assert h.mat_det(h.hermite_matrix(alphas, n)) == h.mahler_det(alphas, n)
        assert h.hermite_point_rec(alphas, n) == h.hermite_point(alphas, n)
        ell = rng.randint(1, s)
        bumped = tuple(k + (1 if i == ell - 1 else 0) for i, k in enumerate(n))
        assert h.mat_mul(h.step_matrix(alphas, n, ell),
                         h.hermite_matrix(alphas, n)) == h.hermite_matrix(alphas, bumped)
        if trial % 4 == 0:
            alpha = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            m = rng.randint(1, 5)
            assert h.diagonal_product_matrix(alpha, m) == h.hermite_matrix((0, alpha), (m, m))
    print("\nPASS criterion 5: 200 exact identity instances")


def test_criterion_6_semiresultant():
    rng = np.random.default_rng(600)
    for trial in range(100):
        s = int(rng.integers(1, 7))
        while True:
            pts = [complex(z) for z in rng.uniform(-1, 1, s) + 1j * rng.uniform(-1, 1, s)]
            if s == 1 or min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]) >= 0.05:
                break
        mults = [int(m) for m in rng.integers(1, 4, s)]
        while sum(mults) > 12:
            mults[int(rng.integers(0, s))] = 1
        f = asc.ComplexPoly(pts, mults)
        _, _, dev = asc.semiresultant(f)
        assert dev <= 1e-8
        lhs, rhs = asc.factorial_bound_sides(f)
        assert lhs <= rhs * (1 + 1e-9)
    print("\nPASS criterion 6: 100 semi-resultant identities (rel err <= 1e-8)")


def test_criterion_7_ascent_trees():
    rng = np.random.default_rng(700)
    aborted = []
    for trial in range(100):
        s = int(rng.integers(2, 11))
        while True:
            pts = [complex(z) for z in rng.uniform(-1, 1, s) + 1j * rng.uniform(-1, 1, s)
                   if abs(z) <= 1]
            if len(pts) == s and min(abs(a - b) for i, a in enumerate(pts)
                                     for b in pts[i + 1:]) >= 0.05:
                break
        f = asc.ComplexPoly(pts, [1] * s)
        try:
            tree = asc.build_ascent_tree(f, seed=trial)
            rep = asc.verify_bounds(tree, rel_tol=1e-6)
        except asc.NumericalFailure as e:
            aborted.append((trial, str(e)))
            continue
        assert len(tree.edges) == s - 1
        for b_idx, m in enumerate(tree.critical.mults):
            assert sum(1 for e in tree.edges if e.beta_index == b_idx) == m
        assert rep.ok, rep.violations
    assert len(aborted) <= 1, aborted
    print(f"\nPASS criterion 7: 100 ascent trees, {len(aborted)} aborted")


def test_criterion_8_ultrametric_forests():
    rng = random.Random(800)
    for trial in range(500):
        p = rng.choice([2, 3, 5])
        oracle = fo.PAdicDistance(p)
        s = rng.randint(1, 8)
        pts = set()
        while len(pts) < s:
            pts.add(Fraction(rng.randint(-40, 40),
                             rng.choice([1, 1, 2, 3, 7]) * p ** rng.randint(0, 2)))
        pts = tuple(pts)
        dexp = Fraction(1, p - 1) if rng.random() < 0.7 else \
            Fraction(rng.randint(-2, 3), rng.randint(1, 3))
        forest = fo.build_forest(pts, dexp, oracle)
        assert fo.verify_forest(forest, dexp, oracle)
        assert len(forest.edges) + len(forest.roots) == len(forest.vertices)
        n = tuple(rng.randint(0, 4) for _ in range(s))
        fo.volume_products(forest, n, oracle, dexp)  # exact identity asserted inside
        mat, _ = fo.triangular_forms(forest, lambda a, b: Fraction(rng.randint(-3, 3)))
        assert h.mat_det(mat) == 1
    print("\nPASS criterion 8: 500 forests verified with exact volume products")


def test_criterion_9_ultrametric_bounds():
    rng = random.Random(900)
    mixed_seen = 0
    for trial in range(100):
        p = rng.choice([2, 3, 5, 7])
        step = 4 if p == 2 else p
        s = rng.randint(2, 4)
        base = Fraction(rng.randint(-6, 6))
        pts = {base}
        while len(pts) < s:
            if rng.random() < 0.6:
                pts.add(base + step * rng.randint(1, 9))
            else:
                pts.add(base + rng.randint(1, 9))
        alphas = tuple(pts)
        n = tuple(rng.randint(0, 4) for _ in range(s))
        i, j = rng.sample(range(1, s + 1), 2)
        rep = pa.check_ultrametric_bounds_auto(alphas, n, i, j, p)
        assert rep.all_hold, (alphas, n, i, j, p, rep)
        mixed_seen += rep.mixed == pa.HOLDS
    assert mixed_seen >= 20  # the mixed estimate must actually be exercised
    print(f"\nPASS criterion 9: 100 bound instances ({mixed_seen} with the mixed estimate)")


def test_criterion_10_minima_sandwich():
    t0 = time.monotonic()
    table = mm.minima_sandwich(20)
    elapsed = time.monotonic() - t0
    assert table.ok
    for row in table.rows:
        assert 2.0 <= row.product <= 4.0
    c = table.bounding_constant
    assert 0 < c < 1e6
    assert elapsed < 120.0
    print(f"\nPASS criterion 10: minima sandwich n=1..20 (c = {c:.3f}) in {elapsed:.1f}s")


@pytest.mark.parametrize("alphas,orders,seed", [((0, 3), (2, 2), 42),
                                                ((0, 1, 3), (2, 2, 2), 43)])
def test_criterion_11_volume_sandwich(alphas, orders, seed):
    t0 = time.monotonic()
    spec = mm.archimedean_body(alphas, orders)
    est = mm.mc_volume(spec, samples=1_000_000, seed=seed)
    lo, hi = mm.volume_sandwich(alphas, orders)
    elapsed = time.monotonic() - t0
    a, b = est.three_sigma()
    assert a <= hi and b >= lo
    assert elapsed < 60.0
    print(f"\nPASS criterion 11 (s={len(alphas)}): estimate {est.estimate:.4g} "
          f"in sandwich [{lo:.4g}, {hi:.4g}] in {elapsed:.1f}s")
