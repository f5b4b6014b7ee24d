"""Streaming continued fraction of e^a for rational a > 0.

The engine multiplies the 2x2 integer cascade matrices

    C_i = b * ((2i-1-a/b, 2i-1), (2i-1, 2i-1+a/b)),   alpha = a/b,

whose running product has rows proportional to neighbouring Hermite
approximation points for the pair (0, alpha).  Both row ratios t/u and t'/u'
converge to e^{-alpha}, so the shared leading partial quotients of the two
ratios are partial quotients of e^{-alpha} = [0, a_1, a_2, ...], equivalently
of e^{alpha} = [a_1, a_2, ...].  Quotients are peeled off whenever the two
floor divisions agree, keeping only a small "reduced" remainder matrix.

Matrices live in the domain  0 <= t < u, 0 <= t' < u', t u' != t' u,  which
is closed under multiplication and under quotient peeling.  The iteration
starts at the first index where the accumulated product enters the domain
(the very first factors may have a negative entry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator

Mat2 = tuple[int, int, int, int]  # rows (t, u), (t', u')

IDENT: Mat2 = (1, 0, 0, 1)


def cascade_matrix(i: int, alpha) -> Mat2:
    """Denominator-cleared cascade factor b*C_i; needs alpha > 0."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    a, b = alpha.numerator, alpha.denominator
    w = b * (2 * i - 1)
    return (w - a, w, w, w + a)


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    return (x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3])


def in_domain(m: Mat2) -> bool:
    t, u, tp, up = m
    return 0 <= t < u and 0 <= tp < up and t * up != tp * u


def strip_content(m: Mat2) -> tuple[Mat2, int]:
    g = gcd(gcd(m[0], m[1]), gcd(m[2], m[3]))
    if g > 1:
        return (m[0] // g, m[1] // g, m[2] // g, m[3] // g), g
    return m, 1


def is_reduced(m: Mat2) -> bool:
    """No shared leading quotient: t = 0 or t' = 0 or the floors differ."""
    if not in_domain(m):
        raise ValueError("matrix outside the reduction domain")
    t, u, tp, up = m
    return t == 0 or tp == 0 or u // t != up // tp


def extract_quotients(m: Mat2) -> tuple[Mat2, list[int]]:
    """Peel shared quotients:  m = reduced * (0 1 / 1 a_k) ... (0 1 / 1 a_1)."""
    if not in_domain(m):
        raise ValueError("matrix outside the reduction domain")
    t, u, tp, up = m
    out: list[int] = []
    guard = 4 * max(u, up).bit_length() + 8
    while t > 0 and tp > 0:
        a = u // t
        if a != up // tp:
            break
        t, u, tp, up = u - a * t, t, up - a * tp, tp
        out.append(a)
        guard -= 1
        assert guard > 0, "quotient peeling failed to terminate"
    return (t, u, tp, up), out


def quotient_matrix_product(quotients: list[int]) -> Mat2:
    """(0 1 / 1 a_k) ... (0 1 / 1 a_1) for reconstruction checks."""
    acc = IDENT
    for a in reversed(quotients):
        acc = mat_mul(acc, (0, 1, 1, a))
    return acc


@dataclass
class CFState:
    """Reduced remainder plus convergent-denominator tracking.

    log_q is ln(q_{m-1}) where m-1 indexes the last fully determined
    convergent of e^alpha = [a_0, a_1, ...]; ratio is q_{m-2}/q_{m-1}.
    Emitted quotient count k counts a_0 as the first element.
    """

    reduced: Mat2
    n: int = 0                      # cascade index consumed so far
    emitted: int = 0                # quotients produced
    log_q: float = 0.0
    ratio: float = 0.0
    pending: list[int] = field(default_factory=list)
    content: int = 1                # total content stripped so far


def initial_state(alpha) -> CFState:
    """Accumulate cascade factors until the product enters the domain."""
    alpha = Fraction(alpha)
    m: Mat2 = IDENT
    content = 1
    n = 0
    while True:
        n += 1
        m = mat_mul(cascade_matrix(n, alpha), m)
        m, g = strip_content(m)
        content *= g
        if in_domain(m):
            break
        if n > 4 * int(alpha) + 64:
            raise AssertionError("cascade product never entered the domain")
    m, quotients = extract_quotients(m)
    state = CFState(reduced=m, n=n, content=content)
    _absorb(state, quotients)
    return state


def _absorb(state: CFState, quotients: list[int]) -> None:
    for a in quotients:
        state.pending.append(a)
        state.emitted += 1
        if state.emitted == 1:
            continue  # a_0 contributes q_0 = 1
        state.log_q += math.log(a + state.ratio)
        state.ratio = 1.0 / (a + state.ratio)


def step(state: CFState, alpha) -> list[int]:
    """Advance one cascade factor; returns the quotients it released."""
    state.n += 1
    m = mat_mul(cascade_matrix(state.n, alpha), state.reduced)
    m, g = strip_content(m)
    state.content *= g
    m, quotients = extract_quotients(m)
    state.reduced = m
    _absorb(state, quotients)
    return quotients


def stream_cf(alpha, count: int | None = None, log_q_bound: float | None = None) -> Iterator[int]:
    """Partial quotients a_0, a_1, ... of e^alpha for rational alpha > 0.

    Stops after `count` quotients, or once ln(q) of the convergent
    denominator passes log_q_bound (emitting the quotient that crossed it).
    """
    if count is None and log_q_bound is None:
        raise ValueError("need a count or a log_q bound")
    state = initial_state(alpha)
    sent = 0
    while True:
        while state.pending:
            a = state.pending.pop(0)
            yield a
            sent += 1
            if count is not None and sent >= count:
                return
        if log_q_bound is not None and state.log_q > log_q_bound:
            return
        step(state, alpha)


@dataclass(frozen=True)
class RecordRow:
    n: int              # quotient index, a_0 excluded from the running max
    a_n: int
    log_q_prev: float   # ln(q_{n-1}), truncated to one decimal downstream


def truncate1(x: float) -> float:
    return math.floor(x * 10.0) / 10.0


def record_scan(alpha, qmax_log: float) -> list[RecordRow]:
    """Rows (n, a_n, ln q_{n-1}) at which a_n = max(a_1..a_n), for q_{n-1} <= bound.

    qmax_log is the natural log of the denominator bound.  a_0 starts the
    expansion but is excluded from the running maximum.
    """
    if qmax_log <= 0:
        raise ValueError("qmax_log must be positive")
    rows: list[RecordRow] = []
    best = 0
    n = -1
    log_q_prev = 0.0
    ratio = 0.0
    for a in stream_cf(alpha, log_q_bound=qmax_log):
        n += 1
        if n >= 1:
            if log_q_prev > qmax_log:
                break
            if a > best:
                best = a
                rows.append(RecordRow(n, a, log_q_prev))
            log_q_prev += math.log(a + ratio)
            ratio = 1.0 / (a + ratio)
    return rows


def psi_of_log(log_x: float) -> float:
    """psi(x) = 3 log x loglog x, taken as a function of log x."""
    return 3.0 * log_x * math.log(log_x)


@dataclass
class MeasureReport:
    alpha: Fraction
    qmax_log: float
    checked: int                      # indices n >= 2 examined
    min_ratio: float                  # min over n >= 10 of psi(q_{n-1})/(a_n+2)
    small_ratios: list[tuple[int, float]]   # n = 2..9
    direct_small_x: list[tuple[int, float]]  # (x, psi(x) x ||x e^alpha||) for x = 4..10
    violations: list[tuple[int, int, float]]

    @property
    def ok(self) -> bool:
        return (not self.violations
                and all(r >= 1.0 for _, r in self.small_ratios)
                and all(v >= 1.0 for _, v in self.direct_small_x))


def verify_measure(alpha=Fraction(3), qmax_log: float | None = None,
                   qmax_log10: float = 2000.0) -> MeasureReport:
    """Check psi(q_{n-1})/(a_n+2) >= 1 for every index n >= 10 in range.

    Also runs the direct small checks: the same ratio for n = 2..9, and
    psi(x) * x * |x e^alpha - nearest integer| >= 1 for x = 4..10.
    Together with Lagrange's convergent bound these give
    |x| |x e^alpha - y| >= 1/psi(|x|) on 4 <= |x| <= exp(qmax_log).
    """
    from .minima import exp_interval  # local import to avoid a cycle

    alpha = Fraction(alpha)
    if qmax_log is None:
        qmax_log = qmax_log10 * math.log(10.0)
    if qmax_log <= math.log(1e4):
        raise ValueError("bound too small to be meaningful")
    log_q_prev = 0.0
    ratio = 0.0
    n = -1
    checked = 0
    min_ratio = math.inf
    small: list[tuple[int, float]] = []
    violations: list[tuple[int, int, float]] = []
    for a in stream_cf(alpha, log_q_bound=qmax_log):
        n += 1
        if n >= 1:
            if log_q_prev > qmax_log:
                break
            if n >= 2:
                checked += 1
                r = psi_of_log(log_q_prev) / (a + 2) if log_q_prev > 1.0 else -math.inf
                if 2 <= n <= 9:
                    small.append((n, r))
                if n >= 10:
                    min_ratio = min(min_ratio, r)
                    if not r >= 1.0:
                        violations.append((n, a, r))
            log_q_prev += math.log(a + ratio)
            ratio = 1.0 / (a + ratio)

    iv = exp_interval(alpha, bits=96)
    direct: list[tuple[int, float]] = []
    for x in range(4, 11):
        p = round(x * iv.mid)
        dist = abs(x * iv.mid - p) - x * iv.width  # conservative lower bound
        val = 3.0 * math.log(x) * math.log(math.log(x)) * x * float(dist)
        direct.append((x, val))
    return MeasureReport(alpha, qmax_log, checked, min_ratio, small, direct, violations)
