"""Rooted forests on finite rational point sets under a p-adic distance.

The tree construction recursion: take the largest pairwise distance rho,
extend the root to a maximal subset whose points are pairwise at distance
exactly rho, partition the rest into the open rho-balls around those points,
and recurse inside each ball.  A forest is the disjoint union of such trees
over the open delta-balls around a maximal delta-separated subset.

Distances are exact (LogAbs exponents); choices are resolved by first-fit in
input order, so the construction is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .hermite import check_alphas
from .padic import LogAbs, is_prime, logabs_max


class PAdicDistance:
    """dist(a, b) = |a - b|_p as a LogAbs."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def dist(self, a, b) -> LogAbs:
        return LogAbs.of_rational(self.p, Fraction(a) - Fraction(b))


@dataclass
class UltraForest:
    """Vertices by index into the input point list; edges are (parent, child)."""

    vertices: tuple[Fraction, ...]
    roots: list[int]
    edges: list[tuple[int, int]]
    parent: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.parent:
            self.parent = {c: p for p, c in self.edges}

    def successors(self, v: int) -> list[int]:
        return [c for p, c in self.edges if p == v]

    def descendants(self, v: int) -> set[int]:
        out: set[int] = set()
        stack = self.successors(v)
        while stack:
            w = stack.pop()
            out.add(w)
            stack.extend(self.successors(w))
        return out

    def is_rooted_forest(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) + len(self.roots) != n:
            return False
        non_roots = set(range(n)) - set(self.roots)
        if set(self.parent) != non_roots:
            return False
        # acyclicity: walking up from any vertex reaches a root
        for v in range(n):
            seen = set()
            while v not in self.roots:
                if v in seen:
                    return False
                seen.add(v)
                v = self.parent[v]
        return True

    def to_json(self) -> dict:
        return {"roots": sorted(self.roots), "edges": [list(e) for e in self.edges]}


def _build_tree_indices(pts, idxs: list[int], root: int, oracle) -> list[tuple[int, int]]:
    if len(idxs) == 1:
        return []
    # largest pairwise distance
    rho = None
    for a in idxs:
        for b in idxs:
            if a < b:
                d = oracle.dist(pts[a], pts[b])
                if rho is None or rho < d:
                    rho = d
    # maximal subset containing the root at mutual distance exactly rho
    level = [root]
    for a in idxs:
        if a != root and all(oracle.dist(pts[a], pts[b]) == rho for b in level):
            level.append(a)
    # open rho-balls around the level points partition idxs
    edges = [(root, b) for b in level[1:]]
    for c in level:
        ball = [a for a in idxs if oracle.dist(pts[a], pts[c]) < rho or a == c]
        edges.extend(_build_tree_indices(pts, ball, c, oracle))
    return edges


def build_tree(points: Sequence, root, oracle: PAdicDistance) -> UltraForest:
    """Tree rooted at `root` (a point of the set) via the ball recursion."""
    pts = check_alphas(points)
    root = Fraction(root)
    if root not in pts:
        raise ValueError("root must belong to the point set")
    r = pts.index(root)
    edges = _build_tree_indices(pts, list(range(len(pts))), r, oracle)
    return UltraForest(pts, [r], edges)


def separated_subset(points: Sequence, delta_exp, oracle: PAdicDistance) -> list[int]:
    """Greedy maximal subset with pairwise distance >= p^{-delta_exp}, by input order."""
    pts = check_alphas(points)
    bound = LogAbs(Fraction(delta_exp))
    chosen: list[int] = []
    for a in range(len(pts)):
        if all(bound <= oracle.dist(pts[a], pts[b]) for b in chosen):
            chosen.append(a)
    return chosen


def build_forest(points: Sequence, delta_exp, oracle: PAdicDistance) -> UltraForest:
    """Forest rooted at a maximal separated subset; one tree per open delta-ball."""
    pts = check_alphas(points)
    delta = LogAbs(Fraction(delta_exp))
    roots = separated_subset(pts, delta_exp, oracle)
    edges: list[tuple[int, int]] = []
    assigned = 0
    for r in roots:
        ball = [a for a in range(len(pts)) if a == r or oracle.dist(pts[a], pts[r]) < delta]
        assigned += len(ball)
        edges.extend(_build_tree_indices(pts, ball, r, oracle))
    if assigned != len(pts):
        raise AssertionError("delta-balls around the roots do not partition the set")
    return UltraForest(pts, roots, edges)


@dataclass
class VerifyResult:
    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_forest(forest: UltraForest, delta_exp, oracle: PAdicDistance) -> VerifyResult:
    """Exhaustively check both descendant biconditionals.

    (root condition)  for every root b and vertex g:
        g descends from b  <=>  delta > |b - g| > 0
    (edge condition)  for every directed edge (a, b) and vertex g:
        g descends from b  <=>  |a - b| > |b - g| > 0
    """
    pts = forest.vertices
    if not forest.is_rooted_forest():
        return VerifyResult(False, ("structure",))
    delta = LogAbs(Fraction(delta_exp))
    n = len(pts)
    for b in forest.roots:
        desc = forest.descendants(b)
        for g in range(n):
            d = oracle.dist(pts[b], pts[g])
            inside = (not d.zero) and d < delta
            if (g in desc) != inside:
                return VerifyResult(False, ("root", b, g))
    for a, b in forest.edges:
        dab = oracle.dist(pts[a], pts[b])
        desc = forest.descendants(b)
        for g in range(n):
            d = oracle.dist(pts[b], pts[g])
            inside = (not d.zero) and d < dab
            if (g in desc) != inside:
                return VerifyResult(False, ("edge", a, b, g))
    return VerifyResult(True)


def topological_order(forest: UltraForest) -> list[int]:
    """Total order extending the forest partial order, stable by input index."""
    n = len(forest.vertices)
    placed: set[int] = set()
    order: list[int] = []
    while len(order) < n:
        for v in range(n):
            if v in placed:
                continue
            if v in forest.roots or forest.parent[v] in placed:
                placed.add(v)
                order.append(v)
                break
        else:
            raise AssertionError("not a forest")
    return order


def triangular_forms(forest: UltraForest,
                     phi: Mapping[tuple[int, int], Fraction] | Callable[[int, int], Fraction]
                     ) -> tuple[list[list[Fraction]], list[int]]:
    """Matrix of the forms  L_b = x_b  (roots) or  x_b - phi(a,b) x_a  (edges).

    Rows and columns follow the stable topological order; the result is unit
    lower triangular.  phi maps directed edges (parent, child) to weights.
    """
    order = topological_order(forest)
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for v in order:
        mat[pos[v]][pos[v]] = Fraction(1)
        if v not in forest.roots:
            a = forest.parent[v]
            if callable(phi):
                w = phi(a, v)
            else:
                try:
                    w = phi[(a, v)]
                except KeyError:
                    raise KeyError(f"phi missing on edge {(a, v)}") from None
            mat[pos[v]][pos[a]] = -Fraction(w)
    for r in range(n):
        assert mat[r][r] == 1 and all(mat[r][c] == 0 for c in range(r + 1, n)), \
            "form matrix is not unit lower triangular"
    return mat, order


def volume_products(forest: UltraForest, orders: Sequence[int],
                    oracle: PAdicDistance, delta_exp) -> tuple[LogAbs, LogAbs]:
    """The two distance products entering the ultrametric volume bound.

    root product:  prod over roots b and all vertices g of max{|b-g|, delta}^{n_g}
    edge product:  prod over directed edges (a,b) and all g of max{|a-g|, |b-g|}^{n_g}

    Their product equals  delta^N * prod_b prod_{g != b} |b-g|^{n_g}  exactly;
    this identity is asserted before returning.
    """
    pts = forest.vertices
    n = tuple(int(x) for x in orders)
    if len(n) != len(pts):
        raise ValueError("orders length must match the point set")
    delta = LogAbs(Fraction(delta_exp))
    root_prod = LogAbs(Fraction(0))
    for b in forest.roots:
        for g in range(len(pts)):
            m = logabs_max(oracle.dist(pts[b], pts[g]), delta)
            root_prod = root_prod * m ** n[g]
    edge_prod = LogAbs(Fraction(0))
    for a, b in forest.edges:
        for g in range(len(pts)):
            m = logabs_max(oracle.dist(pts[a], pts[g]), oracle.dist(pts[b], pts[g]))
            edge_prod = edge_prod * m ** n[g]
    N = sum(n)
    rhs = LogAbs(Fraction(delta_exp) * N)
    for b in range(len(pts)):
        for g in range(len(pts)):
            if g != b:
                rhs = rhs * oracle.dist(pts[b], pts[g]) ** n[g]
    lhs = root_prod * edge_prod
    assert not lhs.zero and not rhs.zero and lhs.exponent == rhs.exponent, \
        f"volume product identity fails: {lhs} vs {rhs}"
    return root_prod, edge_prod
