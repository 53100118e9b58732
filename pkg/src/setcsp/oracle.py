"""Exact brute-force ground truth for small instances and graphs.

Subsets of an ``N``-element universe are encoded as bitmaps: bit ``i`` stands
for the ``i``-th element in increasing (lexicographic) order.  Whole families of
subsets are evaluated at once with numpy over ``arange(1, 2**N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import networkx as nx
import numpy as np

from .acac import ExplicitGraph, materialize, reduce_to_acac
from .core import SetCspInstance, ValidationError, from_int, int_kernel

MAX_EXHAUSTIVE_BITS = 4
MAX_SUBSET_VERTICES = 20
MAX_COMPONENT_BITS = 24


@dataclass(frozen=True)
class MinimizationResult:
    min_value: Fraction
    argmin: frozenset[str]
    subsets_examined: int


def _masks(N: int) -> np.ndarray:
    return np.arange(1, 1 << N, dtype=np.int64)


def _popcount(masks: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros_like(masks)
    for i in range(N):
        out += (masks >> i) & 1
    return out


def _members(mask: int, N: int) -> list[int]:
    return [i for i in range(N) if mask >> i & 1]


class SubsetTable:
    """Frustration counts of every nonempty ``S ⊆ {0,1}^n`` for one instance.

    ``numerator[i]`` is ``sum_C |B_C| + |L_C|`` for the subset with bitmap
    ``masks[i]``, so that ``set-unsat = numerator / (m |S|)``.
    """

    def __init__(self, inst: SetCspInstance):
        if inst.n > MAX_EXHAUSTIVE_BITS:
            raise ValidationError(f"exhaustive search needs n <= {MAX_EXHAUSTIVE_BITS}, got {inst.n}")
        self.inst = inst
        self.N = N = 1 << inst.n
        self.masks = masks = _masks(N)
        self.size = _popcount(masks, N)
        member = [((masks >> x) & 1).astype(bool) for x in range(N)]
        self.numerator = np.zeros_like(masks)
        any_bad = np.zeros(len(masks), dtype=bool)
        any_longing = np.zeros(len(masks), dtype=bool)
        self.bad_vertex = [False] * N
        self.neighbor_mask = [0] * N
        self.per_constraint = []
        for c in int_kernel(inst):
            count = np.zeros_like(masks)
            for x in range(N):
                if c.is_bad(x):
                    self.bad_vertex[x] = True
                    count += member[x]
                    any_bad |= member[x]
                    continue
                nbm = sum(1 << u for u in c.neighbors(x))
                self.neighbor_mask[x] |= nbm
                if nbm:
                    longing = member[x] & ((masks & nbm) != nbm)
                    count += longing
                    any_longing |= longing
            self.per_constraint.append(count)
            self.numerator += count
        # per subset: |union of bad|, |union of longing| (members of S only)
        self.union_bad = np.zeros_like(masks)
        self.union_longing = np.zeros_like(masks)
        for x in range(N):
            if self.bad_vertex[x]:
                self.union_bad += member[x]
            elif self.neighbor_mask[x]:
                self.union_longing += member[x] & ((masks & self.neighbor_mask[x]) != self.neighbor_mask[x])
        self._member = member

    def value(self, i: int) -> Fraction:
        return Fraction(int(self.numerator[i]), self.inst.m * int(self.size[i]))

    def strings(self, i: int) -> frozenset[str]:
        return frozenset(from_int(x, self.inst.n) for x in _members(int(self.masks[i]), self.N))

    def index_of(self, S: Iterable[str]) -> int:
        mask = sum(1 << int(x, 2) for x in set(S))
        return mask - 1

    def graph_boundary(self) -> np.ndarray:
        """``|∂(S)|`` in the reduced constraint graph, for every subset."""
        out = np.zeros_like(self.masks)
        for x in range(self.N):
            for u in _members(self.neighbor_mask[x], self.N):
                if x < u:
                    out += self._member[x] ^ self._member[u]
        return out

    def marked_count(self) -> np.ndarray:
        out = np.zeros_like(self.masks)
        for x in range(self.N):
            if self.bad_vertex[x]:
                out += self._member[x]
        return out


def min_set_unsat_exhaustive(inst: SetCspInstance) -> MinimizationResult:
    table = SubsetTable(inst)
    N = table.N
    # numerator / size compared exactly on a common denominator
    L = math.lcm(*range(1, N + 1))
    scaled = table.numerator * (L // table.size)
    i = int(np.argmin(scaled))
    return MinimizationResult(table.value(i), table.strings(i), len(table.masks))


# --------------------------------------------------------------------------
# components

@dataclass(frozen=True)
class SatisfiabilityResult:
    satisfiable: bool
    witness: frozenset[str] | None


def _int_components(num_vertices: int, neighbors, start_order=None):
    seen = bytearray(num_vertices)
    for s in range(num_vertices) if start_order is None else start_order:
        if seen[s]:
            continue
        seen[s] = 1
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in neighbors(v):
                if not seen[u]:
                    seen[u] = 1
                    stack.append(u)
        yield comp


def decide_satisfiable(inst: SetCspInstance) -> SatisfiabilityResult:
    """Satisfiable iff the constraint graph has a component free of bad strings.

    The witness is the first such component in vertex order.
    """
    if inst.n > MAX_COMPONENT_BITS:
        raise ValidationError(f"component scan needs n <= {MAX_COMPONENT_BITS}")
    acac = reduce_to_acac(inst)
    for comp in _int_components(1 << inst.n, acac.int_neighbors):
        if not any(acac.int_marked(v) for v in comp):
            return SatisfiabilityResult(True, frozenset(from_int(v, inst.n) for v in comp))
    return SatisfiabilityResult(False, None)


def clean_components(g: ExplicitGraph) -> list[list[int]]:
    return [c for c in g.components() if not any(v in g.marked for v in c)]


def decide_ccc(g: ExplicitGraph) -> bool:
    return bool(clean_components(g))


def _subset_stats(g: ExplicitGraph, verts: list[int]):
    """Sizes, boundary counts and marked counts of all nonempty subsets of ``verts``."""
    k = len(verts)
    if k > MAX_SUBSET_VERTICES:
        raise ValidationError(f"subset enumeration needs at most {MAX_SUBSET_VERTICES} vertices, got {k}")
    pos = {v: i for i, v in enumerate(verts)}
    masks = _masks(k)
    member = [((masks >> i) & 1) for i in range(k)]
    size = _popcount(masks, k)
    deg_sum = np.zeros_like(masks)
    internal = np.zeros_like(masks)
    marked = np.zeros_like(masks)
    for v in verts:
        i = pos[v]
        deg_sum += member[i] * g.degree(v)
        if v in g.marked:
            marked += member[i]
        for u in g.adjacency[v]:
            j = pos.get(u)
            if j is not None and i < j:
                internal += member[i] & member[j]
    return masks, size, deg_sum - 2 * internal, marked


def check_acac_no(g: ExplicitGraph, epsilon) -> bool:
    """Every nonempty vertex set has ``|∂S| >= ε|S|`` or ``>= ε|S|`` marked vertices."""
    eps = Fraction(epsilon)
    _, size, bnd, marked = _subset_stats(g, list(range(g.num_vertices)))
    a, b = eps.numerator, eps.denominator
    ok = (b * bnd >= a * size) | (b * marked >= a * size)
    return bool(ok.all())


def certify_acac_no_by_components(g: ExplicitGraph, epsilon) -> bool:
    """Certify the no-condition on graphs whose components are small.

    Every ``S`` splits into pieces inside components, and both
    ``b|∂S| - a|S|`` and ``b·marked(S) - a|S|`` (``ε = a/b``) add up over the
    pieces.  A violation needs a sum with both coordinates negative; we test
    the relaxation allowing each piece vector any positive multiplicity, which
    reduces to pairs in the plane.  ``True`` is a proof; ``False`` means the
    relaxation found a violating combination.
    """
    eps = Fraction(epsilon)
    a, b = eps.numerator, eps.denominator
    r1 = r2 = None  # min m/(-x) over x<0<=m ; min x/(-m) over m<0<=x
    for comp in g.components():
        _, size, bnd, marked = _subset_stats(g, comp)
        x = b * bnd - a * size
        m = b * marked - a * size
        if np.any((x < 0) & (m < 0)):
            return False
        t1 = (x < 0) & (m >= 0)
        if t1.any():
            cand = min(Fraction(int(mm), int(-xx)) for xx, mm in zip(x[t1], m[t1]))
            r1 = cand if r1 is None else min(r1, cand)
        t2 = (m < 0) & (x >= 0)
        if t2.any():
            cand = min(Fraction(int(xx), int(-mm)) for xx, mm in zip(x[t2], m[t2]))
            r2 = cand if r2 is None else min(r2, cand)
    return r1 is None or r2 is None or r1 * r2 >= 1


# --------------------------------------------------------------------------
# conductance and expansion

@dataclass(frozen=True)
class ConductanceResult:
    value: Fraction
    disconnected: bool
    argmin: frozenset[int] | None


def _min_ratio(num: np.ndarray, den: np.ndarray, valid: np.ndarray):
    """Exact minimum of ``num/den`` over ``valid`` (floats only pre-select candidates)."""
    idx = np.nonzero(valid)[0]
    ratio = num[idx] / den[idx]
    best = ratio.min()
    cand = idx[ratio <= best * (1 + 1e-9) + 1e-12]
    return min((Fraction(int(num[i]), int(den[i])), int(i)) for i in cand)


def conductance(g: ExplicitGraph) -> ConductanceResult:
    if g.num_vertices > MAX_SUBSET_VERTICES:
        raise ValidationError(f"conductance enumeration needs at most {MAX_SUBSET_VERTICES} vertices")
    if not g.edges():
        raise ValidationError("conductance is undefined for a graph without edges")
    if not g.is_connected():
        return ConductanceResult(Fraction(0), True, None)
    k = g.num_vertices
    edges = g.edges()
    ws = [g.weight(u, v) for u, v in edges]
    scale = math.lcm(*(w.denominator for w in ws))
    iw = [int(w * scale) for w in ws]
    masks = _masks(k)
    member = [((masks >> i) & 1) for i in range(k)]
    cut = np.zeros_like(masks)
    vol = np.zeros_like(masks)
    for (u, v), w in zip(edges, iw):
        cut += w * (member[u] ^ member[v])
        vol += w * (member[u] + member[v])
    total = 2 * sum(iw)
    valid = (vol > 0) & (2 * vol <= total)
    value, i = _min_ratio(cut, vol, valid)
    return ConductanceResult(value, False, frozenset(_members(int(masks[i]), k)))


def _min_boundary_ratio_exhaustive(g: ExplicitGraph, A: list[int]):
    masks, size, bnd, _ = _subset_stats(g, A)
    value, i = _min_ratio(bnd, size, np.ones(len(masks), dtype=bool))
    return value, frozenset(A[j] for j in _members(int(masks[i]), len(A)))


def _min_boundary_ratio_mincut(g: ExplicitGraph, A: list[int]):
    """Dinkelbach iteration; each step is an integral s-t min cut."""
    Aset = set(A)

    def ratio(X):
        X = set(X)
        return Fraction(sum(1 for v in X for u in g.adjacency[v] if u not in X), len(X))

    best_set = frozenset(A)
    lam = ratio(best_set)
    while True:
        p, q = lam.numerator, lam.denominator
        H = nx.DiGraph()
        for v in A:
            H.add_edge("s", v, capacity=p)
            out = 0
            for u in g.adjacency[v]:
                if u in Aset:
                    H.add_edge(v, u, capacity=q)
                else:
                    out += q
            if out:
                H.add_edge(v, "t", capacity=out)
        H.add_node("t")
        value, (source_side, _) = nx.minimum_cut(H, "s", "t")
        if value >= p * len(A):
            return lam, best_set
        X = frozenset(source_side - {"s"})
        best_set, lam = X, ratio(X)


def min_boundary_ratio(g: ExplicitGraph, A: Iterable[int], method: str = "auto") -> Fraction:
    """Largest δ with ``|∂(A')| >= δ|A'|`` for every nonempty ``A' ⊆ A``."""
    return min_boundary_ratio_with_set(g, A, method)[0]


def min_boundary_ratio_with_set(g: ExplicitGraph, A: Iterable[int], method: str = "auto"):
    A = sorted(set(A))
    if not A:
        raise ValidationError("A must be nonempty")
    if method == "auto":
        method = "exhaustive" if len(A) <= MAX_SUBSET_VERTICES else "mincut"
    if method == "exhaustive":
        return _min_boundary_ratio_exhaustive(g, A)
    if method == "mincut":
        return _min_boundary_ratio_mincut(g, A)
    raise ValueError(f"unknown method {method!r}")


def restricted_min_over_components(inst: SetCspInstance) -> Fraction:
    """Minimum frustration over unions of components of the constraint graph.

    Such unions have no longing strings, so the value is the smallest
    per-component bad ratio.  This searches a subfamily of sets: the result
    is an upper bound on the true minimum, never a lower bound.
    """
    if inst.n > MAX_COMPONENT_BITS:
        raise ValidationError(f"component scan needs n <= {MAX_COMPONENT_BITS}")
    kernel = int_kernel(inst)
    g = materialize(reduce_to_acac(inst))
    best = None
    for comp in g.components():
        bad = sum(c.is_bad(v) for v in comp for c in kernel)
        val = Fraction(bad, inst.m * len(comp))
        best = val if best is None else min(best, val)
    return best
