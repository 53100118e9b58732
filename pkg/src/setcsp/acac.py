"""Succinct graphs with marked vertices, and the reduction from set-constraints.

The graph of an instance joins two strings whenever some constraint makes them
neighbors; a vertex is marked when it is bad for some constraint.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import (SetCspInstance, ValidationError, check_bits, from_int, int_kernel,
                   to_int)

MAX_MATERIALIZE_BITS = 24


class IntegrityError(ValidationError):
    """The neighbor oracle is not symmetric or exceeds its declared degree."""


@dataclass(frozen=True)
class AcacInstance:
    """A graph on ``{0,1}^n`` given by a neighbor oracle and a marking oracle."""

    n: int
    neighbor_oracle: Callable[[str], Sequence[str]]
    mark_oracle: Callable[[str], bool]
    degree_bound: int
    epsilon: Fraction | None = None
    # integer-level oracles, used by the fast paths when present
    int_neighbors: Callable[[int], Sequence[int]] | None = field(default=None, repr=False)
    int_marked: Callable[[int], bool] | None = field(default=None, repr=False)

    def neighbors(self, x: str) -> tuple[str, ...]:
        check_bits(x, self.n)
        out = tuple(sorted(set(self.neighbor_oracle(x))))
        if len(out) > self.degree_bound:
            raise IntegrityError(f"vertex {x} has {len(out)} neighbors, bound is {self.degree_bound}")
        for y in out:
            check_bits(y, self.n)
        return out

    def marked(self, x: str) -> bool:
        return bool(self.mark_oracle(check_bits(x, self.n)))

    def neighbors_int(self, v: int) -> tuple[int, ...]:
        if self.int_neighbors is not None:
            return tuple(sorted(set(self.int_neighbors(v))))
        return tuple(to_int(y) for y in self.neighbors(from_int(v, self.n)))

    def marked_int(self, v: int) -> bool:
        if self.int_marked is not None:
            return bool(self.int_marked(v))
        return self.marked(from_int(v, self.n))


@dataclass(frozen=True)
class ExplicitGraph:
    """A simple undirected graph on vertices ``0..num_vertices-1``.

    ``adjacency[v]`` is sorted.  ``weights`` maps ``(u, v)`` with ``u < v`` to a
    positive rational; missing entries weigh 1.
    """

    num_vertices: int
    adjacency: tuple[tuple[int, ...], ...]
    marked: frozenset[int] = frozenset()
    weights: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        adj = tuple(tuple(sorted(set(a))) for a in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "marked", frozenset(self.marked))
        if len(adj) != self.num_vertices:
            raise ValidationError("adjacency length does not match vertex count")
        for v, nb in enumerate(adj):
            for u in nb:
                if not 0 <= u < self.num_vertices:
                    raise ValidationError(f"edge ({v}, {u}) leaves the vertex range")
                if u == v:
                    raise ValidationError(f"self-loop at {v}")
                if v not in adj[u]:
                    raise IntegrityError(f"edge ({v}, {u}) is not symmetric")
        if any(not 0 <= v < self.num_vertices for v in self.marked):
            raise ValidationError("marked vertex out of range")
        if self.weights:
            for e, w in self.weights.items():
                if Fraction(w) <= 0:
                    raise ValidationError(f"non-positive weight on {e}")

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[tuple[int, int]],
                   marked: Iterable[int] = (), weights=None) -> "ExplicitGraph":
        adj = [set() for _ in range(num_vertices)]
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValidationError(f"edge ({u}, {v}) out of range")
            adj[u].add(v)
            adj[v].add(u)
        return cls(num_vertices, tuple(tuple(sorted(a)) for a in adj), frozenset(marked), weights)

    @property
    def n(self) -> int:
        """Bit width of the vertex labels."""
        return max(self.num_vertices - 1, 0).bit_length()

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    def weight(self, u: int, v: int) -> Fraction:
        if not self.weights:
            return Fraction(1)
        return Fraction(self.weights.get((min(u, v), max(u, v)), 1))

    def label(self, v: int) -> str:
        return from_int(v, self.n)

    def components(self) -> list[list[int]]:
        seen = [False] * self.num_vertices
        comps = []
        for s in range(self.num_vertices):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def to_json(self) -> dict:
        obj = {"n": self.n, "edges": [list(e) for e in self.edges()], "marked": sorted(self.marked)}
        if self.num_vertices != 1 << self.n:
            obj["num_vertices"] = self.num_vertices
        if self.weights:
            obj["weights"] = [[u, v, str(Fraction(w))] for (u, v), w in sorted(self.weights.items())]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ExplicitGraph":
        try:
            nv = int(obj.get("num_vertices", 1 << int(obj["n"])))
            weights = None
            if obj.get("weights"):
                weights = {(min(u, v), max(u, v)): Fraction(w) for u, v, w in obj["weights"]}
            return cls.from_edges(nv, [tuple(e) for e in obj["edges"]], obj.get("marked", ()), weights)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed graph: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# --------------------------------------------------------------------------
# reduction

def degree_bound(inst: SetCspInstance) -> int:
    return sum(max(c.max_group_size() - 1, 0) for c in inst.constraints)


def reduce_to_acac(inst: SetCspInstance) -> AcacInstance:
    kernel = int_kernel(inst)
    n = inst.n

    def nbrs_int(v: int) -> list[int]:
        out = set()
        for c in kernel:
            out.update(c.neighbors(v))
        return sorted(out)

    def marked_int(v: int) -> bool:
        return any(c.is_bad(v) for c in kernel)

    def nbrs(x: str) -> list[str]:
        return [from_int(u, n) for u in nbrs_int(to_int(check_bits(x, n)))]

    def marked(x: str) -> bool:
        return marked_int(to_int(check_bits(x, n)))

    eps = inst.epsilon / 2 if inst.epsilon is not None else None
    return AcacInstance(n, nbrs, marked, degree_bound(inst), eps, nbrs_int, marked_int)


def from_explicit(g: ExplicitGraph, epsilon=None) -> AcacInstance:
    """View an explicit graph (``2^n`` vertices) as an oracle-backed instance."""
    n = g.n
    if g.num_vertices != 1 << n:
        raise ValidationError("oracle view needs exactly 2^n vertices")
    d = max((len(a) for a in g.adjacency), default=0)
    return AcacInstance(
        n,
        lambda x: [from_int(u, n) for u in g.adjacency[to_int(x)]],
        lambda x: to_int(x) in g.marked,
        d,
        Fraction(epsilon) if epsilon is not None else None,
        lambda v: g.adjacency[v],
        lambda v: v in g.marked,
    )


def materialize(acac: AcacInstance) -> ExplicitGraph:
    if acac.n > MAX_MATERIALIZE_BITS:
        raise ValidationError(f"n={acac.n} too large to materialize (max {MAX_MATERIALIZE_BITS})")
    N = 1 << acac.n
    adj = []
    for v in range(N):
        nb = acac.neighbors_int(v)
        if len(nb) > acac.degree_bound:
            raise IntegrityError(f"vertex {from_int(v, acac.n)} exceeds degree bound")
        adj.append(nb)
    marked = frozenset(v for v in range(N) if acac.marked_int(v))
    # ExplicitGraph checks symmetry
    return ExplicitGraph(N, tuple(adj), marked)


def boundary(g: ExplicitGraph, S: Iterable[int]) -> set[tuple[int, int]]:
    S = set(S)
    return {(min(u, v), max(u, v)) for u in S for v in g.adjacency[u] if v not in S}


# --------------------------------------------------------------------------
# standard graphs

def hypercube(q: int, marked: Iterable[int] = ()) -> ExplicitGraph:
    edges = [(v, v ^ (1 << b)) for v in range(1 << q) for b in range(q) if v < v ^ (1 << b)]
    return ExplicitGraph.from_edges(1 << q, edges, marked)


def path_graph(k: int, marked: Iterable[int] = ()) -> ExplicitGraph:
    return ExplicitGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)], marked)


def star_graph(leaves: int, marked: Iterable[int] = ()) -> ExplicitGraph:
    """Center is vertex 0."""
    return ExplicitGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], marked)


def complete_graph(k: int, marked: Iterable[int] = ()) -> ExplicitGraph:
    return ExplicitGraph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)], marked)
