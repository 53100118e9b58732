"""Shared generators and slow reference implementations for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from setcsp.circuits import ARITY, Gate, MaCircuitSpec, ReversibleCircuit
from setcsp.core import SetConstraint, SetCspInstance, all_strings

FIXTURES = Path(__file__).parent / "fixtures"
CIRCUITS = FIXTURES / "circuits"

TOY_HISTORY = ["0001110", "1001100", "1101110", "1111111"]


def random_instance(rng: random.Random, n: int | None = None, max_m: int = 3,
                    max_k: int = 3, epsilon=None) -> SetCspInstance:
    n = n or rng.randint(1, 4)
    cons = []
    for _ in range(rng.randint(1, max_m)):
        k = rng.randint(1, min(max_k, n))
        J = tuple(rng.sample(range(n), k))
        pats = all_strings(k)
        rng.shuffle(pats)
        keep = pats[:rng.randint(1, len(pats))]
        groups = []
        while keep:
            size = rng.randint(1, min(3, len(keep)))
            groups.append(frozenset(keep[:size]))
            keep = keep[size:]
        cons.append(SetConstraint(J, tuple(groups)))
    return SetCspInstance(n, tuple(cons), epsilon)


def random_csp(rng: random.Random, n: int | None = None):
    n = n or rng.randint(2, 4)
    cons = []
    for _ in range(rng.randint(1, 5)):
        k = rng.randint(2, min(3, n))
        J = rng.sample(range(n), k)
        pats = all_strings(k)
        cons.append((J, rng.sample(pats, rng.randint(0, len(pats)))))
    return n, cons


def random_spec(rng: random.Random, max_w: int = 8, max_T: int = 8, max_q: int = 3) -> MaCircuitSpec:
    while True:
        p, a, q = rng.randint(0, 4), rng.randint(0, 3), rng.randint(0, max_q)
        w = p + a + q
        if 1 <= w <= max_w:
            break
    gates = []
    for _ in range(rng.randint(2, max_T)):
        kind = rng.choice([k for k in ARITY if ARITY[k] <= w])
        gates.append(Gate(kind, tuple(rng.sample(range(w), ARITY[kind]))))
    return MaCircuitSpec(ReversibleCircuit(w, tuple(gates)), p, a, q)


def _sub(x: str, J, pattern: str) -> str:
    y = list(x)
    for j, b in zip(J, pattern):
        y[j] = b
    return "".join(y)


def ref_set_unsat(inst: SetCspInstance, S) -> Fraction:
    """Frustration straight from the definitions, no shared code paths."""
    S = set(S)
    total = Fraction(0)
    for c in inst.constraints:
        count = 0
        for x in S:
            local = "".join(x[j] for j in c.j)
            group = next((g for g in c.y if local in g), None)
            if group is None:
                count += 1
            elif any(_sub(x, c.j, p) not in S for p in group):
                count += 1
        total += Fraction(count, len(S))
    return total / len(inst.constraints)


def ref_hitting(adj, absorbing, start, steps) -> Fraction:
    """Exact lazy-walk hitting probability by a Fraction-valued backward recursion."""
    h = {v: Fraction(int(v in absorbing)) for v in range(len(adj))}
    for _ in range(steps):
        new = {}
        for v in range(len(adj)):
            if v in absorbing:
                new[v] = Fraction(1)
            elif not adj[v]:
                new[v] = h[v]
            else:
                move = sum(h[u] for u in adj[v]) / len(adj[v])
                new[v] = h[v] / 2 + move / 2
        h = new
    return h[start]
