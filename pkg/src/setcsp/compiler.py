"""Compile a reversible MA verifier into a 6-local set-constraint instance.

Strings of the compiled instance have ``s = T + w`` bits: a unary clock on
``[0, T)`` followed by the work register (witness, auxiliary, random).  A
clock holding ``t`` reads ``1^t 0^(T-t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circuits import MAX_RANDOM_BITS, MaCircuitSpec, random_strings, snapshots, unary
from .core import SetConstraint, SetCspInstance, ValidationError, all_strings

CLOCK_PAIR = (frozenset({"00"}), frozenset({"10"}), frozenset({"11"}))
AUX_PAIR = CLOCK_PAIR
RAND_PAIR = (frozenset({"00", "01"}), frozenset({"10"}), frozenset({"11"}))
OUT_PAIR = (frozenset({"00"}), frozenset({"01"}), frozenset({"11"}))


class UnsupportedCircuit(ValidationError):
    pass


@dataclass(frozen=True)
class Layout:
    T: int
    p: int
    a: int
    q: int

    @property
    def w(self) -> int:
        return self.p + self.a + self.q

    @property
    def s(self) -> int:
        return self.T + self.w

    @property
    def witness(self) -> range:
        return range(self.T, self.T + self.p)

    @property
    def aux(self) -> range:
        return range(self.T + self.p, self.T + self.p + self.a)

    @property
    def random(self) -> range:
        return range(self.T + self.p + self.a, self.s)

    def work(self, wire: int) -> int:
        return self.T + wire


@dataclass(frozen=True)
class CompiledInstance:
    instance: SetCspInstance
    layout: Layout
    labels: tuple[str, ...]

    def family(self, i: int) -> str:
        return self.labels[i].split(":")[0]


def _prop_constraint(gate, clock_idx: tuple[int, ...], before: str, after: str,
                     layout: Layout) -> SetConstraint:
    J = clock_idx + tuple(layout.work(w) for w in gate.wires)
    groups = []
    for z in all_strings(len(gate.wires)):
        groups.append(frozenset({before + z, after + gate.apply_local(z)}))
    # any other clock window is left unconstrained: singleton groups
    covered = set().union(*groups)
    groups += [frozenset({x}) for x in all_strings(len(J)) if x not in covered]
    return SetConstraint(J, tuple(groups))


def compile_spec(spec: MaCircuitSpec, epsilon=None) -> CompiledInstance:
    T = spec.T
    if T < 2:
        raise UnsupportedCircuit("unsupported: circuits with T=1 have no distinct boundary "
                                 "propagation forms; pad circuit with an inverse pair of gates")
    L = Layout(T, spec.p, spec.a, spec.q)
    cons, labels = [], []

    for t in range(T - 1):
        cons.append(SetConstraint((t, t + 1), CLOCK_PAIR))
        labels.append(f"clock:{t}")
    for j, idx in enumerate(L.aux):
        cons.append(SetConstraint((0, idx), AUX_PAIR))
        labels.append(f"aux:{j}")
    for j, idx in enumerate(L.random):
        cons.append(SetConstraint((0, idx), RAND_PAIR))
        labels.append(f"rand:{j}")
    for t, gate in enumerate(spec.circuit.gates, 1):
        if t == 1:
            c = _prop_constraint(gate, (0, 1), "00", "10", L)
        elif t == T:
            c = _prop_constraint(gate, (T - 2, T - 1), "10", "11", L)
        else:
            c = _prop_constraint(gate, (t - 2, t - 1, t), "100", "110", L)
        cons.append(c)
        labels.append(f"prop:{t}")
    # clock bit T-1 is set only at t = T; work bit 0 is the output
    cons.append(SetConstraint((T - 1, T), OUT_PAIR))
    labels.append("out")

    inst = SetCspInstance(L.s, tuple(cons), epsilon)
    return CompiledInstance(inst, L, tuple(labels))


def expected_constraint_count(spec: MaCircuitSpec) -> int:
    return (spec.T - 1) + spec.a + spec.q + spec.T + 1


def history_set(spec: MaCircuitSpec, y: str) -> frozenset[str]:
    if spec.q > MAX_RANDOM_BITS:
        raise ValidationError(f"q={spec.q} too large to enumerate (max {MAX_RANDOM_BITS})")
    T = spec.T
    out = set()
    for r in random_strings(spec.q):
        for t, state in enumerate(snapshots(spec, y, r)):
            out.add(unary(t, T) + state)
    return frozenset(out)


def soundness_bound(spec: MaCircuitSpec) -> Fraction | None:
    """Lower bound ``1/(10 (T+1) q m)`` on the frustration of rejecting verifiers.

    Returns ``None`` when ``q = 0``: the bound is only defined with a random
    register.
    """
    if spec.q == 0:
        return None
    m = len(compile_spec(spec).instance.constraints)
    return Fraction(1, 10 * (spec.T + 1) * spec.q * m)
