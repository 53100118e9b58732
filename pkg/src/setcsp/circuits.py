"""Reversible circuits over NOT, CNOT and CCNOT.

Wires are listed controls first, target last.  The text format is::

    circuit p=4 a=0 q=0
    NOT 2
    CCNOT 0 1 2      # comments start with '#'
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import ValidationError, check_bits, from_int

ARITY = {"NOT": 1, "CNOT": 2, "CCNOT": 3}
MAX_RANDOM_BITS = 20


class CircuitParseError(ValidationError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if self.kind not in ARITY:
            raise ValidationError(f"unknown gate {self.kind!r}")
        if len(self.wires) != ARITY[self.kind]:
            raise ValidationError(f"{self.kind} takes {ARITY[self.kind]} wires, got {len(self.wires)}")
        if len(set(self.wires)) != len(self.wires) or min(self.wires) < 0:
            raise ValidationError(f"bad wires for {self.kind}: {self.wires}")

    @property
    def target(self) -> int:
        return self.wires[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.wires[:-1]

    def apply_local(self, z: str) -> str:
        """Apply the gate to its own ``k``-bit input (controls..., target)."""
        if all(b == "1" for b in z[:-1]):
            return z[:-1] + ("0" if z[-1] == "1" else "1")
        return z

    def __str__(self):
        return " ".join([self.kind, *map(str, self.wires)])


def NOT(t: int) -> Gate:
    return Gate("NOT", (t,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def CCNOT(c1: int, c2: int, t: int) -> Gate:
    return Gate("CCNOT", (c1, c2, t))


@dataclass(frozen=True)
class ReversibleCircuit:
    width: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 1:
            raise ValidationError("circuit width must be positive")
        if not self.gates:
            raise ValidationError("circuit needs at least one gate")
        for g in self.gates:
            if max(g.wires) >= self.width:
                raise ValidationError(f"gate {g} exceeds width {self.width}")

    @property
    def T(self) -> int:
        return len(self.gates)

    def __call__(self, x: str) -> str:
        for g in self.gates:
            x = apply_gate(g, x)
        return x


@dataclass(frozen=True)
class MaCircuitSpec:
    """A reversible verifier acting on ``witness || 0^a || random``; output is work bit 0."""

    circuit: ReversibleCircuit
    p: int
    a: int
    q: int

    def __post_init__(self):
        if min(self.p, self.a, self.q) < 0:
            raise ValidationError("register sizes must be non-negative")
        if self.p + self.a + self.q != self.circuit.width:
            raise ValidationError(
                f"p+a+q = {self.p + self.a + self.q} does not match circuit width {self.circuit.width}")

    @property
    def w(self) -> int:
        return self.circuit.width

    @property
    def T(self) -> int:
        return self.circuit.T

    def initial(self, y: str, r: str) -> str:
        check_bits(y, self.p)
        check_bits(r, self.q)
        return y + "0" * self.a + r


def apply_gate(g: Gate, x: str) -> str:
    if max(g.wires) >= len(x):
        raise ValidationError(f"gate {g} out of range for {len(x)}-bit string")
    if all(x[c] == "1" for c in g.controls):
        t = g.target
        return x[:t] + ("0" if x[t] == "1" else "1") + x[t + 1:]
    return x


def snapshots(spec: MaCircuitSpec, y: str, r: str) -> list[str]:
    states = [spec.initial(y, r)]
    for g in spec.circuit.gates:
        states.append(apply_gate(g, states[-1]))
    return states


def invert(c: ReversibleCircuit) -> ReversibleCircuit:
    # every gate in the set is self-inverse
    return ReversibleCircuit(c.width, tuple(reversed(c.gates)))


def unary(t: int, T: int) -> str:
    if not 0 <= t <= T:
        raise ValidationError(f"clock value {t} outside [0, {T}]")
    return "1" * t + "0" * (T - t)


def random_strings(q: int) -> Iterable[str]:
    return (from_int(v, q) for v in range(1 << q))


def accept_probability(spec: MaCircuitSpec, y: str) -> Fraction:
    if spec.q > MAX_RANDOM_BITS:
        raise ValidationError(f"q={spec.q} too large to enumerate (max {MAX_RANDOM_BITS})")
    accepted = sum(spec.circuit(spec.initial(y, r))[0] == "1" for r in random_strings(spec.q))
    return Fraction(accepted, 1 << spec.q)


def best_witness(spec: MaCircuitSpec) -> tuple[str, Fraction]:
    """Witness maximizing the acceptance probability (smallest such string)."""
    best = None
    for y in random_strings(spec.p):
        prob = accept_probability(spec, y)
        if best is None or prob > best[1]:
            best = (y, prob)
    return best


def is_permutation(c: ReversibleCircuit) -> bool:
    images = {c(from_int(v, c.width)) for v in range(1 << c.width)}
    return len(images) == 1 << c.width


# --------------------------------------------------------------------------
# text format

def parse_circuit(text: str) -> MaCircuitSpec:
    header = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "circuit":
                raise CircuitParseError(lineno, "expected header 'circuit p=.. a=.. q=..'")
            header = {}
            for f in fields[1:]:
                key, _, val = f.partition("=")
                if key not in ("p", "a", "q") or not val.isdigit():
                    raise CircuitParseError(lineno, f"bad header field {f!r}")
                header[key] = int(val)
            if set(header) != {"p", "a", "q"}:
                raise CircuitParseError(lineno, "header needs p, a and q")
            continue
        kind, args = fields[0], fields[1:]
        if kind not in ARITY:
            raise CircuitParseError(lineno, f"unknown gate {kind!r}")
        if len(args) != ARITY[kind] or not all(a.isdigit() for a in args):
            raise CircuitParseError(lineno, f"{kind} expects {ARITY[kind]} wire indices")
        try:
            gates.append((lineno, Gate(kind, tuple(int(a) for a in args))))
        except ValidationError as exc:
            raise CircuitParseError(lineno, str(exc)) from exc
    if header is None:
        raise CircuitParseError(0, "missing circuit header")
    width = header["p"] + header["a"] + header["q"]
    for lineno, g in gates:
        if max(g.wires) >= width:
            raise CircuitParseError(lineno, f"gate {g} exceeds width {width}")
    if not gates:
        raise CircuitParseError(0, "circuit has no gates")
    circuit = ReversibleCircuit(width, tuple(g for _, g in gates))
    return MaCircuitSpec(circuit, header["p"], header["a"], header["q"])


def format_circuit(spec: MaCircuitSpec) -> str:
    lines = [f"circuit p={spec.p} a={spec.a} q={spec.q}"]
    lines += [str(g) for g in spec.circuit.gates]
    return "\n".join(lines) + "\n"


def enumerate_circuits(width: int, T: int, kinds: Sequence[str] = ("NOT", "CNOT", "CCNOT")):
    """Every circuit of ``T`` gates on ``width`` wires (small parameters only)."""
    choices = [
        Gate(kind, wires)
        for kind in kinds
        for wires in itertools.permutations(range(width), ARITY[kind])
    ]
    for gates in itertools.product(choices, repeat=T):
        yield ReversibleCircuit(width, gates)
