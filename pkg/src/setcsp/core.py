"""Set-constraint satisfaction: bitstrings, set-constraints and frustration.

Bitstrings are plain ``str`` objects over ``'0'``/``'1'`` with index 0 on the
left.  Where a fixed width ``n`` is known, a string is also identified with the
integer whose binary expansion it is (index 0 is the most significant bit), so
lexicographic string order and integer order coincide.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

MAX_BITS = 63


class ValidationError(ValueError):
    """Raised when an instance, string or set violates its invariants."""


# --------------------------------------------------------------------------
# bitstring primitives

def check_bits(x: str, n: int | None = None) -> str:
    if not isinstance(x, str) or any(c not in "01" for c in x):
        raise ValidationError(f"not a bitstring: {x!r}")
    if n is not None and len(x) != n:
        raise ValidationError(f"expected {n} bits, got {len(x)}: {x!r}")
    return x


def restrict(x: str, J: Sequence[int]) -> str:
    """Return the bits of ``x`` at positions ``J``, in the order of ``J``."""
    for j in J:
        if not 0 <= j < len(x):
            raise ValidationError(f"index {j} out of range for {len(x)}-bit string")
    return "".join(x[j] for j in J)


def substitute(x: str, J: Sequence[int], pattern: str) -> str:
    """Return ``x`` with the positions ``J`` overwritten by ``pattern``."""
    if len(pattern) != len(J):
        raise ValidationError("pattern length does not match index tuple")
    out = list(x)
    for j, b in zip(J, pattern):
        out[j] = b
    return "".join(out)


def to_int(x: str) -> int:
    return int(x, 2) if x else 0


def from_int(v: int, n: int) -> str:
    return format(v, f"0{n}b") if n else ""


def all_strings(n: int) -> list[str]:
    return [from_int(v, n) for v in range(1 << n)]


# --------------------------------------------------------------------------
# data model

@dataclass(frozen=True)
class SetConstraint:
    """A local set-constraint: an ordered index tuple ``j`` and disjoint groups ``y``.

    Group strings are read in the order of ``j``: the first character of a
    pattern is the bit at ``j[0]``.
    """

    j: tuple[int, ...]
    y: tuple[frozenset[str], ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        j = tuple(int(i) for i in self.j)
        y = tuple(frozenset(g) for g in self.y)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "y", y)
        if len(set(j)) != len(j):
            raise ValidationError(f"repeated index in J={j}")
        if any(i < 0 for i in j):
            raise ValidationError(f"negative index in J={j}")
        lookup = {}
        for gi, group in enumerate(y):
            if not group:
                raise ValidationError("empty group in Y")
            for s in group:
                check_bits(s, len(j))
                if s in lookup:
                    raise ValidationError(f"groups overlap on pattern {s!r}")
                lookup[s] = gi
        object.__setattr__(self, "_lookup", lookup)

    @property
    def k(self) -> int:
        return len(self.j)

    def group_of(self, pattern: str) -> frozenset[str] | None:
        gi = self._lookup.get(pattern)
        return None if gi is None else self.y[gi]

    def max_group_size(self) -> int:
        return max((len(g) for g in self.y), default=0)

    def to_json(self) -> dict:
        return {"j": list(self.j), "y": [sorted(g) for g in self.y]}

    @classmethod
    def from_json(cls, obj: dict) -> "SetConstraint":
        return cls(tuple(obj["j"]), tuple(frozenset(g) for g in obj["y"]))


@dataclass(frozen=True)
class SetCspInstance:
    n: int
    constraints: tuple[SetConstraint, ...]
    epsilon: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not 0 <= self.n <= MAX_BITS:
            raise ValidationError(f"bit-width {self.n} outside [0, {MAX_BITS}]")
        if not self.constraints:
            raise ValidationError("an instance needs at least one constraint")
        for c in self.constraints:
            if any(i >= self.n for i in c.j):
                raise ValidationError(f"constraint index out of range for n={self.n}: {c.j}")
        if self.epsilon is not None:
            eps = Fraction(self.epsilon)
            if not 0 < eps < 1:
                raise ValidationError("epsilon must lie in (0, 1)")
            object.__setattr__(self, "epsilon", eps)

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def k(self) -> int:
        return max(c.k for c in self.constraints)

    def to_json(self) -> dict:
        obj = {"n": self.n, "constraints": [c.to_json() for c in self.constraints]}
        if self.epsilon is not None:
            obj["epsilon"] = str(self.epsilon)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "SetCspInstance":
        try:
            cons = tuple(SetConstraint.from_json(c) for c in obj["constraints"])
            eps = obj.get("epsilon")
            return cls(int(obj["n"]), cons, Fraction(eps) if eps is not None else None)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed instance: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class FrustrationReport:
    """Per-constraint ``(bad, longing)`` counts and the exact average frustration."""

    per_constraint: tuple[tuple[int, int], ...]
    size: int
    total: Fraction

    def value(self, i: int) -> Fraction:
        bad, longing = self.per_constraint[i]
        return Fraction(bad + longing, self.size)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "total": _frac_str(self.total),
            "per_constraint": [
                {"bad": b, "longing": l, "value": _frac_str(Fraction(b + l, self.size))}
                for b, l in self.per_constraint
            ],
        }


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# semantics

def is_bad(x: str, c: SetConstraint) -> bool:
    return c.group_of(restrict(x, c.j)) is None


def c_neighbors(x: str, c: SetConstraint) -> set[str]:
    """Strings that differ from ``x`` only on ``J(c)`` within the same group.

    A ``c``-bad string lies in no group and so has no neighbors.
    """
    pattern = restrict(x, c.j)
    group = c.group_of(pattern)
    if group is None:
        return set()
    return {substitute(x, c.j, p) for p in group if p != pattern}


def is_longing(x: str, S: set[str] | frozenset[str], c: SetConstraint) -> bool:
    if x not in S:
        raise ValidationError(f"{x!r} is not a member of the set")
    return any(y not in S for y in c_neighbors(x, c))


def check_set(S: Iterable[str], n: int) -> frozenset[str]:
    S = frozenset(S)
    if not S:
        raise ValidationError("the string set must be nonempty")
    for x in S:
        check_bits(x, n)
    return S


def satisfies(S: Iterable[str], c: SetConstraint) -> bool:
    S = frozenset(S)
    if not S:
        raise ValidationError("the string set must be nonempty")
    return not any(is_bad(x, c) or is_longing(x, S, c) for x in S)


def constraint_counts(S: frozenset[str], c: SetConstraint) -> tuple[int, int]:
    bad = longing = 0
    for x in S:
        if is_bad(x, c):
            bad += 1
        elif is_longing(x, S, c):
            longing += 1
    return bad, longing


def set_unsat(inst: SetCspInstance, S: Iterable[str]) -> FrustrationReport:
    S = check_set(S, inst.n)
    counts = tuple(constraint_counts(S, c) for c in inst.constraints)
    numerator = sum(b + l for b, l in counts)
    return FrustrationReport(counts, len(S), Fraction(numerator, inst.m * len(S)))


def bad_and_longing_unions(inst: SetCspInstance, S: Iterable[str]) -> tuple[set[str], set[str]]:
    """Strings of ``S`` that are bad (resp. longing) for at least one constraint."""
    S = check_set(S, inst.n)
    bad, longing = set(), set()
    for x in S:
        for c in inst.constraints:
            if is_bad(x, c):
                bad.add(x)
            elif is_longing(x, S, c):
                longing.add(x)
    return bad, longing


def embed_csp(n: int, constraints: Sequence[tuple[Sequence[int], Iterable[str]]],
              epsilon=None) -> SetCspInstance:
    """Turn classical constraints ``(J, allowed)`` into singleton-group set-constraints."""
    cons = tuple(
        SetConstraint(tuple(J), tuple(frozenset([s]) for s in sorted(set(allowed))))
        for J, allowed in constraints
    )
    return SetCspInstance(n, cons, epsilon)


def classical_unsat(constraints: Sequence[tuple[Sequence[int], Iterable[str]]], x: str) -> Fraction:
    """Fraction of classical constraints violated by the single string ``x``."""
    violated = sum(restrict(x, J) not in set(allowed) for J, allowed in constraints)
    return Fraction(violated, len(constraints))


# --------------------------------------------------------------------------
# integer kernels (strings identified with n-bit integers, index 0 = MSB)

class IntConstraint:
    """A set-constraint compiled to integer bit operations for width ``n``."""

    __slots__ = ("shifts", "mask", "group_index", "groups")

    def __init__(self, c: SetConstraint, n: int):
        self.shifts = tuple(n - 1 - j for j in c.j)
        self.mask = sum(1 << s for s in self.shifts)
        # local patterns as placed bits
        self.group_index = {}
        self.groups = []
        for gi, group in enumerate(c.y):
            placed = tuple(sorted(self._place(p) for p in group))
            self.groups.append(placed)
            for bits in placed:
                self.group_index[bits] = gi

    def _place(self, pattern: str) -> int:
        return sum(1 << s for s, b in zip(self.shifts, pattern) if b == "1")

    def is_bad(self, x: int) -> bool:
        return (x & self.mask) not in self.group_index

    def neighbors(self, x: int) -> list[int]:
        local = x & self.mask
        gi = self.group_index.get(local)
        if gi is None:
            return []
        rest = x & ~self.mask
        return [rest | bits for bits in self.groups[gi] if bits != local]


def int_kernel(inst: SetCspInstance) -> list[IntConstraint]:
    return [IntConstraint(c, inst.n) for c in inst.constraints]
