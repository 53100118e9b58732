import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import CIRCUITS, random_spec
from setcsp.circuits import (CCNOT, CNOT, NOT, CircuitParseError, Gate, MaCircuitSpec, ReversibleCircuit,
                             accept_probability, apply_gate, best_witness, enumerate_circuits,
                             format_circuit, invert, is_permutation, parse_circuit, snapshots, unary)
from setcsp.core import ValidationError, all_strings


def test_gate_truth_tables():
    assert apply_gate(NOT(1), "000") == "010"
    assert apply_gate(CNOT(0, 2), "100") == "101"
    assert apply_gate(CNOT(0, 2), "001") == "001"
    assert apply_gate(CCNOT(0, 1, 2), "110") == "111"
    assert apply_gate(CCNOT(0, 1, 2), "100") == "100"
    assert CCNOT(0, 1, 2).target == 2 and CCNOT(0, 1, 2).controls == (0, 1)


@pytest.mark.parametrize("kind,wires", [("NOT", (0, 1)), ("CNOT", (1, 1)), ("CCNOT", (0, 1)),
                                        ("SWAP", (0, 1)), ("NOT", (-1,))])
def test_bad_gates(kind, wires):
    with pytest.raises(ValidationError):
        Gate(kind, wires)


@given(st.integers(0, 2**32))
def test_every_gate_is_an_involution(seed):
    spec = random_spec(random.Random(seed))
    for g in spec.circuit.gates:
        for x in all_strings(spec.w):
            assert apply_gate(g, apply_gate(g, x)) == x


@given(st.integers(0, 2**32))
def test_invert_composes_to_identity(seed):
    c = random_spec(random.Random(seed)).circuit
    inv = invert(c)
    assert invert(inv) == c
    assert all(inv(c(x)) == x for x in all_strings(c.width))


def test_snapshots_and_clock():
    spec = parse_circuit((CIRCUITS / "toy4.circ").read_text())
    assert snapshots(spec, "1110", "") == ["1110", "1100", "1110", "1111"]
    assert [unary(t, 3) for t in range(4)] == ["000", "100", "110", "111"]
    assert accept_probability(spec, "1110") == 1
    assert accept_probability(spec, "0000") == 0


def test_acceptance_probability_averages_over_random_bits():
    # output copies the random bit
    spec = MaCircuitSpec(ReversibleCircuit(2, (CNOT(1, 0), NOT(1))), 0, 1, 1)
    assert accept_probability(spec, "") == Fraction(1, 2)
    assert best_witness(spec) == ("", Fraction(1, 2))


@given(st.integers(0, 2**32))
def test_format_parse_roundtrip(seed):
    spec = random_spec(random.Random(seed))
    assert parse_circuit(format_circuit(spec)) == spec


@pytest.mark.parametrize("text,line", [
    ("NOT 0\n", 1),
    ("circuit p=1 a=0\nNOT 0\n", 1),
    ("circuit p=2 a=0 q=0\nNOT 0\nCNOT 0 5\n", 3),
    ("# header next\ncircuit p=2 a=0 q=0\nFOO 1\n", 3),
    ("circuit p=2 a=0 q=0\nCNOT 1\n", 2),
    ("circuit p=2 a=0 q=0\nCNOT 1 1\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitParseError) as exc:
        parse_circuit(text)
    assert exc.value.lineno == line
    assert f"line {line}" in str(exc.value)


def test_empty_circuit_rejected():
    with pytest.raises(ValidationError):
        parse_circuit("circuit p=1 a=0 q=0\n")


def test_enumeration_count_and_permutations():
    circuits = list(enumerate_circuits(2, 2, kinds=("NOT", "CNOT")))
    # 2 NOTs + 2 CNOTs per position
    assert len(circuits) == 16
    assert all(is_permutation(c) for c in circuits)
