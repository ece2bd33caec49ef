import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dasatom.circuit import (
    CzCircuit,
    CzGate,
    QasmError,
    dumps_canonical,
    interaction_graph,
    layer_circuit,
    loads_canonical,
    parse_qasm,
)
from dasatom.generators import generate


def longest_chain(n, pairs):
    """Brute-force critical path: longest sequence of gates where each shares a qubit with a later one."""
    if not pairs:
        return 0
    best = [1] * len(pairs)
    for j, (a, b) in enumerate(pairs):
        for i in range(j):
            if {a, b} & set(pairs[i]):
                best[j] = max(best[j], best[i] + 1)
    return max(best)


circuits = st.integers(2, 7).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1]),
            max_size=50,
        ),
    )
)


QFT5_TEXT = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[5];
creg c[5];
h q[0];
"""


def qft5_qasm():
    lines = [QFT5_TEXT]
    for a, b in generate("qft", 5).pairs():
        lines.append(f"rz(pi/4) q[{b}];\ncz q[{a}],q[{b}];\nrx(-pi/8) q[{a}];\ncx q[{a}],q[{b}];\n")
    lines.append("barrier q;\nmeasure q -> c;\n")
    return "".join(lines)


class TestParse:
    def test_qft5_keeps_only_two_qubit_gates(self):
        # every CP interaction appears as one cz plus one cx in the text
        c = parse_qasm(qft5_qasm())
        assert c.n == 5
        assert c.m == 40

    def test_qft5_skeleton(self):
        text = "OPENQASM 2.0;\nqreg q[5];\n" + "".join(f"cz q[{a}],q[{b}];\n" for a, b in generate("qft", 5).pairs())
        c = parse_qasm(text)
        assert c.m == 20
        assert {frozenset(p) for p in c.pairs()} == {frozenset(p) for p in itertools.combinations(range(5), 2)}

    def test_empty_body(self):
        c = parse_qasm('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\n')
        assert (c.n, c.m) == (3, 0)

    def test_self_loop_rejected(self):
        with pytest.raises(QasmError, match="a == b"):
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[0];\n")

    def test_error_reports_position(self):
        with pytest.raises(QasmError) as info:
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\n\n  cz q[0] q[1];\n")
        assert info.value.line == 4

    def test_three_qubit_gate_rejected(self):
        with pytest.raises(QasmError, match="3-qubit"):
            parse_qasm("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n")

    def test_index_out_of_range(self):
        with pytest.raises(QasmError, match="range"):
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[2];\n")

    def test_unknown_two_qubit_gate(self):
        with pytest.raises(QasmError):
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\nswap q[0],q[1];\n")

    def test_second_register_rejected(self):
        with pytest.raises(QasmError, match="single"):
            parse_qasm("OPENQASM 2.0;\nqreg a[2];\nqreg b[2];\n")

    def test_parameterised_gates_definitions_and_conditionals(self):
        text = """OPENQASM 2.0;
include "qelib1.inc";
gate mygate(theta) a, b { cx a, b; rz(theta) b; }
opaque magic a;
qreg q[3];
creg c[3];
u3(0.1, 0.2, -pi/2) q[0];
if (c == 1) x q[1];
reset q[2];
cx q[2], q[1];  // trailing comment
measure q[0] -> c[0];
"""
        c = parse_qasm(text)
        assert c.pairs() == [(2, 1)]


class TestLayering:
    def test_disjoint_gates_share_a_layer(self):
        assert layer_circuit(CzCircuit.from_pairs(4, [(0, 1), (2, 3)])).depth == 1

    def test_chain(self):
        c = layer_circuit(CzCircuit.from_pairs(4, [(0, 1), (1, 2), (2, 3)]))
        assert c.layers == ((0,), (1,), (2,))

    def test_qft5_layer_count(self):
        # critical path of the CP-decomposed QFT-5 skeleton (oracle: brute-force longest chain)
        c = generate("qft", 5)
        assert longest_chain(5, c.pairs()) == 14
        assert layer_circuit(c).depth == 14

    @settings(max_examples=200, deadline=None)
    @given(circuits)
    def test_depth_equals_longest_chain(self, case):
        n, pairs = case
        assert layer_circuit(CzCircuit.from_pairs(n, pairs)).depth == longest_chain(n, pairs)

    @settings(max_examples=200, deadline=None)
    @given(circuits)
    def test_layer_invariants(self, case):
        n, pairs = case
        c = layer_circuit(CzCircuit.from_pairs(n, pairs))
        assert sorted(i for layer in c.layers for i in layer) == list(range(len(pairs)))
        for layer in c.layers:
            qubits = [q for i in layer for q in pairs[i]]
            assert len(qubits) == len(set(qubits))
        where = c.layer_of()
        for q in range(n):
            on_q = [i for i, p in enumerate(pairs) if q in p]
            assert all(where[i] < where[j] for i, j in zip(on_q, on_q[1:]))

    @settings(max_examples=100, deadline=None)
    @given(circuits)
    def test_canonical_round_trip(self, case):
        n, pairs = case
        c = layer_circuit(CzCircuit.from_pairs(n, pairs))
        again = layer_circuit(loads_canonical(dumps_canonical(c)))
        assert again.pairs() == c.pairs()
        assert again.layers == c.layers
        assert dumps_canonical(again) == dumps_canonical(c)

    def test_invalid_gate_rejected(self):
        with pytest.raises(ValueError):
            CzCircuit(2, (CzGate(0, 1, 1),))
        with pytest.raises(ValueError):
            CzCircuit(2, (CzGate(0, 0, 2),))


class TestInteractionGraph:
    def test_qft5_full_is_complete(self):
        g = interaction_graph(generate("qft", 5))
        assert g.number_of_edges() == 10

    def test_qft5_tail(self):
        c = layer_circuit(generate("qft", 5))
        g = interaction_graph(c, range(10, 14))
        assert {frozenset(e) for e in g.edges} == {frozenset((0, 1)), frozenset((0, 2))}
        assert g.degree(3) == g.degree(4) == 0

    def test_empty_interval(self):
        c = layer_circuit(generate("qft", 5))
        g = interaction_graph(c, range(3, 3))
        assert g.number_of_nodes() == 5 and g.number_of_edges() == 0

    def test_invalid_interval(self):
        c = layer_circuit(generate("qft", 5))
        with pytest.raises(ValueError):
            interaction_graph(c, range(10, 20))

    @settings(max_examples=100, deadline=None)
    @given(circuits)
    def test_edge_bound(self, case):
        n, pairs = case
        g = interaction_graph(CzCircuit.from_pairs(n, pairs))
        assert g.number_of_edges() <= min(n * (n - 1) // 2, len(pairs))
