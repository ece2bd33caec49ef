import json
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from dasatom.arch import GridArch, arch_for, may_run_parallel
from dasatom.circuit import CzCircuit, layer_circuit
from dasatom.embed import Mapping
from dasatom.generators import generate
from dasatom.schedule import (
    Counters,
    GateNotExecutable,
    Schedule,
    ScheduledGate,
    Stage,
    compile_circuit,
    schedule_gates,
    verify_schedule,
)

QFT5_FIRST = Mapping(((0, 2), (1, 0), (0, 0), (1, 1), (0, 1)))


def qft5():
    c = generate("qft", 5)
    return c, arch_for(5, r_int="sqrt:2", r_restr="sqrt:8")


def kinds(violations):
    return {v.kind for v in violations}


def test_chain_compiles_without_movement():
    c = generate("ghz", 20)
    s = compile_circuit(c, arch_for(20))
    assert s.counters == Counters(n=20, m=19, h=19, s=0, D=0.0, M=0, P=1)
    assert verify_schedule(s, c, arch_for(20)) == []


def test_qft5_compiles_with_movement():
    c, arch = qft5()
    s = compile_circuit(c, arch)
    assert s.counters.P == 2 and s.counters.M >= 1
    assert s.counters.h == s.counters.m == 20
    assert s.counters.s == 2 * sum(len(st.batch.moves) for st in s.stages if st.kind == "move")
    assert verify_schedule(s, c, arch) == []


def test_empty_circuit():
    c = CzCircuit.from_pairs(3, [])
    s = compile_circuit(c, arch_for(3))
    assert s.stages == () and s.counters == Counters(n=3)
    assert verify_schedule(s, c, arch_for(3)) == []


def test_serial_stage_per_gate():
    c = layer_circuit(CzCircuit.from_pairs(5, [(0, 1), (1, 2)] * 15))
    arch = arch_for(5)
    f = Mapping(((0, 0), (1, 0), (2, 0), (0, 1), (1, 1)))
    stages = schedule_gates(c, range(c.depth), f, arch, "serial")
    assert len(stages) == 30
    assert [st.gates[0].index for st in stages] == list(range(30))


def test_packed_far_gates_share_a_stage():
    arch = GridArch.from_factors(6, 3.0, "1", "2")
    c = layer_circuit(CzCircuit.from_pairs(4, [(0, 1), (2, 3)]))
    f = Mapping(((0, 0), (1, 0), (4, 5), (5, 5)))
    assert len(schedule_gates(c, range(1), f, arch, "packed")) == 1
    near = Mapping(((0, 0), (1, 0), (2, 0), (3, 0)))
    assert len(schedule_gates(c, range(1), near, arch, "packed")) == 2


def test_packed_respects_restriction_in_qft5():
    c, arch = qft5()
    c = layer_circuit(c)
    stages = schedule_gates(c, range(10), QFT5_FIRST, arch, "packed")
    where = {}
    for i, st in enumerate(stages):
        for g in st.gates:
            where.setdefault(frozenset((g.a, g.b)), set()).add(i)
    assert not where[frozenset((1, 3))] & where[frozenset((0, 4))]
    assert sum(len(st.gates) for st in stages) == 16


def test_gate_not_executable():
    c = layer_circuit(CzCircuit.from_pairs(3, [(0, 2)]))
    f = Mapping(((0, 0), (1, 0), (2, 2)))
    with pytest.raises(GateNotExecutable):
        schedule_gates(c, range(1), f, GridArch.from_factors(3, 3.0, "1", "2"), "serial")


def test_unknown_mode():
    c, arch = qft5()
    with pytest.raises(ValueError):
        schedule_gates(layer_circuit(c), range(1), QFT5_FIRST, arch, "eager")


class TestVerifier:
    def test_gate_out_of_range(self):
        # distance 3d under r_int = 2
        arch = GridArch.from_factors(4)
        c = CzCircuit.from_pairs(2, [(0, 1)])
        f = Mapping(((0, 0), (3, 0)))
        gate = ScheduledGate(0, 0, 1, (0, 0), (3, 0))
        s = Schedule(2, f, (Stage("rydberg", (gate,)),), Counters(2, 1, 1, 0, 0.0, 0, 1), "serial", (range(1),), arch)
        assert kinds(verify_schedule(s, c, arch)) == {"GateOutOfRange"}

    def test_distance_counter_mismatch(self):
        c, arch = qft5()
        s = compile_circuit(c, arch)
        bad = replace(s, counters=replace(s.counters, D=s.counters.D + 1))
        assert kinds(verify_schedule(bad, c, arch)) == {"CounterMismatch"}

    def test_swapped_moves(self):
        c, arch = qft5()
        s = compile_circuit(c, arch)
        idx = [i for i, st in enumerate(s.stages) if st.kind == "move"]
        stages = list(s.stages)
        stages[idx[0]], stages[idx[1]] = stages[idx[1]], stages[idx[0]]
        assert "OccupancyViolation" in kinds(verify_schedule(replace(s, stages=tuple(stages)), c, arch))

    def test_wrong_circuit(self):
        c, arch = qft5()
        s = compile_circuit(c, arch)
        other = CzCircuit.from_pairs(5, c.pairs()[:10])
        assert "GateCoverage" in kinds(verify_schedule(s, other, arch))

    def test_order_violation(self):
        c = CzCircuit.from_pairs(3, [(0, 1), (1, 2)])
        arch = arch_for(3)
        s = compile_circuit(c, arch)
        flipped = replace(s, stages=s.stages[::-1])
        assert "OrderViolation" in kinds(verify_schedule(flipped, c, arch))

    def test_parallel_violation(self):
        arch = GridArch.from_factors(3, 3.0, "1", "2")
        c = CzCircuit.from_pairs(4, [(0, 1), (2, 3)])
        f = Mapping(((0, 0), (1, 0), (0, 1), (1, 1)))
        g0 = ScheduledGate(0, 0, 1, (0, 0), (1, 0))
        g1 = ScheduledGate(1, 2, 3, (0, 1), (1, 1))
        s = Schedule(4, f, (Stage("rydberg", (g0, g1)),), Counters(4, 2, 1, 0, 0.0, 0, 1), "packed", (range(1),), arch)
        assert kinds(verify_schedule(s, c, arch)) == {"ParallelViolation"}

    def test_missing_move_breaks_positions(self):
        c, arch = qft5()
        s = compile_circuit(c, arch)
        stages = tuple(st for st in s.stages if st.kind != "move")
        assert verify_schedule(replace(s, stages=stages), c, arch)


def test_json_round_trip_and_determinism():
    c, arch = qft5()
    s = compile_circuit(c, arch)
    text = json.dumps(s.to_json(), indent=2)
    assert json.dumps(compile_circuit(c, arch).to_json(), indent=2) == text
    back = Schedule.from_json(json.loads(text))
    assert json.dumps(back.to_json(), indent=2) == text
    assert verify_schedule(back, c, arch) == []


circuits = st.integers(2, 9).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1]), max_size=30),
        st.sampled_from([("1", "2"), ("sqrt:2", "sqrt:8"), ("2", "4")]),
    )
)


@settings(max_examples=80, deadline=None)
@given(circuits, st.sampled_from(["serial", "packed"]))
def test_compiled_schedules_verify(case, mode):
    n, pairs, (r_int, r_restr) = case
    c = CzCircuit.from_pairs(n, pairs)
    arch = arch_for(n, r_int=r_int, r_restr=r_restr)
    s = compile_circuit(c, arch, mode=mode)
    assert verify_schedule(s, c, arch) == []
    if mode == "serial":
        assert s.counters.h == s.counters.m
    else:
        assert s.counters.h <= s.counters.m
        for st_ in s.stages:
            for i, a in enumerate(st_.gates):
                for b in st_.gates[i + 1:]:
                    assert may_run_parallel((a.pa, a.pb), (b.pa, b.pb), arch)
