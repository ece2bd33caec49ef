"""Compiled schedules: Rydberg stages interleaved with movement stages."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .arch import GridArch, connected, may_run_parallel
from .circuit import CzCircuit
from .divide import Division, Violation, divide_circuit
from .embed import DEFAULT_LIMIT, Mapping
from .route import Move, MoveBatch, RouteError, _apply, check_batch, route

__all__ = [
    "ScheduledGate",
    "Stage",
    "Counters",
    "Schedule",
    "schedule_gates",
    "compile_circuit",
    "verify_schedule",
    "GateNotExecutable",
]

Mode = Literal["serial", "packed"]
MODES = ("serial", "packed")


class GateNotExecutable(RuntimeError):
    pass


@dataclass(frozen=True)
class ScheduledGate:
    index: int
    a: int
    b: int
    pa: tuple
    pb: tuple

    def to_dict(self) -> dict:
        return {"gate": self.index, "qubits": [self.a, self.b], "points": [list(self.pa), list(self.pb)]}

    @classmethod
    def from_dict(cls, d: dict) -> "ScheduledGate":
        (a, b), (pa, pb) = d["qubits"], d["points"]
        return cls(int(d["gate"]), int(a), int(b), tuple(pa), tuple(pb))


@dataclass(frozen=True)
class Stage:
    kind: Literal["rydberg", "move"]
    gates: tuple[ScheduledGate, ...] = ()
    batch: MoveBatch | None = None

    def to_dict(self) -> dict:
        if self.kind == "rydberg":
            return {"type": "rydberg", "gates": [g.to_dict() for g in self.gates]}
        return {"type": "move", **self.batch.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "Stage":
        if d["type"] == "rydberg":
            return cls("rydberg", tuple(ScheduledGate.from_dict(g) for g in d["gates"]))
        if d["type"] == "move":
            moves = tuple(Move(int(m["q"]), tuple(m["from"]), tuple(m["to"])) for m in d["moves"])
            return cls("move", batch=MoveBatch(moves, float(d["max_distance_um"]), bool(d.get("parking", False))))
        raise ValueError(f"unknown stage type {d['type']!r}")


@dataclass(frozen=True)
class Counters:
    n: int = 0
    m: int = 0
    h: int = 0
    s: int = 0
    D: float = 0.0
    M: int = 0
    P: int = 0

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "h": self.h, "s": self.s, "D": self.D, "M": self.M, "P": self.P}


def _counters(n: int, m: int, stages, P: int) -> Counters:
    moves = [s.batch for s in stages if s.kind == "move"]
    return Counters(
        n=n,
        m=m,
        h=sum(1 for s in stages if s.kind == "rydberg"),
        s=2 * sum(len(b.moves) for b in moves),
        D=round(math.fsum(b.max_distance_um for b in moves), 6),
        M=len(moves),
        P=P,
    )


@dataclass(frozen=True)
class Schedule:
    n: int
    initial: Mapping | None
    stages: tuple[Stage, ...]
    counters: Counters
    mode: str = "serial"
    subcircuits: tuple[range, ...] = ()
    arch: GridArch | None = None
    name: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "mode": self.mode,
            "arch": self.arch.to_dict() if self.arch else None,
            "counters": self.counters.to_dict(),
            "subcircuits": [[iv.start, iv.stop - 1] for iv in self.subcircuits],
            "initial_mapping": self.initial.to_list() if self.initial else [],
            "stages": [s.to_dict() for s in self.stages],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Schedule":
        init = data.get("initial_mapping") or []
        c = data["counters"]
        return cls(
            n=int(data["n"]),
            initial=Mapping(tuple(tuple(p) for p in init)) if init else None,
            stages=tuple(Stage.from_dict(s) for s in data["stages"]),
            counters=Counters(int(c["n"]), int(c["m"]), int(c["h"]), int(c["s"]), float(c["D"]), int(c["M"]), int(c["P"])),
            mode=data.get("mode", "serial"),
            subcircuits=tuple(range(a, b + 1) for a, b in data.get("subcircuits", [])),
            arch=GridArch.from_dict(data["arch"]) if data.get("arch") else None,
            name=data.get("name", ""),
        )


def schedule_gates(c: CzCircuit, sub: range, f: Mapping, arch: GridArch, mode: Mode = "serial") -> list[Stage]:
    """Rydberg stages for the gates of layer interval ``sub`` under mapping ``f``.

    ``serial`` runs one gate per stage in circuit order.  ``packed`` fills
    stages first-fit within each layer, subject to the restriction radius.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    c = c.layered()

    def place(gi: int) -> ScheduledGate:
        g = c.gates[gi]
        pa, pb = f[g.a], f[g.b]
        if not connected(pa, pb, arch):
            raise GateNotExecutable(f"gate {gi} on {g.qubits}: points {pa}, {pb} beyond interaction radius")
        return ScheduledGate(gi, g.a, g.b, tuple(pa), tuple(pb))

    if mode == "serial":
        return [Stage("rydberg", (place(g.index),)) for g in c.gates_in(sub)]

    stages: list[Stage] = []
    for li in sub:
        bins: list[list[ScheduledGate]] = []
        for gi in c.layers[li]:
            sg = place(gi)
            for members in bins:
                if all(may_run_parallel((sg.pa, sg.pb), (o.pa, o.pb), arch) for o in members):
                    members.append(sg)
                    break
            else:
                bins.append([sg])
        stages.extend(Stage("rydberg", tuple(b)) for b in bins)
    return stages


def compile_circuit(
    c: CzCircuit,
    arch: GridArch,
    mode: Mode = "serial",
    limit: int | None = DEFAULT_LIMIT,
    prev_chain: bool = True,
    division: Division | None = None,
) -> Schedule:
    """Divide, embed, schedule and route ``c`` on ``arch``."""
    c = c.layered()
    if c.n > arch.size:
        raise ValueError(f"{c.n} qubits do not fit a {arch.b}x{arch.b} grid")
    div = division or divide_circuit(c, arch, prev_chain=prev_chain, limit=limit)
    stages: list[Stage] = []
    for i, (sub, f) in enumerate(zip(div.subcircuits, div.embeddings)):
        if i:
            plan = route(div.embeddings[i - 1], f, arch)
            stages.extend(Stage("move", batch=b) for b in plan.batches)
        stages.extend(schedule_gates(c, sub, f, arch, mode))
    initial = div.embeddings[0] if div.embeddings else None
    counters = _counters(c.n, c.m, stages, div.k)
    return Schedule(c.n, initial, tuple(stages), counters, mode, div.subcircuits, arch, c.name)


def verify_schedule(sched: Schedule, c: CzCircuit, arch: GridArch) -> list[Violation]:
    """Re-derive every schedule invariant; an empty list means valid."""
    c = c.layered()
    out: list[Violation] = []
    if sched.n != c.n:
        out.append(Violation("QubitCount", f"schedule has n={sched.n}, circuit n={c.n}"))
        return out
    if sched.initial is None:
        if c.n and any(s.kind == "rydberg" or s.kind == "move" for s in sched.stages):
            out.append(Violation("InvalidMapping", "schedule has stages but no initial mapping"))
            return out
        pos: dict = {}
    else:
        if len(sched.initial) != c.n or not sched.initial.within(arch):
            out.append(Violation("InvalidMapping", "initial mapping is not a total in-grid placement"))
            return out
        pos = {q: tuple(p) for q, p in enumerate(sched.initial)}
    occ = {p: q for q, p in pos.items()}

    seen: dict[int, int] = {}
    last_on_qubit = [-1] * c.n
    for si, st in enumerate(sched.stages):
        if st.kind == "move":
            try:
                check_batch(st.batch.moves, occ)
            except RouteError as exc:
                out.append(Violation(type(exc).__name__, f"stage {si}: {exc}"))
                return out
            _apply(st.batch.moves, occ, pos)
            expect = max((m.length for m in st.batch.moves), default=0.0) * arch.d
            if abs(expect - st.batch.max_distance_um) > 1e-6:
                out.append(Violation("CounterMismatch", f"stage {si}: max distance {st.batch.max_distance_um} != {expect}"))
            continue
        qubits: set[int] = set()
        for g in st.gates:
            if not 0 <= g.index < c.m:
                out.append(Violation("GateCoverage", f"stage {si}: unknown gate {g.index}"))
                continue
            src = c.gates[g.index]
            if {g.a, g.b} != {src.a, src.b}:
                out.append(Violation("GateMismatch", f"stage {si}: gate {g.index} acts on {src.qubits}, not {(g.a, g.b)}"))
            if g.a in qubits or g.b in qubits:
                out.append(Violation("QubitClash", f"stage {si}: qubit reused"))
            qubits.update((g.a, g.b))
            pa, pb = pos.get(g.a), pos.get(g.b)
            if tuple(g.pa) != pa or tuple(g.pb) != pb:
                out.append(Violation("PositionMismatch", f"stage {si}: gate {g.index} listed at {g.pa},{g.pb}, atoms at {pa},{pb}"))
            if pa is None or pb is None or not (arch.contains(pa) and arch.contains(pb)) or not connected(pa, pb, arch):
                out.append(Violation("GateOutOfRange", f"stage {si}: gate {g.index} at {pa},{pb} beyond the interaction radius"))
            if g.index in seen:
                out.append(Violation("GateCoverage", f"gate {g.index} executed twice"))
            seen[g.index] = si
            for q in (src.a, src.b):
                if g.index < last_on_qubit[q]:
                    out.append(Violation("OrderViolation", f"gate {g.index} on qubit {q} runs after gate {last_on_qubit[q]}"))
                last_on_qubit[q] = max(last_on_qubit[q], g.index)
        gl = list(st.gates)
        for i in range(len(gl)):
            for j in range(i + 1, len(gl)):
                a, b = gl[i], gl[j]
                if {a.a, a.b} & {b.a, b.b}:
                    continue
                pts_a, pts_b = (tuple(a.pa), tuple(a.pb)), (tuple(b.pa), tuple(b.pb))
                if set(pts_a) & set(pts_b) or not may_run_parallel(pts_a, pts_b, arch):
                    out.append(Violation("ParallelViolation", f"stage {si}: gates {a.index} and {b.index} violate the restriction radius"))
    missing = [g.index for g in c.gates if g.index not in seen]
    if missing:
        out.append(Violation("GateCoverage", f"{len(missing)} gates never executed (first: {missing[0]})"))
    for q, p in pos.items():
        if not arch.contains(p):
            out.append(Violation("OffGrid", f"qubit {q} ends at {p}"))

    expect = _counters(c.n, c.m, sched.stages, len(sched.subcircuits))
    got = sched.counters
    for name in ("n", "m", "h", "s", "M", "P"):
        if getattr(got, name) != getattr(expect, name):
            out.append(Violation("CounterMismatch", f"{name}={getattr(got, name)}, recomputed {getattr(expect, name)}"))
    if abs(got.D - expect.D) > 1e-6:
        out.append(Violation("CounterMismatch", f"D={got.D}, recomputed {expect.D}"))
    return out
