"""Atom shuttling between two mappings.

Moves are batched greedily: at every step the pending moves whose
destination is free (or held by an atom that leaves in the same batch) form
a conflict graph, a greedy maximal independent set of it becomes one AOD
batch, and occupancy is updated.  When every pending move is blocked the
atoms form cycles; one atom on a cycle is parked on a free point to break it.

Coordinates are in grid units.  Parking may use half-integer points when the
grid is full.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .arch import GridArch, row_major
from .embed import Mapping

__all__ = [
    "Move",
    "MoveBatch",
    "RoutePlan",
    "RouteError",
    "OccupancyViolation",
    "IncompatibleBatch",
    "extract_moves",
    "compatible",
    "conflict_graph",
    "greedy_independent_set",
    "route",
    "replay",
    "check_batch",
]

Coord = tuple  # (x, y); ints on the grid, halves when parked


class RouteError(RuntimeError):
    pass


class OccupancyViolation(RouteError):
    pass


class IncompatibleBatch(RouteError):
    pass


def _c(p) -> Coord:
    return tuple(int(v) if float(v).is_integer() else float(v) for v in p)


@dataclass(frozen=True)
class Move:
    qubit: int
    src: Coord
    dst: Coord

    def __post_init__(self) -> None:
        object.__setattr__(self, "src", _c(self.src))
        object.__setattr__(self, "dst", _c(self.dst))
        if self.src == self.dst:
            raise ValueError(f"trivial move for qubit {self.qubit}")

    @property
    def as_tuple(self) -> tuple:
        return (*self.src, *self.dst)

    @property
    def length(self) -> float:
        """Euclidean length in grid units."""
        return math.hypot(self.dst[0] - self.src[0], self.dst[1] - self.src[1])

    def to_dict(self) -> dict:
        return {"q": self.qubit, "from": list(self.src), "to": list(self.dst)}


@dataclass(frozen=True)
class MoveBatch:
    moves: tuple[Move, ...]
    max_distance_um: float
    parking: bool = False

    @classmethod
    def of(cls, moves: Iterable[Move], d: float, parking: bool = False) -> "MoveBatch":
        moves = tuple(sorted(moves, key=lambda m: m.qubit))
        return cls(moves, max((m.length for m in moves), default=0.0) * d, parking)

    def to_dict(self) -> dict:
        out = {"moves": [m.to_dict() for m in self.moves], "max_distance_um": self.max_distance_um}
        if self.parking:
            out["parking"] = True
        return out


@dataclass(frozen=True)
class RoutePlan:
    batches: tuple[MoveBatch, ...] = ()

    @property
    def n_moves(self) -> int:
        return sum(len(b.moves) for b in self.batches)

    @property
    def transfers(self) -> int:
        # one load and one offload per moved atom
        return 2 * self.n_moves

    @property
    def total_max_distance(self) -> float:
        return math.fsum(b.max_distance_um for b in self.batches)

    def to_json(self) -> list[dict]:
        return [b.to_dict() for b in self.batches]


def extract_moves(f: Mapping, f2: Mapping) -> list[Move]:
    if len(f) != len(f2):
        raise ValueError(f"mappings cover {len(f)} and {len(f2)} qubits")
    return [Move(q, f[q], f2[q]) for q in range(len(f)) if f[q] != f2[q]]


def _sign(a, b) -> int:
    return (a > b) - (a < b)


def compatible(m1: Move, m2: Move) -> bool:
    """AOD rows and columns keep their relative order (and coincidences)."""
    return (
        _sign(m1.src[0], m2.src[0]) == _sign(m1.dst[0], m2.dst[0])
        and _sign(m1.src[1], m2.src[1]) == _sign(m1.dst[1], m2.dst[1])
    )


def conflict_graph(moves: Sequence[Move]) -> nx.Graph:
    """Nodes are indices into ``moves``; edges join incompatible pairs."""
    g = nx.Graph()
    g.add_nodes_from(range(len(moves)))
    for i in range(len(moves)):
        for j in range(i + 1, len(moves)):
            if not compatible(moves[i], moves[j]):
                g.add_edge(i, j)
    return g


def greedy_independent_set(g: nx.Graph, key) -> list:
    """Scan nodes by ``key`` and keep each one that has no kept neighbour."""
    chosen: list = []
    blocked: set = set()
    for v in sorted(g.nodes, key=key):
        if v in blocked:
            continue
        chosen.append(v)
        blocked.update(g.neighbors(v))
    return chosen


def check_batch(moves: Sequence[Move], occupancy: dict) -> None:
    """Raise if ``moves`` cannot run as one AOD batch from ``occupancy``.

    ``occupancy`` maps coordinates to qubits at batch start.
    """
    movers = {m.qubit for m in moves}
    dsts = set()
    for m in moves:
        if occupancy.get(m.src) != m.qubit:
            raise OccupancyViolation(f"qubit {m.qubit} is not at {m.src}")
        if m.dst in dsts:
            raise OccupancyViolation(f"two moves target {m.dst}")
        dsts.add(m.dst)
        holder = occupancy.get(m.dst)
        if holder is not None and holder not in movers:
            raise OccupancyViolation(f"qubit {m.qubit} targets {m.dst} held by stationary qubit {holder}")
    for i in range(len(moves)):
        for j in range(i + 1, len(moves)):
            if not compatible(moves[i], moves[j]):
                raise IncompatibleBatch(f"moves {moves[i].as_tuple} and {moves[j].as_tuple} cross")


def _apply(moves: Sequence[Move], occupancy: dict, pos: dict) -> None:
    for m in moves:
        del occupancy[m.src]
    for m in moves:
        occupancy[m.dst] = m.qubit
        pos[m.qubit] = m.dst


@dataclass
class _State:
    arch: GridArch
    pos: dict  # qubit -> coord
    occ: dict = field(default_factory=dict)  # coord -> qubit
    target: dict = field(default_factory=dict)  # qubit -> coord, pending only

    def __post_init__(self) -> None:
        self.occ = {p: q for q, p in self.pos.items()}

    def pending(self) -> list[Move]:
        return [Move(q, self.pos[q], t) for q, t in sorted(self.target.items())]

    def ready(self, m: Move, movers: set[int]) -> bool:
        holder = self.occ.get(m.dst)
        return holder is None or holder in movers


def _select_batch(pending: list[Move], state: _State) -> list[Move]:
    pending_q = {m.qubit for m in pending}
    cands = [m for m in pending if state.ready(m, pending_q)]
    if not cands:
        return []
    g = conflict_graph(cands)
    deg = dict(g.degree)
    picked = [cands[i] for i in greedy_independent_set(g, key=lambda i: (deg[i], cands[i].length, cands[i].qubit))]

    # Moves into a spot whose holder stays put cannot run; drop until stable.
    batch = list(picked)
    while True:
        movers = {m.qubit for m in batch}
        keep = [m for m in batch if state.ready(m, movers)]
        if len(keep) == len(batch):
            break
        batch = keep

    # Re-grow to a maximal batch over everything currently executable.
    order = sorted(pending, key=lambda m: (m.length, m.qubit))
    grew = True
    while grew:
        grew = False
        movers = {m.qubit for m in batch}
        for m in order:
            if m.qubit in movers or not state.ready(m, movers):
                continue
            if all(compatible(m, o) for o in batch):
                batch.append(m)
                movers.add(m.qubit)
                grew = True
    return batch


def _cycle_qubits(state: _State) -> set[int]:
    """Pending qubits lying on a cycle of 'my destination is held by' links."""
    nxt = {}
    for q, t in state.target.items():
        holder = state.occ.get(t)
        if holder is not None and holder in state.target:
            nxt[q] = holder
    on_cycle: set[int] = set()
    done: set[int] = set()
    for start in nxt:
        path, seen = [], {}
        q = start
        while q in nxt and q not in done and q not in seen:
            seen[q] = len(path)
            path.append(q)
            q = nxt[q]
        if q in seen:
            on_cycle.update(path[seen[q]:])
        done.update(path)
    return on_cycle


def _parking_spot(src: Coord, state: _State) -> Coord:
    arch = state.arch
    free = [p for p in arch.points if p not in state.occ]
    if free:
        return _c(min(free, key=lambda p: ((p[0] - src[0]) ** 2 + (p[1] - src[1]) ** 2, row_major(p))))
    # Full grid: the nearest unoccupied half-offset point.
    offs = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)]
    r = 0
    while True:
        for dx in range(-r, r + 1):
            for dy in range(-r, r + 1):
                if max(abs(dx), abs(dy)) != r:
                    continue
                for ox, oy in offs:
                    p = (src[0] + dx + ox, src[1] + dy + oy)
                    if p not in state.occ:
                        return _c(p)
        r += 1


def route(f: Mapping, f2: Mapping, arch: GridArch) -> RoutePlan:
    """Batches of compatible moves carrying every atom from ``f`` to ``f2``."""
    moves = extract_moves(f, f2)
    state = _State(arch, {q: _c(p) for q, p in enumerate(f)})
    state.target = {m.qubit: m.dst for m in moves}
    batches: list[MoveBatch] = []
    limit = 2 * len(f) + 1
    while state.target:
        if len(batches) > limit:
            raise RouteError("routing did not converge")
        pending = state.pending()
        batch = _select_batch(pending, state)
        if batch:
            _apply(batch, state.occ, state.pos)
            for m in batch:
                del state.target[m.qubit]
            batches.append(MoveBatch.of(batch, arch.d))
            continue
        cyc = _cycle_qubits(state)
        if not cyc:
            raise RouteError("blocked without a cycle")
        m = min((mv for mv in pending if mv.qubit in cyc), key=lambda mv: (mv.length, mv.qubit))
        park = Move(m.qubit, m.src, _parking_spot(m.src, state))
        _apply([park], state.occ, state.pos)
        batches.append(MoveBatch.of([park], arch.d, parking=True))
    return RoutePlan(tuple(batches))


def replay(plan: RoutePlan, start: Mapping, arch: GridArch | None = None) -> Mapping:
    """Execute ``plan`` from ``start`` checking every batch; return the final mapping."""
    pos = {q: _c(p) for q, p in enumerate(start)}
    occ = {p: q for q, p in pos.items()}
    for i, b in enumerate(plan.batches):
        try:
            check_batch(b.moves, occ)
        except RouteError as exc:
            raise type(exc)(f"batch {i}: {exc}") from None
        _apply(b.moves, occ, pos)
    final = [pos[q] for q in range(len(start))]
    for q, p in enumerate(final):
        if not all(float(v).is_integer() for v in p) or (arch is not None and not arch.contains(p)):
            raise OccupancyViolation(f"qubit {q} ends off-grid at {p}")
    return Mapping(tuple(final))
