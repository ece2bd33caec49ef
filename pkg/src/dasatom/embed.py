"""Subgraph-monomorphism search of interaction graphs into the grid.

The search is a VF2-style backtracking matcher over bitmask domains: grid
points are numbered row-major, every program vertex keeps a bitmask of the
points it could still take, and assigning a vertex narrows the domains of its
unmatched neighbours (forward checking).  Candidate points are tried in
ascending row-major order, so enumeration is deterministic.

Only the *core* (vertices with at least one edge) is searched.  Isolated
vertices are placed afterwards, either at their previous position or on the
first free points in row-major order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping as TMapping, Sequence

import networkx as nx

from .arch import GridArch, GridPoint, connected

__all__ = [
    "Mapping",
    "is_embedding",
    "find_embeddings",
    "iter_embeddings",
    "choose_embedding",
    "complete_mapping",
    "match_order",
    "displacement",
    "embeddable",
]

DEFAULT_LIMIT = 1000


@dataclass(frozen=True)
class Mapping:
    """Injective assignment of program qubits ``0..n-1`` to grid points."""

    assignment: tuple[GridPoint, ...]

    def __post_init__(self) -> None:
        pts = tuple(GridPoint(*p) for p in self.assignment)
        object.__setattr__(self, "assignment", pts)
        if len(set(pts)) != len(pts):
            raise ValueError("mapping is not injective")

    @classmethod
    def from_dict(cls, d: TMapping[int, Sequence[int]]) -> "Mapping":
        n = len(d)
        if sorted(d) != list(range(n)):
            raise ValueError("mapping must be defined on qubits 0..n-1")
        return cls(tuple(GridPoint(*d[q]) for q in range(n)))

    def __getitem__(self, q: int) -> GridPoint:
        return self.assignment[q]

    def __len__(self) -> int:
        return len(self.assignment)

    def __iter__(self) -> Iterator[GridPoint]:
        return iter(self.assignment)

    def within(self, arch: GridArch) -> bool:
        return all(arch.contains(p) for p in self.assignment)

    def to_list(self) -> list[list[int]]:
        return [[p.x, p.y] for p in self.assignment]


def is_embedding(m: Mapping, ig: nx.Graph, arch: GridArch) -> bool:
    return all(connected(m[u], m[v], arch) for u, v in ig.edges)


def displacement(a: Mapping, b: Mapping) -> float:
    """Sum of per-qubit Euclidean displacements, in grid units."""
    return math.fsum(math.hypot(p.x - q.x, p.y - q.y) for p, q in zip(a, b))


def match_order(ig: nx.Graph) -> list[int]:
    """Order in which core vertices are matched.

    Highest degree first (ties: lowest id); afterwards the vertex with the
    most already-ordered neighbours, then highest degree, then lowest id.
    """
    core = [v for v in ig.nodes if ig.degree(v) > 0]
    deg = {v: ig.degree(v) for v in core}
    order: list[int] = []
    links = {v: 0 for v in core}
    remaining = set(core)
    while remaining:
        v = min(remaining, key=lambda u: (-links[u], -deg[u], u))
        order.append(v)
        remaining.discard(v)
        for w in ig.neighbors(v):
            if w in remaining:
                links[w] += 1
    return order


class _Matcher:
    def __init__(self, ig: nx.Graph, arch: GridArch):
        self.arch = arch
        self.order = match_order(ig)
        pos = {v: i for i, v in enumerate(self.order)}
        n_pts = arch.size
        adj = [0] * n_pts
        for i, nbrs in enumerate(arch.adjacency):
            for q in nbrs:
                adj[i] |= 1 << arch.index[q]
        self.adj = adj
        arch_deg = [a.bit_count() for a in adj]
        # neighbours of each ordered vertex that are matched later
        self.fwd: list[list[int]] = []
        self.init_dom: list[int] = []
        for i, v in enumerate(self.order):
            nb = [pos[w] for w in ig.neighbors(v)]
            self.fwd.append(sorted(j for j in nb if j > i))
            dv = ig.degree(v)
            mask = 0
            for p in range(n_pts):
                if arch_deg[p] >= dv:
                    mask |= 1 << p
            self.init_dom.append(mask)
        self.first_mask: int | None = None

    def feasible(self) -> bool:
        k = len(self.order)
        return k <= self.arch.size and all(self.init_dom)

    def run(self) -> Iterator[tuple[int, ...]]:
        k = len(self.order)
        if k == 0:
            yield ()
            return
        if not self.feasible():
            return
        img = [0] * k
        yield from self._extend(0, list(self.init_dom), 0, img)

    def _extend(self, i: int, dom: list[int], used: int, img: list[int]) -> Iterator[tuple[int, ...]]:
        k = len(self.order)
        cand = dom[i] & ~used
        if i == 0 and self.first_mask is not None:
            cand &= self.first_mask
        fwd = self.fwd[i]
        nfwd = len(fwd)
        adj = self.adj
        while cand:
            low = cand & -cand
            cand ^= low
            p = low.bit_length() - 1
            if (adj[p] & ~used).bit_count() < nfwd:
                continue
            img[i] = p
            if i + 1 == k:
                yield tuple(img)
                continue
            new_used = used | low
            new_dom = dom.copy()
            for j in fwd:
                new_dom[j] &= adj[p]
            free = ~new_used
            if all(new_dom[j] & free for j in range(i + 1, k)):
                yield from self._extend(i + 1, new_dom, new_used, img)


def _orbit_representatives(arch: GridArch) -> int:
    """Bitmask of one point per orbit of the square's symmetry group."""
    b = arch.b - 1
    mask = 0
    for i, (x, y) in enumerate(arch.points):
        images = {
            (x, y), (b - x, y), (x, b - y), (b - x, b - y),
            (y, x), (b - y, x), (y, b - x), (b - y, b - x),
        }
        if min(images, key=lambda p: (p[1], p[0])) == (x, y):
            mask |= 1 << i
    return mask


def embeddable(ig: nx.Graph, arch: GridArch) -> Mapping | None:
    """Some embedding of ``ig``, or ``None``.

    Grid symmetries are factored out by pinning the first matched vertex to
    one point per symmetry orbit, so this can return a different embedding
    than the first one :func:`find_embeddings` lists.
    """
    n = ig.number_of_nodes()
    if n > arch.size:
        return None
    matcher = _Matcher(ig, arch)
    matcher.first_mask = _orbit_representatives(arch)
    for img in matcher.run():
        core = {v: arch.points[p] for v, p in zip(matcher.order, img)}
        return complete_mapping(core, n, arch)
    return None


def complete_mapping(
    core: TMapping[int, GridPoint], n: int, arch: GridArch, prev: Mapping | None = None
) -> Mapping:
    """Place the qubits missing from ``core`` to obtain a total mapping.

    With ``prev`` given, a missing qubit keeps its previous point when that
    point is still free; the rest fill free points in row-major order.
    """
    taken = set(core.values())
    out: dict[int, GridPoint] = dict(core)
    missing = [q for q in range(n) if q not in core]
    if prev is not None:
        for q in missing:
            p = prev[q]
            if p not in taken and arch.contains(p):
                out[q] = p
                taken.add(p)
    free = (p for p in arch.points if p not in taken)
    for q in missing:
        if q not in out:
            out[q] = next(free)
    return Mapping(tuple(out[q] for q in range(n)))


def iter_embeddings(ig: nx.Graph, arch: GridArch, prev: Mapping | None = None) -> Iterator[Mapping]:
    n = ig.number_of_nodes()
    if sorted(ig.nodes) != list(range(n)):
        raise ValueError("interaction graph nodes must be 0..n-1")
    if n > arch.size:
        return
    matcher = _Matcher(ig, arch)
    pts = arch.points
    for img in matcher.run():
        core = {v: pts[p] for v, p in zip(matcher.order, img)}
        yield complete_mapping(core, n, arch, prev)


def find_embeddings(
    ig: nx.Graph, arch: GridArch, limit: int | None = DEFAULT_LIMIT, prev: Mapping | None = None
) -> list[Mapping]:
    """Up to ``limit`` embeddings of ``ig`` into ``arch`` (``None``: all).

    An empty list means the graph does not embed.
    """
    out = []
    for m in iter_embeddings(ig, arch, prev):
        out.append(m)
        if limit is not None and len(out) >= limit:
            break
    return out


def choose_embedding(candidates: Sequence[Mapping], prev: Mapping | None = None) -> Mapping:
    """Candidate with the least total displacement from ``prev`` (first wins ties)."""
    if not candidates:
        raise ValueError("no candidate embeddings")
    if prev is None:
        return candidates[0]
    best, best_cost = candidates[0], displacement(prev, candidates[0])
    for cand in candidates[1:]:
        cost = displacement(prev, cand)
        if cost < best_cost:
            best, best_cost = cand, cost
    return best
