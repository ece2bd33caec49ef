"""Greedy layer-granular division of a CZ circuit into embeddable blocks."""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .arch import GridArch
from .circuit import CzCircuit
from .embed import DEFAULT_LIMIT, Mapping, choose_embedding, embeddable, find_embeddings, is_embedding

__all__ = ["Division", "Violation", "UnembeddableLayer", "divide_circuit", "verify_division"]


class UnembeddableLayer(RuntimeError):
    def __init__(self, layer: int):
        self.layer = layer
        super().__init__(f"CZ layer {layer} alone does not embed in the architecture")


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}" if self.detail else self.kind


@dataclass(frozen=True)
class Division:
    """Consecutive layer intervals with one embedding per interval."""

    subcircuits: tuple[range, ...]
    embeddings: tuple[Mapping, ...]

    @property
    def k(self) -> int:
        return len(self.subcircuits)


def _graph(n: int, edges) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


def _layer_edges(c: CzCircuit, li: int) -> set[tuple[int, int]]:
    return {tuple(sorted(c.gates[gi].qubits)) for gi in c.layers[li]}


def divide_circuit(
    c: CzCircuit,
    arch: GridArch,
    prev_chain: bool = True,
    limit: int | None = DEFAULT_LIMIT,
) -> Division:
    """Split ``c`` into maximal runs of layers whose interaction graph embeds.

    A run grows one layer at a time; it closes as soon as the next layer
    would make it non-embeddable.  The last embedding found for the growing
    run is kept as a witness and re-checked first, so a fresh search only
    happens when the witness stops working.  Once the intervals are fixed,
    each gets up to ``limit`` candidate embeddings and the one closest to the
    previous interval's embedding is kept (when ``prev_chain`` is set).
    """
    c = c.layered()
    n = c.n
    intervals: list[range] = []
    start = 0
    edges: set[tuple[int, int]] = set()
    witness: Mapping | None = None
    for li in range(len(c.layers)):
        grown = edges | _layer_edges(c, li)
        g = _graph(n, grown)
        if witness is not None and is_embedding(witness, g, arch):
            edges = grown
            continue
        found = embeddable(g, arch)
        if found is not None:
            witness, edges = found, grown
            continue
        if li == start:
            raise UnembeddableLayer(li)
        intervals.append(range(start, li))
        start = li
        edges = _layer_edges(c, li)
        witness = embeddable(_graph(n, edges), arch)
        if witness is None:
            raise UnembeddableLayer(li)
    if len(c.layers):
        intervals.append(range(start, len(c.layers)))

    embeddings: list[Mapping] = []
    prev: Mapping | None = None
    for iv in intervals:
        bias = prev if prev_chain else None
        cands = find_embeddings(_graph(n, _interval_edges(c, iv)), arch, limit=limit, prev=bias)
        chosen = choose_embedding(cands, bias)
        embeddings.append(chosen)
        prev = chosen
    return Division(tuple(intervals), tuple(embeddings))


def _interval_edges(c: CzCircuit, iv: range) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for li in iv:
        out |= _layer_edges(c, li)
    return out


def verify_division(div: Division, c: CzCircuit, arch: GridArch) -> list[Violation]:
    c = c.layered()
    out: list[Violation] = []
    n_layers = len(c.layers)
    if len(div.embeddings) != len(div.subcircuits):
        out.append(Violation("EmbeddingCount", f"{len(div.embeddings)} embeddings for {len(div.subcircuits)} subcircuits"))
    expected = 0
    for i, iv in enumerate(div.subcircuits):
        if iv.step != 1 or len(iv) == 0:
            out.append(Violation("EmptyInterval", f"subcircuit {i}: {iv}"))
            continue
        if iv.start < expected:
            out.append(Violation("IntervalOverlap", f"subcircuit {i} starts at layer {iv.start} < {expected}"))
        elif iv.start > expected:
            out.append(Violation("IntervalGap", f"layers {expected}..{iv.start - 1} uncovered"))
        expected = max(expected, iv.stop)
    if expected != n_layers:
        out.append(Violation("Coverage", f"intervals end at layer {expected}, circuit has {n_layers}"))
    if out:
        return out

    for i, (iv, emb) in enumerate(zip(div.subcircuits, div.embeddings)):
        if len(emb) != c.n or not emb.within(arch):
            out.append(Violation("InvalidEmbedding", f"subcircuit {i}: mapping not total on the grid"))
            continue
        if not is_embedding(emb, _graph(c.n, _interval_edges(c, iv)), arch):
            out.append(Violation("InvalidEmbedding", f"subcircuit {i}: some gate exceeds the interaction radius"))
    for i, iv in enumerate(div.subcircuits[:-1]):
        grown = _interval_edges(c, range(iv.start, iv.stop + 1))
        if embeddable(_graph(c.n, grown), arch) is not None:
            out.append(Violation("NotMaximal", f"subcircuit {i} could absorb layer {iv.stop}"))
    return out
