"""CZ skeletons of standard benchmark families.

Each generator returns the list of interacting pairs in program order; only
the two-qubit structure matters to the compiler.  Random families draw from
``random.Random(seed)`` so output is reproducible.
"""
from __future__ import annotations

import random
from typing import Callable

import networkx as nx

from .circuit import CzCircuit

__all__ = ["FAMILIES", "MIN_QUBITS", "generate", "generate_pairs", "to_qasm"]


def ghz(n: int, seed: int = 42) -> list[tuple[int, int]]:
    return [(i, i - 1) for i in range(n - 1, 0, -1)]


def dj(n: int, seed: int = 42) -> list[tuple[int, int]]:
    # oracle qubit n-1 is the hub of a star
    return [(i, n - 1) for i in range(n - 1)]


def qft(n: int, seed: int = 42) -> list[tuple[int, int]]:
    """Each controlled phase becomes two CZs; no final swaps."""
    out = []
    for target in range(n - 1, -1, -1):
        for ctrl in range(target - 1, -1, -1):
            out += [(ctrl, target), (ctrl, target)]
    return out


def wstate(n: int, seed: int = 42) -> list[tuple[int, int]]:
    down = [(i, i - 1) for i in range(n - 1, 0, -1)]
    up = [(i - 1, i) for i in range(n - 1, 0, -1)]
    return down + up


def qv(n: int, seed: int = 42, depth: int | None = None) -> list[tuple[int, int]]:
    """``depth`` rounds of random pairings, three CZs per paired block."""
    rng = random.Random(seed)
    out = []
    for _ in range(n if depth is None else depth):
        perm = list(range(n))
        rng.shuffle(perm)
        for k in range(n // 2):
            a, b = sorted((perm[2 * k], perm[2 * k + 1]))
            out += [(a, b)] * 3
    return out


def twolocal(n: int, seed: int = 42, reps: int = 3) -> list[tuple[int, int]]:
    """Full entanglement blocks; the random part lives in the rotation angles."""
    block = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return block * reps


def regular3(n: int, seed: int = 42) -> list[tuple[int, int]]:
    """One CZ per edge of a random 3-regular graph (one QAOA round)."""
    g = nx.random_regular_graph(3, n, seed=seed)
    return sorted(tuple(sorted(e)) for e in g.edges)


def ising(n: int, seed: int = 42, steps: int = 5) -> list[tuple[int, int]]:
    """Trotterised 1-D Ising chain: even bonds then odd bonds, two CZs each."""
    out = []
    for _ in range(steps):
        for parity in (0, 1):
            bonds = [(i, i + 1) for i in range(parity, n - 1, 2)]
            out += bonds + bonds
    return out


FAMILIES: dict[str, Callable[..., list[tuple[int, int]]]] = {
    "ghz": ghz,
    "dj": dj,
    "qft": qft,
    "wstate": wstate,
    "qv": qv,
    "twolocal": twolocal,
    "3regular": regular3,
    "ising": ising,
}

MIN_QUBITS = {"ghz": 2, "dj": 2, "qft": 2, "wstate": 2, "qv": 2, "twolocal": 2, "3regular": 4, "ising": 2}


def generate_pairs(family: str, n: int, seed: int = 42, **options) -> list[tuple[int, int]]:
    """Pairs for ``family``; ``options`` go to the family's generator (e.g. ``depth`` for qv)."""
    try:
        fn = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    if n < MIN_QUBITS[family]:
        raise ValueError(f"{family} needs at least {MIN_QUBITS[family]} qubits")
    if family == "3regular" and n % 2:
        raise ValueError("3regular needs an even qubit count")
    try:
        return fn(n, seed=seed, **options)
    except TypeError:
        raise ValueError(f"{family} does not take options {sorted(options)}") from None


def generate(family: str, n: int, seed: int = 42, **options) -> CzCircuit:
    return CzCircuit.from_pairs(n, generate_pairs(family, n, seed, **options), name=f"{family}_{n}")


def to_qasm(c: CzCircuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n}];"]
    lines += [f"cz q[{g.a}],q[{g.b}];" for g in c.gates]
    return "\n".join(lines) + "\n"
