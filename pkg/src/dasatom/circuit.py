"""CZ-only circuit representation, OpenQASM 2.0 ingestion and ASAP layering.

Single-qubit gates carry no routing information on neutral-atom grids, so the
parser keeps only the two-qubit interactions (``cz`` and ``cx``) in program
order.  Layers are 0-indexed throughout the package; a contiguous block of
layers is represented by a plain :class:`range`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

import networkx as nx

__all__ = [
    "CzGate",
    "CzCircuit",
    "QasmError",
    "parse_qasm",
    "load_qasm",
    "layer_circuit",
    "interaction_graph",
    "dumps_canonical",
    "loads_canonical",
]


class QasmError(ValueError):
    """Raised on malformed or unsupported OpenQASM input."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class CzGate:
    index: int
    a: int
    b: int

    @property
    def qubits(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class CzCircuit:
    """Ordered CZ gates over ``n`` program qubits.

    ``layers`` is ``None`` until :func:`layer_circuit` has run; afterwards it
    holds one tuple of gate indices per CZ layer.
    """

    n: int
    gates: tuple[CzGate, ...] = ()
    layers: tuple[tuple[int, ...], ...] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        for pos, g in enumerate(self.gates):
            if g.index != pos:
                raise ValueError(f"gate at position {pos} carries index {g.index}")
            if g.a == g.b:
                raise ValueError(f"gate {pos} acts twice on qubit {g.a} (a == b)")
            if not (0 <= g.a < self.n and 0 <= g.b < self.n):
                raise ValueError(f"gate {pos} qubits {g.qubits} out of range for n={self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]], name: str = "") -> "CzCircuit":
        """Build and layer a circuit from ``(a, b)`` pairs."""
        gates = tuple(CzGate(i, int(a), int(b)) for i, (a, b) in enumerate(pairs))
        return layer_circuit(cls(n, gates, name=name))

    @property
    def m(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        return len(self.layered().layers)

    def pairs(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates]

    def layered(self) -> "CzCircuit":
        return self if self.layers is not None else layer_circuit(self)

    def layer_of(self) -> list[int]:
        """Layer index of every gate, in gate order."""
        out = [0] * self.m
        for li, layer in enumerate(self.layered().layers):
            for gi in layer:
                out[gi] = li
        return out

    def gates_in(self, layers: range) -> list[CzGate]:
        """Gates of a layer interval, in original circuit order."""
        c = self.layered()
        _check_interval(c, layers)
        idx = sorted(gi for li in layers for gi in c.layers[li])
        return [self.gates[i] for i in idx]


def layer_circuit(c: CzCircuit) -> CzCircuit:
    """ASAP layering: each gate lands one layer after its latest same-qubit predecessor."""
    front = [-1] * c.n
    layers: list[list[int]] = []
    for g in c.gates:
        li = max(front[g.a], front[g.b]) + 1
        front[g.a] = front[g.b] = li
        if li == len(layers):
            layers.append([])
        layers[li].append(g.index)
    return replace(c, layers=tuple(tuple(layer) for layer in layers))


def _check_interval(c: CzCircuit, layers: range) -> None:
    if layers.step != 1:
        raise ValueError("layer interval must be contiguous")
    if len(layers) and (layers.start < 0 or layers.stop > len(c.layers)):
        raise ValueError(f"layer interval {layers} outside 0..{len(c.layers)}")


def interaction_graph(c: CzCircuit, layers: range | None = None) -> nx.Graph:
    """Graph on all ``n`` qubits with an edge per interacting pair in ``layers``."""
    g = nx.Graph()
    g.add_nodes_from(range(c.n))
    if layers is None:
        g.add_edges_from(c.pairs())
    else:
        g.add_edges_from(gate.qubits for gate in c.gates_in(layers))
    return g


# --- OpenQASM 2.0 subset -----------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eq>==)
  | (?P<real>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[;,()\[\]{}+\-*/^])
    """,
    re.VERBOSE,
)

_TWO_QUBIT = {"cz", "cx", "CX"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        mo = _TOKEN.match(text, pos)
        if mo is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = mo.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, mo.group(), line, pos - line_start + 1))
        nl = mo.group().count("\n")
        if nl:
            line += nl
            line_start = mo.start() + mo.group().rfind("\n") + 1
        pos = mo.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.reg: str | None = None
        self.size = 0
        self.pairs: list[tuple[int, int]] = []
        self.gate_defs: dict[str, int] = {}

    def _err(self, msg: str, tok: _Tok | None = None) -> QasmError:
        tok = tok or (self.toks[self.i] if self.i < len(self.toks) else None)
        if tok is None:
            last = self.toks[-1] if self.toks else None
            return QasmError(msg + " (at end of input)", last.line if last else 1, last.col if last else 1)
        return QasmError(msg, tok.line, tok.col)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self._err("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            raise self._err(f"expected {text!r}, got {tok.text!r}", tok)
        return tok

    def expect_kind(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            raise self._err(f"expected {kind}, got {tok.text!r}", tok)
        return tok

    def skip_balanced(self, open_: str, close: str) -> None:
        self.expect(open_)
        depth = 1
        while depth:
            tok = self.next()
            if tok.text == open_:
                depth += 1
            elif tok.text == close:
                depth -= 1

    def parse(self) -> None:
        while self.peek() is not None:
            self.statement()

    def statement(self) -> None:
        tok = self.next()
        word = tok.text
        if word == "OPENQASM":
            ver = self.expect_kind("real")
            if not ver.text.startswith("2"):
                raise self._err(f"unsupported OpenQASM version {ver.text}", ver)
            self.expect(";")
        elif word == "include":
            self.expect_kind("string")
            self.expect(";")
        elif word == "qreg":
            name = self.expect_kind("id")
            self.expect("[")
            size = self.expect_kind("real")
            self.expect("]")
            self.expect(";")
            if self.reg is not None:
                raise self._err("only a single quantum register is supported", name)
            self.reg, self.size = name.text, int(size.text)
        elif word == "creg":
            self.expect_kind("id")
            self.expect("[")
            self.expect_kind("real")
            self.expect("]")
            self.expect(";")
        elif word in ("gate", "opaque"):
            self.gate_definition(word)
        elif word == "if":
            self.skip_balanced("(", ")")
            self.statement()
        elif word == "measure":
            self.argument()
            self.expect("->")
            self.next()
            if self.peek() is not None and self.peek().text == "[":
                self.skip_balanced("[", "]")
            self.expect(";")
        elif word in ("barrier", "reset"):
            self.arguments()
        elif tok.kind == "id":
            self.application(tok)
        else:
            raise self._err(f"unexpected token {word!r}", tok)

    def gate_definition(self, word: str) -> None:
        name = self.expect_kind("id")
        if self.peek() is not None and self.peek().text == "(":
            self.skip_balanced("(", ")")
        arity = 0
        while True:
            self.expect_kind("id")
            arity += 1
            if self.peek() is not None and self.peek().text == ",":
                self.next()
                continue
            break
        if word == "gate":
            self.skip_balanced("{", "}")
        else:
            self.expect(";")
        self.gate_defs[name.text] = arity

    def argument(self) -> tuple[_Tok, int | None]:
        name = self.expect_kind("id")
        if self.reg is None:
            raise self._err("qubit used before qreg declaration", name)
        if name.text != self.reg:
            raise self._err(f"unknown quantum register {name.text!r}", name)
        if self.peek() is not None and self.peek().text == "[":
            self.next()
            idx_tok = self.expect_kind("real")
            self.expect("]")
            idx = int(idx_tok.text)
            if idx >= self.size:
                raise self._err(f"qubit index {idx} out of range for {self.reg}[{self.size}]", idx_tok)
            return name, idx
        return name, None

    def arguments(self) -> list[tuple[_Tok, int | None]]:
        args = [self.argument()]
        while True:
            tok = self.next()
            if tok.text == ";":
                return args
            if tok.text != ",":
                raise self._err(f"expected ',' or ';', got {tok.text!r}", tok)
            args.append(self.argument())

    def application(self, name: _Tok) -> None:
        if self.peek() is not None and self.peek().text == "(":
            self.skip_balanced("(", ")")
        args = self.arguments()
        if len(args) == 1:
            return
        if len(args) >= 3:
            raise self._err(f"unsupported {len(args)}-qubit gate {name.text!r}", name)
        if name.text not in _TWO_QUBIT:
            raise self._err(f"unsupported two-qubit gate {name.text!r} (expected cz or cx)", name)
        (ta, a), (tb, b) = args
        if a is None or b is None:
            raise self._err("register broadcast is not supported for two-qubit gates", name)
        if a == b:
            raise self._err(f"two-qubit gate on identical qubits (a == b == {a})", tb)
        self.pairs.append((a, b))


def parse_qasm(text: str, name: str = "") -> CzCircuit:
    """Parse OpenQASM 2.0 text into an (unlayered) :class:`CzCircuit`."""
    p = _Parser(text)
    p.parse()
    if p.reg is None:
        raise QasmError("no qreg declaration found")
    gates = tuple(CzGate(i, a, b) for i, (a, b) in enumerate(p.pairs))
    return CzCircuit(p.size, gates, name=name)


def load_qasm(path) -> CzCircuit:
    from pathlib import Path

    path = Path(path)
    return parse_qasm(path.read_text(), name=path.stem)


def dumps_canonical(c: CzCircuit) -> str:
    lines = [f"qubits {c.n}"]
    lines.extend(f"cz {g.a} {g.b}" for g in c.gates)
    return "\n".join(lines) + "\n"


def loads_canonical(text: str, name: str = "") -> CzCircuit:
    rows: Iterator[list[str]] = (ln.split() for ln in text.splitlines() if ln.strip())
    head = next(rows, None)
    if not head or head[0] != "qubits" or len(head) != 2:
        raise ValueError("canonical dump must start with 'qubits <n>'")
    pairs = []
    for row in rows:
        if len(row) != 3 or row[0] != "cz":
            raise ValueError(f"bad canonical line: {' '.join(row)!r}")
        pairs.append((int(row[1]), int(row[2])))
    return CzCircuit.from_pairs(int(head[1]), pairs, name=name)
