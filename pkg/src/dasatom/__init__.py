"""Divide-and-shuttle compiler for neutral-atom arrays.

A CZ circuit is cut into runs of layers whose interaction graph embeds in the
atom grid; each run executes without movement, and atoms are shuttled between
runs in batches of mutually compatible moves.
"""
from .arch import GridArch, GridPoint, arch_for, connected, may_run_parallel, neighbors, parse_factor
from .circuit import CzCircuit, CzGate, QasmError, interaction_graph, layer_circuit, load_qasm, parse_qasm
from .divide import Division, UnembeddableLayer, Violation, divide_circuit, verify_division
from .embed import Mapping, choose_embedding, embeddable, find_embeddings, is_embedding
from .fidelity import FidelityReport, HardwareParams, evaluate, load_params, success_probability
from .route import Move, MoveBatch, RoutePlan, compatible, conflict_graph, extract_moves, replay, route
from .schedule import Counters, Schedule, compile_circuit, verify_schedule

__version__ = "0.1.0"

__all__ = [
    "GridArch",
    "GridPoint",
    "arch_for",
    "connected",
    "may_run_parallel",
    "neighbors",
    "parse_factor",
    "CzCircuit",
    "CzGate",
    "QasmError",
    "interaction_graph",
    "layer_circuit",
    "load_qasm",
    "parse_qasm",
    "Division",
    "UnembeddableLayer",
    "Violation",
    "divide_circuit",
    "verify_division",
    "Mapping",
    "choose_embedding",
    "embeddable",
    "find_embeddings",
    "is_embedding",
    "FidelityReport",
    "HardwareParams",
    "evaluate",
    "load_params",
    "success_probability",
    "Move",
    "MoveBatch",
    "RoutePlan",
    "compatible",
    "conflict_graph",
    "extract_moves",
    "replay",
    "route",
    "Counters",
    "Schedule",
    "compile_circuit",
    "verify_schedule",
]
