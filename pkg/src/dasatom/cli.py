"""Command-line front end.

Subcommands: ``compile``, ``sweep``, ``gen``, ``verify`` and ``bench``.
Exit status is 0 on success, 1 when an input cannot be read or parsed (or a
flag value is invalid) and 2 when a schedule fails verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
from pathlib import Path
from typing import Sequence

from .arch import GridArch, arch_for
from .circuit import CzCircuit, QasmError, load_qasm, loads_canonical
from .divide import UnembeddableLayer, Violation
from .embed import DEFAULT_LIMIT
from .fidelity import HardwareParams, evaluate, load_params
from .generators import FAMILIES, generate, to_qasm
from .route import RouteError, RoutePlan, replay
from .schedule import Schedule, compile_circuit, verify_schedule

PARAMS_ENV = "DASATOM_PARAMS"

# column order of every CSV report
REPORT_COLUMNS = ("name", "n", "m", "depth", "h", "s", "D_um", "M", "P", "T_us", "T_idle_us", "F", "RT_s")
SWEEP_COLUMNS = ("value", "F", "T_us", "T_idle_us", "s", "D_um")

ARCH_AXES = ("d", "r_int", "r_restr")
PARAM_AXES = ("f_cz", "f_trans", "T2", "t_cz", "t_trans", "v")
SWEEP_AXES = PARAM_AXES[:3] + ("d",) + PARAM_AXES[3:] + ARCH_AXES[1:]


class InputError(Exception):
    """Unreadable or malformed input; maps to exit status 1."""


@dataclass(frozen=True)
class RunConfig:
    d_um: float = 3.0
    r_int: str = "2"
    r_restr: str = "4"
    grid: int | None = None
    mode: str = "serial"
    embed_limit: int | None = DEFAULT_LIMIT
    params: HardwareParams = field(default_factory=HardwareParams)

    def arch(self, n: int) -> GridArch:
        base = arch_for(max(n, 1), self.d_um, self.r_int, self.r_restr)
        if self.grid is None:
            return base
        if self.grid * self.grid < n:
            raise InputError(f"--grid {self.grid} holds {self.grid ** 2} atoms, circuit needs {n}")
        return replace(base, b=self.grid)


@dataclass
class CompileResult:
    circuit: CzCircuit
    schedule: Schedule
    violations: list[Violation]
    runtime: float

    def document(self, params: HardwareParams) -> dict:
        return {"schedule": self.schedule.to_json(), "report": evaluate(self.schedule.counters, params).to_dict()}

    def row(self, params: HardwareParams) -> dict:
        c = self.schedule.counters
        rep = evaluate(c, params)
        return {
            "name": self.circuit.name,
            "n": c.n,
            "m": c.m,
            "depth": self.circuit.depth,
            "h": c.h,
            "s": c.s,
            "D_um": c.D,
            "M": c.M,
            "P": c.P,
            "T_us": rep.T,
            "T_idle_us": rep.T_idle,
            "F": rep.F,
            "RT_s": round(self.runtime, 3),
        }


def read_circuit(path) -> CzCircuit:
    path = Path(path)
    try:
        if path.suffix == ".cz":
            return loads_canonical(path.read_text(), name=path.stem)
        return load_qasm(path)
    except QasmError as exc:
        raise InputError(f"{path}:{exc}") from None
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def compile_one(c: CzCircuit, cfg: RunConfig) -> CompileResult:
    arch = cfg.arch(c.n)
    t0 = time.perf_counter()
    sched = compile_circuit(c, arch, mode=cfg.mode, limit=cfg.embed_limit)
    rt = time.perf_counter() - t0
    return CompileResult(c, sched, verify_schedule(sched, c, arch), rt)


def _bench_task(path: str, cfg: RunConfig):
    """Worker body for ``bench``; returns (row, violations) or an error string."""
    try:
        res = compile_one(read_circuit(path), cfg)
    except (InputError, UnembeddableLayer) as exc:
        return str(exc)
    return res.row(cfg.params), [str(v) for v in res.violations]


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def render(rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    cells = [list(columns)] + [[_fmt(r[k]) for k in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(s.rjust(w) for s, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_violations(name: str, violations) -> None:
    for v in violations:
        print(f"{name}: {v}", file=sys.stderr)


# ---------------------------------------------------------------- config


def _params(args) -> HardwareParams:
    path = args.params or os.environ.get(PARAMS_ENV)
    try:
        base = load_params(path) if path else HardwareParams()
        return base.with_overrides(
            T2=args.t2,
            f_cz=args.f_cz,
            f_trans=args.f_trans,
            t_cz=args.t_cz,
            t_trans=args.t_trans,
            v=args.speed,
            transfer_time_model=args.transfer_model,
        )
    except (OSError, ValueError) as exc:
        raise InputError(f"hardware parameters: {exc}") from None


def config_from_args(args) -> RunConfig:
    limit = args.embed_limit
    cfg = RunConfig(
        d_um=args.d_um,
        r_int=args.r_int,
        r_restr=args.r_restr,
        grid=args.grid,
        mode=args.mode,
        embed_limit=None if limit == 0 else limit,
        params=_params(args),
    )
    try:
        cfg.arch(1 if cfg.grid is None else cfg.grid ** 2)
    except ValueError as exc:
        raise InputError(f"architecture: {exc}") from None
    if limit is not None and limit < 0:
        raise InputError("--embed-limit must be >= 0")
    return cfg


# ---------------------------------------------------------------- commands


def cmd_compile(args) -> int:
    cfg = config_from_args(args)
    circuits = [read_circuit(p) for p in args.inputs]
    out_dir = None
    if args.output and len(circuits) > 1:
        out_dir = Path(args.output)
        out_dir.mkdir(parents=True, exist_ok=True)
    rows, status = [], 0
    for c in circuits:
        res = compile_one(c, cfg)
        if args.output:
            target = out_dir / f"{c.name}.json" if out_dir else Path(args.output)
            target.write_text(json.dumps(res.document(cfg.params), indent=2) + "\n")
        if res.violations:
            _report_violations(c.name, res.violations)
            status = 2
        rows.append(res.row(cfg.params))
    sys.stdout.write(render(rows, REPORT_COLUMNS, args.format))
    return status


def _sweep_values(axis: str, raw: list[str]) -> list:
    vals = [v for tok in raw for v in tok.split(",") if v]
    if not vals:
        raise InputError("--values is empty")
    if axis in ("r_int", "r_restr"):
        return vals
    try:
        return [float(v) for v in vals]
    except ValueError as exc:
        raise InputError(f"--values: {exc}") from None


def cmd_sweep(args) -> int:
    if args.axis not in SWEEP_AXES:
        raise InputError(f"unknown sweep axis {args.axis!r}; choose from {', '.join(SWEEP_AXES)}")
    cfg = config_from_args(args)
    c = read_circuit(args.input)
    values = _sweep_values(args.axis, args.values)
    rows, status = [], 0
    fixed = None if args.axis in ARCH_AXES else compile_one(c, cfg)
    for val in values:
        if fixed is None:
            key = "d_um" if args.axis == "d" else args.axis
            try:
                run_cfg = replace(cfg, **{key: val})
                res = compile_one(c, run_cfg)
            except ValueError as exc:
                raise InputError(f"{args.axis}={val}: {exc}") from None
            params = cfg.params
        else:
            res = fixed
            try:
                params = cfg.params.with_overrides(**{args.axis: val})
            except ValueError as exc:
                raise InputError(f"{args.axis}={val}: {exc}") from None
        if res.violations:
            _report_violations(f"{c.name} {args.axis}={val}", res.violations)
            status = 2
        rep = evaluate(res.schedule.counters, params)
        rows.append({
            "value": val,
            "F": rep.F,
            "T_us": rep.T,
            "T_idle_us": rep.T_idle,
            "s": rep.counters.s,
            "D_um": rep.counters.D,
        })
    _emit(render(rows, SWEEP_COLUMNS, args.format), args.output)
    return status


def cmd_gen(args) -> int:
    options = {}
    if args.depth is not None:
        if args.family != "qv":
            raise InputError("--depth only applies to qv")
        options["depth"] = args.depth
    try:
        c = generate(args.family, args.n, seed=args.seed, **options)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(to_qasm(c), args.output)
    return 0


def _load_schedule(path) -> Schedule:
    try:
        data = json.loads(Path(path).read_text())
        return Schedule.from_json(data.get("schedule", data))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: cannot read schedule ({exc})") from None


def _replay_moves(sched: Schedule, arch: GridArch) -> list[Violation]:
    """Replay every run of movement stages as one plan, starting where the previous run ended."""
    if sched.initial is None:
        return []
    current, run = sched.initial, []
    for st in list(sched.stages) + [None]:
        if st is not None and st.kind == "move":
            run.append(st.batch)
            continue
        if run:
            try:
                current = replay(RoutePlan(tuple(run)), current, arch)
            except RouteError as exc:
                return [Violation(type(exc).__name__, str(exc))]
            run = []
    return []


def cmd_verify(args) -> int:
    sched = _load_schedule(args.schedule)
    c = read_circuit(args.circuit)
    arch = sched.arch or arch_for(max(c.n, 1))
    try:
        arch = GridArch.from_factors(
            args.grid or arch.b,
            args.d_um if args.d_um is not None else arch.d,
            args.r_int if args.r_int is not None else arch.to_dict()["r_int"],
            args.r_restr if args.r_restr is not None else arch.to_dict()["r_restr"],
        )
    except ValueError as exc:
        raise InputError(f"architecture: {exc}") from None
    violations = verify_schedule(sched, c, arch)
    if not violations:
        violations = _replay_moves(sched, arch)
    for v in violations:
        print(v)
    if violations:
        return 2
    print(f"{c.name}: ok ({len(sched.stages)} stages)")
    return 0


def cmd_bench(args) -> int:
    cfg = config_from_args(args)
    root = Path(args.directory)
    if not root.is_dir():
        raise InputError(f"{root}: not a directory")
    paths = sorted(str(p) for p in root.iterdir() if p.suffix in (".qasm", ".cz"))
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_task, paths, repeat(cfg)))
    else:
        results = [_bench_task(p, cfg) for p in paths]
    rows, status = [], 0
    for path, res in zip(paths, results):
        if isinstance(res, str):
            print(f"error: {res}", file=sys.stderr)
            status = max(status, 1)
            continue
        row, violations = res
        if violations:
            _report_violations(row["name"], violations)
            status = 2
        rows.append(row)
    _emit(render(rows, REPORT_COLUMNS, args.format), args.output)
    return status


# ---------------------------------------------------------------- parser


def _arch_flags(p: argparse.ArgumentParser, defaults: bool = True) -> None:
    g = p.add_argument_group("architecture")
    g.add_argument("--d-um", type=float, default=3.0 if defaults else None, help="atom spacing in um (default 3)")
    g.add_argument("--r-int", default="2" if defaults else None,
                   help="interaction radius in units of d; accepts sqrt:K (default 2)")
    g.add_argument("--r-restr", default="4" if defaults else None,
                   help="restriction radius in units of d; accepts sqrt:K (default 4)")
    g.add_argument("--grid", type=int, default=None, help="grid side b (default ceil(sqrt(n)))")


def _run_flags(p: argparse.ArgumentParser) -> None:
    _arch_flags(p)
    p.add_argument("--mode", choices=("serial", "packed"), default="serial",
                   help="serial: one CZ per Rydberg stage; packed: parallel CZs within a layer")
    p.add_argument("--embed-limit", type=int, default=DEFAULT_LIMIT,
                   help=f"candidate embeddings per subcircuit, 0 = all (default {DEFAULT_LIMIT})")
    h = p.add_argument_group("hardware parameters")
    h.add_argument("--params", help=f"JSON or TOML parameter file (default: ${PARAMS_ENV} if set)")
    h.add_argument("--transfer-model", choices=("per_transfer", "per_stage"), default=None,
                   help="per_transfer: s*t_trans; per_stage: 2*M*t_trans")
    h.add_argument("--t2", type=float, help="coherence time T2 in us")
    h.add_argument("--f-cz", type=float, help="CZ gate fidelity")
    h.add_argument("--f-trans", type=float, help="atom transfer fidelity")
    h.add_argument("--t-cz", type=float, help="CZ duration in us")
    h.add_argument("--t-trans", type=float, help="transfer duration in us")
    h.add_argument("--speed", type=float, help="shuttling speed in um/us")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dasatom", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile circuits and report fidelity")
    p.add_argument("inputs", nargs="+", help="OpenQASM 2.0 files (or .cz canonical dumps)")
    _run_flags(p)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("-o", "--output", help="schedule JSON file (a directory when several inputs are given)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("sweep", help="evaluate one circuit across values of a parameter")
    p.add_argument("input")
    p.add_argument("--axis", required=True, help=f"one of: {', '.join(SWEEP_AXES)}")
    p.add_argument("--values", nargs="+", required=True, help="values, space or comma separated")
    _run_flags(p)
    p.add_argument("--format", choices=("table", "csv", "json"), default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "gen",
        help="emit the CZ skeleton of a benchmark family as OpenQASM",
        description=(
            "Emit the CZ skeleton of a benchmark family. qv uses depth n by default "
            "with three CZs per paired block, so qv 20 has 600 CZs; 3regular needs "
            "even n. Random families are seeded."
        ),
    )
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--depth", type=int, help="qv rounds (default n)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check a schedule against its circuit")
    p.add_argument("schedule", help="schedule JSON written by compile -o")
    p.add_argument("circuit")
    _arch_flags(p, defaults=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compile every circuit in a directory into one report")
    p.add_argument("directory")
    _run_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("table", "csv", "json"), default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnembeddableLayer as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
