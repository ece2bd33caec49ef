"""Approximate success probability of a compiled schedule.

All durations are in microseconds and lengths in micrometres.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Literal

from .schedule import Counters

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = [
    "HardwareParams",
    "FidelityReport",
    "exec_time",
    "idle_time",
    "success_probability",
    "evaluate",
    "load_params",
]

TransferModel = Literal["per_transfer", "per_stage"]
_RES = 6  # decimal places kept for times (1e-6 us)


@dataclass(frozen=True)
class HardwareParams:
    T2: float = 1.5e6
    f_cz: float = 0.995
    f_trans: float = 1.0
    t_cz: float = 0.2
    t_trans: float = 20.0
    v: float = 0.55
    transfer_time_model: TransferModel = "per_transfer"

    def __post_init__(self) -> None:
        for name in ("T2", "f_cz", "f_trans", "t_cz", "t_trans", "v"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("f_cz", "f_trans"):
            if getattr(self, name) > 1:
                raise ValueError(f"{name} must not exceed 1")
        if self.transfer_time_model not in ("per_transfer", "per_stage"):
            raise ValueError(f"unknown transfer_time_model {self.transfer_time_model!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "HardwareParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown hardware parameters: {sorted(unknown)}")
        cast = {k: (v if k == "transfer_time_model" else float(v)) for k, v in data.items()}
        return cls(**cast)

    def with_overrides(self, **kw) -> "HardwareParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


def load_params(path) -> HardwareParams:
    """Read parameters from a JSON or TOML file.

    A TOML file may keep them under a ``[hardware]`` table.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = tomllib.loads(text)
    data = data.get("hardware", data)
    return HardwareParams.from_dict(data)


@dataclass(frozen=True)
class FidelityReport:
    T: float
    T_idle: float
    F: float
    counters: Counters
    params: HardwareParams

    def to_dict(self) -> dict:
        return {
            "F": self.F,
            "T_us": self.T,
            "T_idle_us": self.T_idle,
            "counters": self.counters.to_dict(),
            "params": self.params.to_dict(),
        }


def exec_time(c: Counters, p: HardwareParams) -> float:
    if p.transfer_time_model == "per_transfer":
        transfer = c.s * p.t_trans
    else:
        # one load and one offload per movement stage
        transfer = 2 * c.M * p.t_trans
    return round(c.h * p.t_cz + transfer + c.D / p.v, _RES)


def idle_time(n: int, T: float, m: int, p: HardwareParams) -> float:
    idle = round(n * T - m * p.t_cz, _RES)
    if idle < 0:
        raise ValueError(f"negative idle time {idle}: n*T < m*t_cz (corrupted counters)")
    return idle


def log_success_probability(c: Counters, p: HardwareParams) -> float:
    T = exec_time(c, p)
    idle = idle_time(c.n, T, c.m, p)
    return -idle / p.T2 + c.m * math.log(p.f_cz) + c.s * math.log(p.f_trans)


def success_probability(c: Counters, p: HardwareParams | None = None) -> float:
    return math.exp(log_success_probability(c, p or HardwareParams()))


def evaluate(c: Counters, p: HardwareParams | None = None) -> FidelityReport:
    p = p or HardwareParams()
    T = exec_time(c, p)
    idle = idle_time(c.n, T, c.m, p)
    return FidelityReport(T, idle, success_probability(c, p), c, p)
