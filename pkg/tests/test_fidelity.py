import json
import math

import pytest
from hypothesis import given, strategies as st

from dasatom.fidelity import (
    HardwareParams,
    evaluate,
    exec_time,
    idle_time,
    load_params,
    log_success_probability,
    success_probability,
)
from dasatom.schedule import Counters

P = HardwareParams()


def zero_move(n, m):
    return Counters(n=n, m=m, h=m, s=0, D=0.0, M=0, P=1)


def test_defaults():
    assert (P.T2, P.f_cz, P.f_trans, P.t_cz, P.t_trans, P.v) == (1.5e6, 0.995, 1.0, 0.2, 20.0, 0.55)
    assert P.transfer_time_model == "per_transfer"


@pytest.mark.parametrize(
    "counters,T",
    [
        (Counters(h=30), 6.0),
        (Counters(h=38), 7.6),
        (Counters(h=20, s=4, D=11.0), 104.0),
    ],
)
def test_exec_time(counters, T):
    assert exec_time(counters, P) == pytest.approx(T)


def test_exec_time_per_stage():
    p = HardwareParams(transfer_time_model="per_stage")
    assert exec_time(Counters(h=20, s=10, D=11.0, M=2), p) == pytest.approx(4 + 80 + 20)


def test_idle_time():
    assert idle_time(5, 6.0, 30, P) == pytest.approx(24)
    assert idle_time(3, 10.0, 0, P) == pytest.approx(30)
    assert idle_time(1, 7 * 0.2, 7, P) == 0
    with pytest.raises(ValueError):
        idle_time(1, 1.0, 30, P)


def test_table_values():
    assert success_probability(zero_move(5, 30)) == pytest.approx(0.8604, abs=5e-4)
    assert success_probability(zero_move(20, 38)) == pytest.approx(0.8265, abs=5e-4)
    assert success_probability(Counters(n=4)) == 1.0


def test_tiny_probabilities_do_not_underflow():
    c = Counters(n=20, m=200_000, h=200_000, s=4000, D=1e5, M=800, P=40)
    p = HardwareParams(f_trans=0.9)
    T = 200_000 * 0.2 + 4000 * 20 + 1e5 / 0.55
    expect = -(20 * T - 200_000 * 0.2) / p.T2 + 200_000 * math.log(0.995) + 4000 * math.log(0.9)
    assert log_success_probability(c, p) == pytest.approx(expect, rel=1e-9)
    assert expect < -1000


def test_report_echoes_parameters():
    rep = evaluate(zero_move(5, 30))
    d = rep.to_dict()
    assert d["params"] == P.to_dict()
    assert d["counters"]["m"] == 30
    assert 0 < rep.F <= 1 and rep.T_idle >= 0 and rep.T >= 30 * P.t_cz


@given(st.integers(1, 30), st.integers(0, 100), st.integers(0, 50), st.floats(0, 500), st.integers(0, 10))
def test_log_space_matches_direct_product(n, m, s, D, M):
    c = Counters(n=n, m=m, h=m + 1, s=2 * s, D=round(D, 6), M=M, P=1)
    p = HardwareParams(f_trans=0.999)
    T = exec_time(c, p)
    idle = idle_time(n, T, m, p)
    direct = math.exp(-idle / p.T2) * p.f_cz ** m * p.f_trans ** c.s
    assert success_probability(c, p) == pytest.approx(direct, rel=1e-12)


@given(st.integers(1, 40), st.integers(0, 400))
def test_zero_movement_closed_form(n, m):
    expect = P.f_cz ** m * math.exp(-(n - 1) * m * P.t_cz / P.T2)
    assert success_probability(zero_move(n, m)) == pytest.approx(expect, rel=1e-9)


counters = st.builds(
    lambda n, m, extra, s, D, M: Counters(n=n, m=m, h=m + extra, s=2 * s, D=round(D, 6), M=M, P=1),
    st.integers(1, 30),
    st.integers(0, 300),
    st.integers(0, 50),
    st.integers(0, 200),
    st.floats(0, 2000),
    st.integers(0, 40),
)
lossy = HardwareParams(f_trans=0.999)


@given(counters, st.sampled_from(["m", "s", "D", "h"]), st.integers(1, 20))
def test_more_work_never_helps(c, field, step):
    bumped = {"m": dict(m=c.m + step, h=c.h + step), "s": dict(s=c.s + 2 * step), "D": dict(D=c.D + step), "h": dict(h=c.h + step)}[field]
    worse = Counters(**{**c.to_dict(), **bumped})
    assert success_probability(worse, lossy) <= success_probability(c, lossy)


@given(counters, st.sampled_from(["T2", "f_cz", "f_trans", "v"]), st.floats(0.9, 1.1), st.floats(0.9, 1.1))
def test_better_hardware_never_hurts(c, name, a, b):
    lo, hi = sorted([a, b])
    base = getattr(lossy, name)
    cap = 1.0 if name.startswith("f_") else math.inf
    p_lo = lossy.with_overrides(**{name: min(base * lo, cap)})
    p_hi = lossy.with_overrides(**{name: min(base * hi, cap)})
    assert success_probability(c, p_hi) >= success_probability(c, p_lo)


def test_invalid_params():
    for bad in (dict(T2=0), dict(f_cz=1.2), dict(v=-1), dict(transfer_time_model="batched")):
        with pytest.raises(ValueError):
            HardwareParams(**bad)
    with pytest.raises(ValueError):
        HardwareParams.from_dict({"f_cx": 0.9})


def test_load_json(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"f_cz": 0.99, "transfer_time_model": "per_stage"}))
    p = load_params(path)
    assert p.f_cz == 0.99 and p.transfer_time_model == "per_stage" and p.T2 == 1.5e6


def test_load_toml(tmp_path):
    path = tmp_path / "p.toml"
    path.write_text("[hardware]\nT2 = 1e6\nv = 1\n")
    p = load_params(path)
    assert p.T2 == 1e6 and p.v == 1.0
