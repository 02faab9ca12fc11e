"""Acceptance criteria, each at its stated tolerance and runtime limit.

Every test records a PASS/FAIL line that is printed in the terminal summary.
The full-profile mode comparison on the length-9216 code runs only with
SCMAIDD_FULL_PROFILE=1.
"""
import os
import time

import numpy as np
import pytest

from scmaidd.receiver import MODES
from scmaidd.sim import ber_crossing, load_config, run_sweep
from scmaidd.sim.checks import (check_bridge, check_domains, check_factor_messages, check_tree_exact,
                                check_uncoded_ser)
from scmaidd.sim.complexity import leading_mul, measure_ops
from scmaidd.sim.sweep import resolve_components

from conftest import ACCEPTANCE_LINES


def record(num, name, passed, detail, seconds, limit):
    ok = passed and seconds < limit
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {num} {name}: {detail}; "
                            f"{seconds:.1f} s (limit {limit:g} s)")
    return ok


def run_check(num, check, limit, **kw):
    res = check(**kw)
    ok = record(num, res.name, res.passed, res.detail, res.seconds, limit)
    assert res.passed, res.detail
    assert res.seconds < limit


def test_c1_tree_exactness():
    run_check(1, check_tree_exact, 1.0, tol=1e-9)


def test_c2_domain_equivalence():
    run_check(2, check_domains, 10.0, instances=100, tol=1e-6)


def test_c3_per_factor_enumeration():
    run_check(3, check_factor_messages, 10.0, slots=1000, tol=1e-9)


def test_c4_bridge_identities():
    run_check(4, check_bridge, 5.0, vectors=10_000, tol=1e-9)


def test_c5_uncoded_ser_vs_map():
    run_check(5, check_uncoded_ser, 120.0, es_n0_db=11.0, slots=10_000, T=6)


def mode_gain_config(code, channel, grid, max_frames):
    return load_config({
        "code": code, "channels": [channel], "es_n0_db": grid, "modes": ["mode2", "mode4"],
        "stopping": {"min_frames": 20, "min_bit_errors": 100, "max_frames": max_frames, "block_frames": 4,
                     "stop_after_clean": True},
        "seed": 1,
    })


@pytest.mark.slow
def test_c6_mode_gain_desk():
    t0 = time.perf_counter()
    cfg = mode_gain_config("bundled:1024", "awgn", {"start": 1.5, "stop": 6.0, "step": 0.5}, 200)
    table = run_sweep(cfg)
    x2 = ber_crossing(table.select("awgn", "mode2"), 1e-3)
    x4 = ber_crossing(table.select("awgn", "mode4"), 1e-3)
    gain = x4 - x2
    seconds = time.perf_counter() - t0
    curves = "; ".join(f"{m} " + " ".join(f"{r.es_n0_db:g}:{r.ber:.1e}" for r in table.select("awgn", m))
                       for m in ("mode2", "mode4"))
    ok = record(6, "mode gain (desk, length 1024, AWGN, BER 1e-3)", bool(gain >= 0.4),
                f"mode2 at {x2:.2f} dB, mode4 at {x4:.2f} dB, gain {gain:.2f} dB >= 0.4 [{curves}]",
                seconds, 1800)
    assert gain >= 0.4
    assert seconds < 1800


@pytest.mark.full_profile
@pytest.mark.skipif(os.environ.get("SCMAIDD_FULL_PROFILE") != "1", reason="opt-in: set SCMAIDD_FULL_PROFILE=1")
@pytest.mark.parametrize("channel, grid", [("awgn", {"start": 1.5, "stop": 6.0, "step": 0.25}),
                                           ("rayleigh", {"start": 3.0, "stop": 9.0, "step": 0.25})])
def test_c6_mode_gain_full_profile(channel, grid):
    t0 = time.perf_counter()
    cfg = load_config({
        "code": "bundled:9216", "channels": [channel], "es_n0_db": grid, "modes": ["mode1", "mode2", "mode4"],
        "stopping": {"min_frames": 20, "min_bit_errors": 100, "max_frames": 200, "block_frames": 4,
                     "stop_after_clean": True},
        "seed": 1, "workers": int(os.environ.get("SCMAIDD_WORKERS", "1")),
    })
    table = run_sweep(cfg)
    x = {m: ber_crossing(table.select(channel, m), 1e-4) for m in ("mode1", "mode2", "mode4")}
    gain = x["mode4"] - x["mode2"]
    # mode 1 must be strictly worse: it reaches 1e-4 later (or never)
    mode1_worse = bool(np.isnan(x["mode1"]) or x["mode1"] > x["mode2"])
    ok = 0.5 <= gain <= 1.3 and mode1_worse
    record(6, f"mode gain (full profile, length 9216, {channel}, BER 1e-4)", ok,
           f"mode1 {x['mode1']:.2f} dB, mode2 {x['mode2']:.2f} dB, mode4 {x['mode4']:.2f} dB, "
           f"gain {gain:.2f} dB in [0.5, 1.3], mode1 worse: {mode1_worse}", time.perf_counter() - t0, float("inf"))
    assert mode1_worse
    assert 0.5 <= gain <= 1.3


def test_c7_complexity_accounting(comp):
    t0 = time.perf_counter()
    symbols = comp.slots * comp.cb.J
    details, ok = [], True
    for name, sched in MODES.items():
        c = measure_ops(sched, comp, n0=0.5, seed=7)
        per_iter = c["detector"].exp / (symbols * sched.i_o * sched.i_t)
        total_mul = sum(v.mul for v in c.values()) / symbols
        ratio = total_mul / leading_mul(sched, comp.cb, comp.fg)
        ok &= per_iter == 128 and 0.5 <= ratio <= 2.0
        details.append(f"{name}: exp/iter {per_iter:g}, mul ratio {ratio:.3f}")
    seconds = time.perf_counter() - t0
    record(7, "complexity accounting", ok, "exp/iter == 128 and mul within 2x; " + ", ".join(details), seconds, 60)
    assert ok
    assert seconds < 60


def test_c8_determinism_serial_vs_parallel():
    t0 = time.perf_counter()
    base = {"es_n0_db": [2.5, 3.0], "modes": ["mode2", "mode4"],
            "stopping": {"min_frames": 8, "min_bit_errors": 100, "max_frames": 16, "block_frames": 2}, "seed": 11}
    serial = run_sweep(load_config({**base, "workers": 1}))
    parallel = run_sweep(load_config({**base, "workers": 8}))
    key = lambda t: [(r.channel, r.mode, r.es_n0_db, r.frames, r.bit_errors, r.frame_errors) for r in t.rows]
    same = key(serial) == key(parallel)
    seconds = time.perf_counter() - t0
    record(8, "determinism (serial vs 8 workers)", same,
           f"{len(serial.rows)} cells, identical counts: {same}", seconds, 300)
    assert same
    assert seconds < 300
