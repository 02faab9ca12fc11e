"""Closed-form operation counts per user-symbol, and measured counterparts.

Predicted counts use the standard accounting for a regular SCMA system with
d_k users per resource:

- detector, per inner iteration: (2 d_k K M^d_k + 4 d_k^2 K M) / J
  multiplications, d_k K M^d_k / J divisions and exponentials,
  K M d_k / J logarithms;
- decoder, per iteration: (11 P - 9) log2 M multiplications and
  (P + 1) log2 M divisions, P the bit-node degree;
- bridge, per outer iteration: M log2 M exponentials, 2 log2 M logarithms.

The decoder formula describes a tanh-rule implementation; the phi-rule
decoder here spends divisions, exponentials and logarithms instead, so
decoder counts are reported but only the detector and bridge are expected to
match exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..codebook import Codebook, FactorGraph
from ..ldpc.matrix import ParityCheckMatrix
from ..ops import STAGES, OpCounters, new_counters
from ..receiver import Components, IterationSchedule, ReceiverFlags, run_receiver
from .frames import frame_rng, make_frame


@dataclass
class OpsReport:
    predicted: dict[str, dict[str, float]]  # stage -> op -> count per user-symbol
    measured: dict[str, dict[str, float]] | None = None

    def total(self, which: str = "predicted") -> dict[str, float]:
        src = getattr(self, which)
        return {op: sum(src[s][op] for s in STAGES) for op in ("mul", "div", "exp", "log")}


def detector_ops_per_iteration(cb: Codebook, fg: FactorGraph) -> dict[str, float]:
    if not fg.is_regular:
        raise ValueError("operation prediction needs a regular factor graph")
    dk, K, M, J = fg.d_k, fg.K, cb.M, fg.J
    return {"mul": (2 * dk * K * M ** dk + 4 * dk ** 2 * K * M) / J,
            "div": dk * K * M ** dk / J,
            "exp": dk * K * M ** dk / J,
            "log": K * M * dk / J}


def predicted_ops(sched: IterationSchedule | None, cb: Codebook, fg: FactorGraph, pcm: ParityCheckMatrix,
                  i_t: int | None = None) -> OpsReport:
    """Per user-symbol counts for a whole frame under ``sched``.

    ``i_t`` overrides the schedule's detector count (0 is allowed and gives no
    detector operations).
    """
    if not pcm.is_regular:
        raise ValueError("operation prediction needs a regular LDPC code")
    i_t = sched.i_t if i_t is None else i_t
    i_l, i_o = (sched.i_l, sched.i_o) if sched is not None else (1, 1)
    nb = cb.bits_per_symbol
    P = pcm.P
    det = {op: i_o * i_t * v for op, v in detector_ops_per_iteration(cb, fg).items()}
    dec = {"mul": i_o * i_l * (11 * P - 9) * nb, "div": i_o * i_l * (P + 1) * nb, "exp": 0.0, "log": 0.0}
    bridge = {"mul": 0.0, "div": 0.0, "exp": i_o * cb.M * nb, "log": i_o * 2 * nb}
    return OpsReport({"detector": det, "decoder": dec, "bridge": bridge})


def leading_mul(sched: IterationSchedule, cb: Codebook, fg: FactorGraph) -> float:
    """The dominant-term approximation 2 I_O I_T d_k K M^d_k / J."""
    return 2 * sched.i_o * sched.i_t * fg.d_k * fg.K * cb.M ** fg.d_k / fg.J


def measure_ops(sched: IterationSchedule, comp: Components, model: str = "awgn", n0: float = 0.5,
                seed: int = 0, flags: ReceiverFlags | None = None) -> dict[str, OpCounters]:
    """Counters from decoding one frame."""
    fr = make_frame(comp, model, n0, frame_rng(seed, 0))
    counters = new_counters()
    run_receiver(fr.y, fr.channel, sched, comp, flags, counters=counters)
    return counters


def ops_report(sched: IterationSchedule, comp: Components, **kw) -> OpsReport:
    rep = predicted_ops(sched, comp.cb, comp.fg, comp.encoder.pcm)
    counters = measure_ops(sched, comp, **kw)
    symbols = comp.slots * comp.cb.J
    rep.measured = {s: {op: v / symbols for op, v in counters[s].as_dict().items()} for s in STAGES}
    return rep


def format_report(sched: IterationSchedule, rep: OpsReport) -> str:
    lines = [f"{sched.mode_name or 'schedule'} (i_t={sched.i_t}, i_l={sched.i_l}, i_o={sched.i_o}),"
             " operations per user-symbol"]
    lines.append(f"{'stage':<10}{'op':<5}{'predicted':>14}{'measured':>14}{'ratio':>8}")
    for s in STAGES:
        for op in ("mul", "div", "exp", "log"):
            p = rep.predicted[s][op]
            m = rep.measured[s][op] if rep.measured else float("nan")
            ratio = m / p if p else float("nan")
            lines.append(f"{s:<10}{op:<5}{p:>14.1f}{m:>14.1f}{ratio:>8.3f}" if np.isfinite(ratio)
                         else f"{s:<10}{op:<5}{p:>14.1f}{m:>14.1f}{'-':>8}")
    return "\n".join(lines)
