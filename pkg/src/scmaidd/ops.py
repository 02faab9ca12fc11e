"""Log-sum-exp helpers and real-operation counters.

Every exponential/logarithm taken by the detector, the decoder and the LLR
bridge goes through this module so the per-stage counts can be audited.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np


@dataclass
class OpCounters:
    mul: int = 0
    div: int = 0
    exp: int = 0
    log: int = 0

    def add(self, mul=0, div=0, exp=0, log=0):
        self.mul += int(mul)
        self.div += int(div)
        self.exp += int(exp)
        self.log += int(log)

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def reset(self):
        self.mul = self.div = self.exp = self.log = 0


STAGES = ("detector", "decoder", "bridge")


def new_counters() -> dict[str, OpCounters]:
    return {s: OpCounters() for s in STAGES}


def total(counters: dict[str, OpCounters]) -> OpCounters:
    out = OpCounters()
    for c in counters.values():
        out = out + c
    return out


def jacobian_logsumexp(values, max_log: bool = False) -> float:
    """log(sum(exp(v))) reduced pairwise with
    log(e^a + e^b) = max(a, b) + log(1 + e^-|a - b|).

    ``max_log`` drops the correction term (an approximation).
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("jacobian_logsumexp of an empty sequence")
    acc = vals[0]
    for v in vals[1:]:
        hi = max(acc, v)
        if hi == -math.inf:
            continue
        acc = hi if max_log else hi + math.log1p(math.exp(-abs(acc - v)))
    return acc


def logsumexp(x: np.ndarray, axis=-1, counter: OpCounters | None = None, max_log: bool = False) -> np.ndarray:
    """Stable n-ary log-sum-exp along ``axis``.

    This is the n-term form of the pairwise Jacobian identity: the largest
    term is factored out and every term costs one exponential, every output
    one logarithm. With ``max_log`` only the maximum is kept.
    """
    x = np.asarray(x, dtype=float)
    m = np.max(x, axis=axis, keepdims=True)
    if max_log:
        return np.squeeze(m, axis=axis)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.sum(np.exp(x - m), axis=axis)
    if counter is not None:
        counter.add(exp=x.size, log=s.size)
    with np.errstate(divide="ignore"):
        return np.squeeze(m, axis=axis) + np.log(s)
