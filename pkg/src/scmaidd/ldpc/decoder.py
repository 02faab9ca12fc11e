"""Flooding belief propagation on bit LLRs, L = log p(b=0) / p(b=1).

The decoder output is kept split as total = prior + intrinsic, where the
intrinsic part is the sum of the final check-to-bit messages. Decoding is
batched over any leading axes of the prior (one row per user, typically).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ops import OpCounters
from .matrix import ParityCheckMatrix

LLR_CLIP = 38.0
_PHI_FLOOR = 1e-15


@dataclass
class BitLlr:
    total: np.ndarray
    intrinsic: np.ndarray
    prior: np.ndarray


@dataclass
class DecodeResult:
    llr: BitLlr
    hard: np.ndarray
    syndrome_ok: np.ndarray
    iterations: int
    c2v: np.ndarray  # final check-to-bit messages, (..., n_edges)


def hard_decide(llr) -> np.ndarray:
    """Bit 0 iff LLR >= 0 (a tie decides 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def _phi(x: np.ndarray) -> np.ndarray:
    """-log tanh(x / 2); an involution on x > 0."""
    x = np.maximum(x, _PHI_FLOOR)
    return np.log1p(2.0 / np.expm1(x))


def _check_update_tanh(v2c, pcm, counter):
    mag = np.minimum(np.abs(v2c), LLR_CLIP)
    ph = _phi(mag)
    neg = v2c < 0
    pad = np.zeros(ph.shape[:-1] + (1,))
    tab = pcm.check_table
    ph_sum = np.concatenate([ph, pad], axis=-1)[..., tab].sum(axis=-1)
    par = np.concatenate([neg, pad.astype(bool)], axis=-1)[..., tab].sum(axis=-1) % 2
    ec = pcm.edge_check
    out = _phi(np.maximum(ph_sum[..., ec] - ph, 0.0))
    sign = np.where((par[..., ec] == 1) ^ neg, -1.0, 1.0)
    if counter is not None:
        # two phi evaluations per edge, each one exp, one div, one log
        counter.add(div=2 * v2c.size, exp=2 * v2c.size, log=2 * v2c.size)
    return np.clip(sign * out, -LLR_CLIP, LLR_CLIP)


def _check_update_minsum(v2c, pcm, counter):
    mag = np.abs(v2c)
    neg = v2c < 0
    tab = pcm.check_table
    big = np.full(mag.shape[:-1] + (1,), np.inf)
    m = np.concatenate([mag, big], axis=-1)[..., tab]
    i1 = m.argmin(axis=-1)
    min1 = np.take_along_axis(m, i1[..., None], axis=-1)[..., 0]
    np.put_along_axis(m, i1[..., None], np.inf, axis=-1)
    min2 = m.min(axis=-1)
    first = tab[np.arange(tab.shape[0]), i1]
    ec = pcm.edge_check
    is_min = np.arange(pcm.n_edges) == first[..., ec]
    out = np.where(is_min, min2[..., ec], min1[..., ec])
    par = np.concatenate([neg, np.zeros(neg.shape[:-1] + (1,), bool)], axis=-1)[..., tab].sum(axis=-1) % 2
    sign = np.where((par[..., ec] == 1) ^ neg, -1.0, 1.0)
    return np.clip(sign * out, -LLR_CLIP, LLR_CLIP)


def decode_bp(pcm: ParityCheckMatrix, prior, iterations: int, *, early_exit: bool = False,
              min_sum: bool = False, c2v=None, counter: OpCounters | None = None) -> DecodeResult:
    """Run ``iterations`` flooding BP iterations.

    Parameters
    ----------
    prior : array (..., n_bits)
        Channel/prior LLRs, clipped to +-38.
    iterations : int
        Exact number of iterations unless ``early_exit`` stops once every
        syndrome in the batch is satisfied.
    min_sum : bool
        Replace the tanh rule by min-sum (approximation).
    c2v : array (..., n_edges), optional
        Check-to-bit messages to start from (zeros otherwise).
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    prior = np.clip(np.asarray(prior, dtype=float), -LLR_CLIP, LLR_CLIP)
    if prior.shape[-1] != pcm.n_bits:
        raise ValueError(f"prior length {prior.shape[-1]} != code length {pcm.n_bits}")
    lead = prior.shape[:-1]
    msgs = np.zeros(lead + (pcm.n_edges,)) if c2v is None else np.array(c2v, dtype=float)
    ev, vt = pcm.edge_var, pcm.var_table
    pad = np.zeros(lead + (1,))
    update = _check_update_minsum if min_sum else _check_update_tanh
    done = 0
    for it in range(iterations):
        intrinsic = np.concatenate([msgs, pad], axis=-1)[..., vt].sum(axis=-1)
        v2c = np.clip((prior + intrinsic)[..., ev] - msgs, -LLR_CLIP, LLR_CLIP)
        msgs = update(v2c, pcm, counter)
        done = it + 1
        if early_exit:
            tot = prior + np.concatenate([msgs, pad], axis=-1)[..., vt].sum(axis=-1)
            if not pcm.syndrome(hard_decide(tot)).any():
                break
    intrinsic = np.concatenate([msgs, pad], axis=-1)[..., vt].sum(axis=-1)
    total = prior + intrinsic
    hard = hard_decide(total)
    ok = ~pcm.syndrome(hard).any(axis=-1)
    return DecodeResult(BitLlr(total, intrinsic, prior), hard, ok, done, msgs)
