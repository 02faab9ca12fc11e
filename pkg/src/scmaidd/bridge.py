"""Connection between the symbol-level detector and the bit-level decoder.

Symbol LLRs are referenced to the all-zeros label and bit LLRs use
L = log p(0) / p(1), so for a symbol x with label bits b(x)

    L_sym(x) = -sum_{i : b_i(x) = 1} L_bit(i)

which equals the sum over the label's "0" positions up to the constant that
re-referencing removes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .ldpc.decoder import LLR_CLIP, BitLlr
from .ops import OpCounters, logsumexp


def bits_to_symbol_llr(bit_prior, cb: Codebook, j: int | None = None) -> np.ndarray:
    """Bit-LLR priors (..., log2 M) -> symbol-LLR priors (..., M).

    With ``j`` given the labels of user j are used; otherwise the input is
    (..., J, log2 M) and every user is converted.
    """
    L = np.clip(np.asarray(bit_prior, dtype=float), -LLR_CLIP, LLR_CLIP)
    labels = cb.labels[j] if j is not None else cb.labels  # (M, nb) or (J, M, nb)
    return -np.einsum("...b,...mb->...m", L, labels.astype(float))


def symbol_to_bit_llr(sym_total, cb: Codebook, j: int | None = None, bit_prior=None,
                      counter: OpCounters | None = None, max_log: bool = False) -> BitLlr:
    """Detector symbol LLRs (..., M) -> bit LLRs (..., log2 M), split.

    total_i = log sum_{x: b_i = 0} e^{L(x)} - log sum_{x: b_i = 1} e^{L(x)}
    and ``intrinsic = total - bit_prior``, where ``bit_prior`` is the
    bit-level prior the symbol prior was built from (zero if absent). The
    intrinsic part is clipped to +-38 and the returned total is rebuilt as
    prior + intrinsic.
    """
    Ls = np.asarray(sym_total, dtype=float)
    nb = cb.bits_per_symbol
    labels = cb.labels[j] if j is not None else cb.labels
    per_user = labels.ndim == 3
    total = np.empty(Ls.shape[:-1] + (nb,))
    for i in range(nb):
        if per_user:
            # labels differ per user; order each user's symbols by bit i
            sel0 = np.argsort(labels[..., i], axis=-1, kind="stable")  # (J, M)
            half = cb.M // 2
            ordered = np.take_along_axis(Ls, np.broadcast_to(sel0, Ls.shape), axis=-1)
            l0 = logsumexp(ordered[..., :half], axis=-1, counter=counter, max_log=max_log)
            l1 = logsumexp(ordered[..., half:], axis=-1, counter=counter, max_log=max_log)
        else:
            zero = labels[:, i] == 0
            if zero.all() or not zero.any():
                raise AssertionError("bit labels are not a bijection")
            l0 = logsumexp(Ls[..., zero], axis=-1, counter=counter, max_log=max_log)
            l1 = logsumexp(Ls[..., ~zero], axis=-1, counter=counter, max_log=max_log)
        total[..., i] = l0 - l1
    prior = np.zeros_like(total) if bit_prior is None else np.clip(
        np.broadcast_to(np.asarray(bit_prior, dtype=float), total.shape), -LLR_CLIP, LLR_CLIP)
    # clip the intrinsic part, not the total: a saturated prior must not swallow it
    intrinsic = np.clip(total - prior, -LLR_CLIP, LLR_CLIP)
    return BitLlr(total=prior + intrinsic, intrinsic=intrinsic, prior=prior)


@dataclass(frozen=True, eq=False)
class Interleaver:
    """One permutation per user: ``interleaved[t] = x[perms[j, t]]``."""
    perms: np.ndarray  # (J, m)
    seed: int | None = None

    @classmethod
    def random(cls, J: int, length: int, seed: int) -> "Interleaver":
        perms = np.stack([np.random.default_rng([seed, j]).permutation(length) for j in range(J)])
        return cls(perms, seed)

    @classmethod
    def identity(cls, J: int, length: int) -> "Interleaver":
        return cls(np.tile(np.arange(length), (J, 1)))

    @property
    def length(self) -> int:
        return self.perms.shape[1]

    def _check(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.length or x.shape[-2] != self.perms.shape[0]:
            raise ValueError(f"expected (..., {self.perms.shape[0]}, {self.length}), got {x.shape}")
        return x

    def interleave(self, x) -> np.ndarray:
        x = self._check(x)
        return np.take_along_axis(x, np.broadcast_to(self.perms, x.shape), axis=-1)

    def deinterleave(self, x) -> np.ndarray:
        x = self._check(x)
        out = np.empty_like(x)
        np.put_along_axis(out, np.broadcast_to(self.perms, x.shape), x, axis=-1)
        return out


def interleave(x, perm) -> np.ndarray:
    x = np.asarray(x)
    perm = np.asarray(perm)
    if x.shape[-1] != perm.size:
        raise ValueError(f"length {x.shape[-1]} does not match permutation length {perm.size}")
    return x[..., perm]


def deinterleave(x, perm) -> np.ndarray:
    x = np.asarray(x)
    perm = np.asarray(perm)
    if x.shape[-1] != perm.size:
        raise ValueError(f"length {x.shape[-1]} does not match permutation length {perm.size}")
    out = np.empty_like(x)
    out[..., perm] = x
    return out
