"""Uplink channel: per-edge gains plus circular complex Gaussian noise.

Arrays are slot-major. For S SCMA symbols (slots) the gains have shape
(S, K, J), the transmitted symbol indices (S, J) and the received signal
(S, K). A single slot may drop the leading axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, FactorGraph

MODELS = ("awgn", "rayleigh")


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    n0: float
    model: str = "awgn"


def es_n0_db_to_n0(es_n0_db, es: float = 1.0):
    """Noise density for a per-user symbol energy ``es``."""
    return es * 10.0 ** (-np.asarray(es_n0_db, dtype=float) / 10.0)


def n0_to_es_n0_db(n0, es: float = 1.0):
    return 10.0 * np.log10(es / np.asarray(n0, dtype=float))


def draw_channel(model: str, K: int, J: int, fg: FactorGraph, rng: np.random.Generator,
                 n0: float = 1.0, n_slots: int | None = None) -> ChannelRealization:
    """Draw gains for ``n_slots`` slots (a single (K, J) matrix when None).

    Rayleigh gains are i.i.d. CN(0, 1) per edge and per slot; entries off the
    factor graph are left at 0. AWGN gains are all ones.
    """
    if model not in MODELS:
        raise ValueError(f"unsupported channel model {model!r}; choose from {MODELS}")
    if fg.indicator.shape != (K, J):
        raise ValueError("factor graph does not match (K, J)")
    shape = (K, J) if n_slots is None else (n_slots, K, J)
    if model == "awgn":
        return ChannelRealization(np.ones(shape, dtype=complex), float(n0), model)
    ks, js = np.nonzero(fg.indicator)
    lead = () if n_slots is None else (n_slots,)
    g = rng.standard_normal(lead + (ks.size, 2)) / np.sqrt(2.0)
    h = np.zeros(shape, dtype=complex)
    h[..., ks, js] = g[..., 0] + 1j * g[..., 1]
    return ChannelRealization(h, float(n0), model)


def superpose(cb: Codebook, fg: FactorGraph, symbols: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Noiseless sum over users of diag(h_j) x_j; only edges of ``fg`` contribute."""
    symbols = np.asarray(symbols)
    x = cb.codewords[np.arange(cb.J), symbols]  # (..., J, K)
    hk = h * fg.indicator  # (..., K, J)
    return np.einsum("...kj,...jk->...k", hk, x)


def transmit(cb: Codebook, fg: FactorGraph, symbols, ch: ChannelRealization,
             rng: np.random.Generator) -> np.ndarray:
    """y_k = sum_{j in dk} h_kj x_kj + n_k with n_k ~ CN(0, N0)."""
    symbols = np.asarray(symbols)
    if symbols.min() < 0 or symbols.max() >= cb.M:
        raise ValueError("symbol index out of range")
    clean = superpose(cb, fg, symbols, ch.h)
    noise = rng.standard_normal(clean.shape + (2,)) * np.sqrt(ch.n0 / 2.0)
    return clean + noise[..., 0] + 1j * noise[..., 1]
