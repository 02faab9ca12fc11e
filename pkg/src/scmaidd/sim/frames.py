"""Transmitter side of one frame: one LDPC codeword per user."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bridge import Interleaver
from ..channel import ChannelRealization, draw_channel, transmit
from ..codebook import Codebook, bits_to_indices, derive_factor_graph
from ..ldpc.encoder import SystematicEncoder
from ..receiver import Components


@dataclass
class Frame:
    info: np.ndarray  # (J, k)
    coded: np.ndarray  # (J, n)
    symbols: np.ndarray  # (S, J)
    y: np.ndarray  # (S, K)
    channel: ChannelRealization


def make_components(cb: Codebook, encoder: SystematicEncoder, interleaver_seed: int = 2024) -> Components:
    il = Interleaver.random(cb.J, encoder.n, interleaver_seed)
    return Components(cb, derive_factor_graph(cb), encoder, il)


def frame_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent stream for (master seed, key...); the same key always gives the same stream."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key)))


def make_frame(comp: Components, model: str, n0: float, rng: np.random.Generator) -> Frame:
    cb, fg, enc = comp.cb, comp.fg, comp.encoder
    info = rng.integers(0, 2, size=(cb.J, enc.k), dtype=np.uint8)
    coded = enc.encode(info)
    symbols = bits_to_indices(cb, comp.interleaver.interleave(coded)).T
    ch = draw_channel(model, cb.K, cb.J, fg, rng, n0=n0, n_slots=comp.slots)
    y = transmit(cb, fg, symbols, ch, rng)
    return Frame(info, coded, symbols, y, ch)
