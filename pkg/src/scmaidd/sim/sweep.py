"""Monte Carlo BER sweep over channels, Es/N0 points and receiver modes.

Frames for a (channel, Es/N0) point are drawn from streams keyed on
(master seed, channel index, Es/N0 index, frame index), so every mode sees
the same frames and the result never depends on how frames are spread over
workers. Frames are processed in fixed-size blocks; the stopping rule is
evaluated after each block in block order, per mode.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import es_n0_db_to_n0
from ..codebook import default_codebook, load_codebook
from ..ldpc.encoder import load_encoder
from ..ldpc.matrix import bundled_code_path, load_alist
from ..ops import STAGES, OpCounters, new_counters
from ..receiver import Components, IterationSchedule, ReceiverFlags, run_receiver
from .config import ConfigError, SimConfig
from .frames import frame_rng, make_components, make_frame

log = logging.getLogger(__name__)


@dataclass
class CellStats:
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    seconds: float = 0.0
    ops: dict[str, OpCounters] = field(default_factory=new_counters)

    def merge(self, other: "CellStats"):
        self.frames += other.frames
        self.bits += other.bits
        self.bit_errors += other.bit_errors
        self.frame_errors += other.frame_errors
        self.seconds += other.seconds
        for s in STAGES:
            self.ops[s].add(**other.ops[s].as_dict())


@dataclass
class ResultRow:
    channel: str
    mode: str
    es_n0_db: float
    frames: int
    bits: int
    bit_errors: int
    frame_errors: int
    ops_per_symbol: dict[str, float]  # mul/div/exp/log summed over stages, per user-symbol
    seconds: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else float("nan")

    @property
    def fer(self) -> float:
        # one frame carries J codewords; a frame error is any codeword in error
        return self.frame_errors / self.frames if self.frames else float("nan")


@dataclass
class ResultTable:
    rows: list[ResultRow]
    config: SimConfig | None = None

    def select(self, channel: str, mode: str) -> list[ResultRow]:
        return sorted((r for r in self.rows if r.channel == channel and r.mode == mode), key=lambda r: r.es_n0_db)


def resolve_components(cfg: SimConfig) -> Components:
    try:
        cb = default_codebook() if cfg.codebook == "default" else load_codebook(Path(cfg.codebook))
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot load codebook {cfg.codebook!r}: {e}") from None
    try:
        if cfg.code.startswith("bundled:"):
            path = bundled_code_path(int(cfg.code.split(":", 1)[1]))
            cache = path.with_suffix(".npz")
        else:
            path, cache = Path(cfg.code), None
        pcm = load_alist(path)
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot load code {cfg.code!r}: {e}") from None
    enc = load_encoder(pcm, cache)
    if enc.n % cb.bits_per_symbol:
        raise ConfigError(f"code length {enc.n} is not a multiple of log2(M) = {cb.bits_per_symbol}")
    return make_components(cb, enc, cfg.interleaver_seed)


# per-process state for worker pools
_WORKER: dict = {}


def _init_worker(comp, flags):
    _WORKER["comp"] = comp
    _WORKER["flags"] = flags


def run_block(comp: Components, flags: ReceiverFlags, modes: list[IterationSchedule], model: str,
              n0: float, seed_key: tuple, frames: range) -> dict[str, CellStats]:
    """Simulate ``frames`` of one (channel, Es/N0) point for every mode in ``modes``."""
    out = {m.mode_name: CellStats() for m in modes}
    J, k = comp.cb.J, comp.encoder.k
    for f in frames:
        fr = make_frame(comp, model, n0, frame_rng(*seed_key, f))
        for m in modes:
            st = out[m.mode_name]
            t0 = time.perf_counter()
            res = run_receiver(fr.y, fr.channel, m, comp, flags, counters=st.ops)
            st.seconds += time.perf_counter() - t0
            err = res.info_bits != fr.info
            st.frames += 1
            st.bits += J * k
            st.bit_errors += int(err.sum())
            st.frame_errors += int(err.any())
    return out


def _block_task(modes, model, n0, seed_key, frames):
    return run_block(_WORKER["comp"], _WORKER["flags"], modes, model, n0, seed_key, frames)


def _done(st: CellStats, cfg: SimConfig) -> bool:
    s = cfg.stopping
    if st.frames >= s.max_frames:
        return True
    return st.frames >= s.min_frames and st.bit_errors >= s.min_bit_errors


def _run_point(cfg, comp, modes, model, n0, seed_key, submit) -> dict[str, CellStats]:
    """Blocks are issued speculatively (up to ``lookahead`` ahead) but consumed in
    order; a mode that has stopped ignores later blocks, so the outcome matches
    the serial run exactly."""
    s = cfg.stopping
    stats = {m.mode_name: CellStats() for m in modes}
    active = list(modes)
    lookahead = max(1, cfg.workers)
    pending = []
    start = 0
    while active:
        while len(pending) < lookahead and start < s.max_frames:
            stop = min(start + s.block_frames, s.max_frames)
            pending.append(submit(list(active), model, n0, seed_key, range(start, stop)))
            start = stop
        if not pending:
            break
        block = pending.pop(0)
        block = block.result() if hasattr(block, "result") else block
        for m in active:
            stats[m.mode_name].merge(block[m.mode_name])
        active = [m for m in active if not _done(stats[m.mode_name], cfg)]
    for p in pending:
        if hasattr(p, "cancel"):
            p.cancel()
    return stats


def _row(channel, mode, snr, st: CellStats, comp: Components) -> ResultRow:
    symbols = max(st.frames, 1) * comp.slots * comp.cb.J
    ops = {op: sum(getattr(st.ops[s], op) for s in STAGES) / symbols for op in ("mul", "div", "exp", "log")}
    return ResultRow(channel, mode, snr, st.frames, st.bits, st.bit_errors, st.frame_errors, ops, st.seconds)


def run_sweep(cfg: SimConfig, comp: Components | None = None) -> ResultTable:
    comp = comp or resolve_components(cfg)
    rows = []
    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker,
                                   initargs=(comp, cfg.flags))
        submit = lambda *a: pool.submit(_block_task, *a)  # noqa: E731
    else:
        submit = lambda *a: run_block(comp, cfg.flags, *a)  # noqa: E731
    try:
        for ci, channel in enumerate(cfg.channels):
            clean: set[str] = set()
            for si, snr in enumerate(cfg.es_n0_db):
                modes = [m for m in cfg.modes if m.mode_name not in clean]
                if not modes:
                    break
                stats = _run_point(cfg, comp, modes, channel, es_n0_db_to_n0(snr), (cfg.seed, ci, si), submit)
                for m in modes:
                    st = stats[m.mode_name]
                    rows.append(_row(channel, m.mode_name, snr, st, comp))
                    log.info("%s %s %.2f dB: %d frames, BER %.3e", channel, m.mode_name, snr, st.frames,
                             rows[-1].ber)
                    if cfg.stopping.stop_after_clean and st.bit_errors == 0:
                        clean.add(m.mode_name)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return ResultTable(rows, cfg)


def ber_crossing(rows: list[ResultRow], target: float) -> float:
    """Es/N0 at which the BER curve first falls to ``target``, by linear
    interpolation of log10(BER) between adjacent grid points. A zero-error
    point counts as half an error. Returns nan if the target is never reached.
    """
    prev = None
    for r in sorted(rows, key=lambda r: r.es_n0_db):
        ber = r.bit_errors / r.bits
        if ber <= target:
            if prev is None:
                return r.es_n0_db
            b1 = np.log10(prev[1])
            b2 = np.log10(max(ber, 0.5 / r.bits))
            frac = float(np.clip((b1 - np.log10(target)) / (b1 - b2), 0.0, 1.0)) if b1 > b2 else 1.0
            return prev[0] + frac * (r.es_n0_db - prev[0])
        prev = (r.es_n0_db, ber)
    return float("nan")
