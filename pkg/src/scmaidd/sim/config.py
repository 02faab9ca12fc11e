"""Sweep configuration (YAML).

Example::

    codebook: default            # or a path to a codebook JSON file
    code: bundled:1024           # or bundled:9216, or a path to an .alist file
    channels: [awgn, rayleigh]
    es_n0_db: {start: 2.0, stop: 5.0, step: 0.5}   # or a list
    modes: [mode2, mode4, {name: custom, i_t: 3, i_l: 10, i_o: 3}]
    stopping: {min_frames: 20, min_bit_errors: 100, max_frames: 2000, block_frames: 4}
    seed: 1
    interleaver_seed: 2024
    workers: 1
    output: results
    plot: false
    flags: {max_log: false, persist_messages: false, persist_decoder: false,
            early_exit: false, min_sum: false}
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..channel import MODELS
from ..receiver import MODES, IterationSchedule, ReceiverFlags


class ConfigError(ValueError):
    pass


@dataclass
class Stopping:
    min_frames: int = 20
    min_bit_errors: int = 100
    max_frames: int = 2000
    block_frames: int = 4
    stop_after_clean: bool = False  # skip higher Es/N0 for a mode once a point had no errors


@dataclass
class SimConfig:
    es_n0_db: list[float]
    modes: list[IterationSchedule]
    channels: list[str] = field(default_factory=lambda: ["awgn"])
    codebook: str = "default"
    code: str = "bundled:1024"
    stopping: Stopping = field(default_factory=Stopping)
    seed: int = 1
    interleaver_seed: int = 2024
    workers: int = 1
    output: str = "results"
    plot: bool = False
    flags: ReceiverFlags = field(default_factory=lambda: ReceiverFlags(persist_decoder=False))

    def __post_init__(self):
        if not self.es_n0_db:
            raise ConfigError("es_n0_db grid is empty")
        if not self.modes:
            raise ConfigError("no modes configured")
        if not self.channels:
            raise ConfigError("no channels configured")
        for c in self.channels:
            if c not in MODELS:
                raise ConfigError(f"unknown channel {c!r}; choose from {MODELS}")
        names = [m.mode_name for m in self.modes]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate mode names {names}")
        s = self.stopping
        if s.min_frames < 1 or s.max_frames < s.min_frames or s.block_frames < 1 or s.min_bit_errors < 0:
            raise ConfigError("stopping rule needs 1 <= min_frames <= max_frames, block_frames >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modes"] = [{"name": m.mode_name, "i_t": m.i_t, "i_l": m.i_l, "i_o": m.i_o} for m in self.modes]
        return d


def _strict(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected a mapping")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {sorted(extra)}")


def _grid(spec) -> list[float]:
    if isinstance(spec, dict):
        _strict(spec, {"start", "stop", "step"}, "es_n0_db")
        try:
            start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        except KeyError as e:
            raise ConfigError(f"es_n0_db: missing {e}") from None
        if step <= 0 or stop < start:
            raise ConfigError("es_n0_db: need step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if not isinstance(spec, list):
        raise ConfigError("es_n0_db must be a list or {start, stop, step}")
    return [float(v) for v in spec]


def _mode(spec) -> IterationSchedule:
    if isinstance(spec, str):
        if spec not in MODES:
            raise ConfigError(f"unknown mode {spec!r}; named modes are {sorted(MODES)}")
        return MODES[spec]
    _strict(spec, {"name", "i_t", "i_l", "i_o"}, "mode")
    try:
        return IterationSchedule(int(spec["i_t"]), int(spec["i_l"]), int(spec["i_o"]),
                                 str(spec.get("name", f"it{spec['i_t']}_il{spec['i_l']}_io{spec['i_o']}")))
    except KeyError as e:
        raise ConfigError(f"mode: missing {e}") from None
    except ValueError as e:
        raise ConfigError(f"mode: {e}") from None


_TOP = {"codebook", "code", "channels", "es_n0_db", "modes", "stopping", "seed", "interleaver_seed",
        "workers", "output", "plot", "flags"}


def parse_config(doc: dict) -> SimConfig:
    _strict(doc, _TOP, "config")
    if "es_n0_db" not in doc or "modes" not in doc:
        raise ConfigError("config needs es_n0_db and modes")
    kw = {k: doc[k] for k in ("codebook", "code", "seed", "interleaver_seed", "workers", "output", "plot")
          if k in doc}
    channels = doc.get("channels", ["awgn"])
    if isinstance(channels, str):
        channels = [channels]
    stop = doc.get("stopping", {})
    _strict(stop, set(Stopping.__dataclass_fields__), "stopping")
    flags = doc.get("flags", {})
    _strict(flags, set(ReceiverFlags.__dataclass_fields__), "flags")
    flags = {"persist_decoder": False, **flags}
    modes = doc["modes"] if isinstance(doc["modes"], list) else [doc["modes"]]
    try:
        return SimConfig(es_n0_db=_grid(doc["es_n0_db"]), modes=[_mode(m) for m in modes],
                         channels=list(channels), stopping=Stopping(**stop),
                         flags=ReceiverFlags(**flags), **kw)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def load_config(source) -> SimConfig:
    if isinstance(source, dict):
        return parse_config(source)
    text = Path(source).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from None
    return parse_config(doc or {})
