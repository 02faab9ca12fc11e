"""Joint iterative SCMA detection and LDPC decoding.

Each outer iteration runs ``i_t`` MPA iterations seeded with symbol priors
built from the decoder's intrinsic output, hands the detector's intrinsic bit
LLRs (deinterleaved) to the decoder as its prior, runs ``i_l`` BP
iterations, and interleaves the decoder's intrinsic LLRs back for the next
round. With ``i_o = 1`` this is the conventional one-pass receiver.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bridge import Interleaver, bits_to_symbol_llr, symbol_to_bit_llr
from .channel import ChannelRealization
from .codebook import Codebook, FactorGraph
from .detector import detect_log
from .ldpc.decoder import decode_bp
from .ldpc.decoder import hard_decide as _hard_bits
from .ldpc.encoder import SystematicEncoder
from .ops import OpCounters, new_counters


@dataclass(frozen=True)
class IterationSchedule:
    i_t: int
    i_l: int
    i_o: int
    mode_name: str = ""

    def __post_init__(self):
        for name in ("i_t", "i_l", "i_o"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v}")

    @property
    def traditional(self) -> bool:
        return self.i_o == 1


# Modes 2-4 keep the decoder budget at 32 iterations in total. Mode 3's
# split is not published; (4, 16, 2) is a surrogate.
MODES = {
    "mode1": IterationSchedule(1, 1, 32, "mode1"),
    "mode2": IterationSchedule(2, 8, 4, "mode2"),
    "mode3": IterationSchedule(4, 16, 2, "mode3"),
    "mode4": IterationSchedule(8, 32, 1, "mode4"),
}


@dataclass(frozen=True, eq=False)
class Components:
    cb: Codebook
    fg: FactorGraph
    encoder: SystematicEncoder
    interleaver: Interleaver

    def __post_init__(self):
        n = self.encoder.n
        if n % self.cb.bits_per_symbol:
            raise ValueError(f"code length {n} is not a multiple of log2(M) = {self.cb.bits_per_symbol}")
        if self.interleaver.perms.shape != (self.cb.J, n):
            raise ValueError("interleaver does not match (J, code length)")

    @property
    def slots(self) -> int:
        """SCMA symbols per user per codeword."""
        return self.encoder.n // self.cb.bits_per_symbol


@dataclass
class ReceiverFlags:
    persist_messages: bool = False  # carry MPA messages across outer iterations
    persist_decoder: bool = False  # carry BP check messages across outer iterations
    max_log: bool = False
    min_sum: bool = False
    early_exit: bool = False


@dataclass
class OuterDiagnostics:
    syndrome_ok: np.ndarray  # (J,)
    mean_abs_detector_llr: float
    mean_abs_decoder_llr: float


@dataclass
class ReceiverResult:
    info_bits: np.ndarray  # (J, k)
    coded_bits: np.ndarray  # (J, n) hard decisions on the decoder totals
    decoder_total: np.ndarray
    diagnostics: list[OuterDiagnostics] = field(default_factory=list)
    counters: dict[str, OpCounters] = field(default_factory=new_counters)


def to_slots(x: np.ndarray, nb: int) -> np.ndarray:
    """(J, S * nb) -> (S, J, nb)"""
    J, n = x.shape
    return x.reshape(J, n // nb, nb).transpose(1, 0, 2)


def from_slots(x: np.ndarray) -> np.ndarray:
    """(S, J, nb) -> (J, S * nb)"""
    S, J, nb = x.shape
    return x.transpose(1, 0, 2).reshape(J, S * nb)


def hard_decide(decoder_totals, k: int | None = None) -> np.ndarray:
    """Bit 0 iff LLR >= 0 (a zero LLR decides 0). With ``k`` only the first
    k (systematic) positions are returned."""
    bits = _hard_bits(decoder_totals)
    return bits if k is None else bits[..., :k]


def detector_pass(y: np.ndarray, ch: ChannelRealization, comp: Components, dec_intrinsic: np.ndarray, i_t: int,
                  flags: ReceiverFlags | None = None, counters: dict | None = None, init=None):
    """Detector half of an outer iteration.

    Turns the decoder's intrinsic LLRs (J, n) into symbol priors, runs
    ``i_t`` MPA iterations and returns ``(decoder_prior, detector_output,
    bit_llrs)`` where ``decoder_prior`` is the deinterleaved detector
    intrinsic part, (J, n).
    """
    flags = flags or ReceiverFlags()
    counters = counters if counters is not None else new_counters()
    cb, il = comp.cb, comp.interleaver
    bit_prior = to_slots(il.interleave(dec_intrinsic), cb.bits_per_symbol)
    sym_prior = bits_to_symbol_llr(bit_prior, cb)
    det = detect_log(cb, comp.fg, y, ch, prior=sym_prior, T=i_t, counter=counters["detector"],
                     max_log=flags.max_log, init=init)
    bits = symbol_to_bit_llr(det.total, cb, bit_prior=bit_prior, counter=counters["bridge"], max_log=flags.max_log)
    return il.deinterleave(from_slots(bits.intrinsic)), det, bits


def run_receiver(y: np.ndarray, ch: ChannelRealization, sched: IterationSchedule, comp: Components,
                 flags: ReceiverFlags | None = None, counters: dict | None = None) -> ReceiverResult:
    """Decode one frame: ``y`` is (S, K) and ``ch.h`` is (S, K, J)."""
    flags = flags or ReceiverFlags()
    counters = counters if counters is not None else new_counters()
    cb, enc = comp.cb, comp.encoder
    if y.shape != (comp.slots, cb.K):
        raise ValueError(f"received block {y.shape} != ({comp.slots}, {cb.K})")
    dec_intrinsic = np.zeros((cb.J, enc.n))
    c2v = None
    mpa_state = None
    diags = []
    dec = None
    for _ in range(sched.i_o):
        dec_prior, det, bits = detector_pass(y, ch, comp, dec_intrinsic, sched.i_t, flags, counters,
                                             init=mpa_state if flags.persist_messages else None)
        mpa_state = det.messages
        dec = decode_bp(enc.pcm, dec_prior, sched.i_l, early_exit=flags.early_exit, min_sum=flags.min_sum,
                        c2v=c2v if flags.persist_decoder else None, counter=counters["decoder"])
        c2v = dec.c2v
        dec_intrinsic = dec.llr.intrinsic
        diags.append(OuterDiagnostics(dec.syndrome_ok.copy(), float(np.abs(bits.total).mean()),
                                      float(np.abs(dec.llr.total).mean())))
    coded = hard_decide(dec.llr.total)
    return ReceiverResult(coded[:, :enc.k], coded, dec.llr.total, diags, counters)
