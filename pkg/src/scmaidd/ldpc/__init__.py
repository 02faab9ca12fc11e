"""Regular LDPC codes: alist I/O, systematic encoding and BP decoding."""
from .decoder import LLR_CLIP, BitLlr, DecodeResult, decode_bp, hard_decide
from .encoder import SystematicEncoder, build_encoder, encode, load_encoder
from .matrix import AlistError, ParityCheckMatrix, dump_alist, load_alist, load_bundled

__all__ = [
    "LLR_CLIP", "BitLlr", "DecodeResult", "decode_bp", "hard_decide",
    "SystematicEncoder", "build_encoder", "encode", "load_encoder",
    "AlistError", "ParityCheckMatrix", "dump_alist", "load_alist", "load_bundled",
]
