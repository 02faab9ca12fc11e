"""Systematic encoding through GF(2) elimination of H.

The generator cache is an ``.npz`` file with four arrays:

``digest``   sha256 of the parity-check matrix (see ``ParityCheckMatrix.digest``)
``columns``  int64 permutation; codeword position t holds H column ``columns[t]``
``parity``   ``np.packbits`` of the (k, r) matrix A with parity = info @ A mod 2
``shape``    (k, r)

A cache whose digest differs from the loaded matrix is ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matrix import ParityCheckMatrix


class EncoderError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SystematicEncoder:
    """Codeword = [info | info @ parity mod 2] in the column order of ``pcm``.

    ``pcm`` is the input matrix with its columns reordered so that the
    information positions come first; ``columns`` maps back to the original
    column order. For the bundled codes ``columns`` is the identity.
    """
    pcm: ParityCheckMatrix
    parity: np.ndarray  # (k, r) uint8
    columns: np.ndarray

    @property
    def k(self) -> int:
        return self.parity.shape[0]

    @property
    def n(self) -> int:
        return self.pcm.n_bits

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, info) -> np.ndarray:
        info = np.asarray(info, dtype=np.uint8)
        if info.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} information bits, got {info.shape[-1]}")
        par = (info.astype(np.int64) @ self.parity) % 2
        return np.concatenate([info, par.astype(np.uint8)], axis=-1)


def _pack(H: np.ndarray) -> np.ndarray:
    m, n = H.shape
    W = -(-n // 64)
    padded = np.zeros((m, W * 64), dtype=np.uint64)
    padded[:, :n] = H
    return (padded.reshape(m, W, 64) << np.arange(64, dtype=np.uint64)).sum(axis=2, dtype=np.uint64)


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    bits = (words[:, :, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)
    return bits.reshape(words.shape[0], -1)[:, :n].astype(np.uint8)


def gf2_rref(H: np.ndarray):
    """Reduced row echelon form over GF(2), choosing pivots right to left.

    Returns (R, pivots) with ``pivots[i]`` the pivot column of row i of R.
    Rows without a pivot (dependent checks) are dropped.
    """
    H = np.asarray(H, dtype=np.uint8) % 2
    m, n = H.shape
    A = _pack(H)
    used = np.zeros(m, dtype=bool)
    pivots, pivot_rows = [], []
    one = np.uint64(1)
    for c in range(n - 1, -1, -1):
        w, b = divmod(c, 64)
        col = ((A[:, w] >> np.uint64(b)) & one).astype(bool)
        cand = np.flatnonzero(col & ~used)
        if cand.size == 0:
            continue
        r = cand[0]
        used[r] = True
        hit = np.flatnonzero(col)
        hit = hit[hit != r]
        if hit.size:
            A[hit] ^= A[r]
        pivots.append(c)
        pivot_rows.append(r)
        if len(pivots) == m:
            break
    R = _unpack(A[pivot_rows], n)
    return R, np.array(pivots, dtype=np.int64)


def build_encoder(pcm: ParityCheckMatrix) -> SystematicEncoder:
    R, piv = gf2_rref(pcm.to_dense())
    if piv.size == 0:
        raise EncoderError("parity-check matrix has rank 0")
    if piv.size == pcm.n_bits:
        raise EncoderError("parity-check matrix has full column rank; the code is trivial")
    is_piv = np.zeros(pcm.n_bits, dtype=bool)
    is_piv[piv] = True
    free = np.flatnonzero(~is_piv)
    order = np.argsort(piv)
    piv, R = piv[order], R[order]
    columns = np.concatenate([free, piv])
    parity = R[:, free].T.copy()  # c[piv_i] = sum_f R[i, f] c[f]
    new_pcm = pcm if np.array_equal(columns, np.arange(pcm.n_bits)) else pcm.permute_columns(columns)
    return SystematicEncoder(new_pcm, parity.astype(np.uint8), columns)


def save_encoder(enc: SystematicEncoder, original: ParityCheckMatrix, path) -> None:
    np.savez_compressed(path, digest=np.array(original.digest()), columns=enc.columns,
                        parity=np.packbits(enc.parity, axis=None), shape=np.array(enc.parity.shape))


def load_encoder(pcm: ParityCheckMatrix, path=None) -> SystematicEncoder:
    """Encoder for ``pcm``, read from the cache at ``path`` when it matches.

    A missing or stale cache is rebuilt and, when ``path`` is given and
    writable, rewritten.
    """
    if path is not None and Path(path).exists():
        with np.load(path) as z:
            if str(z["digest"]) == pcm.digest():
                k, r = (int(v) for v in z["shape"])
                parity = np.unpackbits(z["parity"], count=k * r).reshape(k, r)
                columns = z["columns"]
                new_pcm = pcm if np.array_equal(columns, np.arange(pcm.n_bits)) else pcm.permute_columns(columns)
                return SystematicEncoder(new_pcm, parity, columns)
    enc = build_encoder(pcm)
    if path is not None:
        try:
            save_encoder(enc, pcm, path)
        except OSError:
            pass
    return enc


def encode(enc: SystematicEncoder, info) -> np.ndarray:
    return enc.encode(info)
