"""Regenerate the bundled (3,6)-regular PEG codes and their generator caches.

    python tools/make_codes.py            # both lengths
    python tools/make_codes.py 1024
"""
import sys
from pathlib import Path

import numpy as np

from scmaidd.ldpc.encoder import build_encoder, save_encoder
from scmaidd.ldpc.matrix import BUNDLED, dump_alist
from scmaidd.ldpc.peg import peg_regular

DATA = Path(__file__).resolve().parents[1] / "src" / "scmaidd" / "data"
SEEDS = {1024: 1, 9216: 1}


def make(length):
    pcm = peg_regular(length, 3, 6, seed=SEEDS[length])
    enc = build_encoder(pcm)
    if enc.k != length // 2:
        raise SystemExit(f"length {length}: H is rank deficient (k={enc.k}); try another seed")
    # store the matrix with information columns first so the cached encoder is the identity order
    pcm = enc.pcm
    enc = build_encoder(pcm)
    assert np.array_equal(enc.columns, np.arange(length))
    alist = DATA / BUNDLED[length]
    alist.write_text(dump_alist(pcm))
    save_encoder(enc, pcm, alist.with_suffix(".npz"))
    print(f"{alist.name}: n={pcm.n_bits} m={pcm.n_checks} k={enc.k}")


if __name__ == "__main__":
    for n in [int(a) for a in sys.argv[1:]] or sorted(BUNDLED):
        make(n)
