"""Regenerate the bundled codebook JSON from its generating rule."""
from pathlib import Path

import numpy as np

from scmaidd.codebook import dump_codebook, load_codebook, make_default_codebook

OUT = Path(__file__).resolve().parents[1] / "src" / "scmaidd" / "data" / "codebook_6x4_m4.json"

if __name__ == "__main__":
    cb = make_default_codebook()
    OUT.write_text(dump_codebook(cb, comment="4-point real-pair mother constellation, a/b = 2, "
                                             "rotations in multiples of pi/3"))
    back = load_codebook(OUT)
    assert np.allclose(back.codewords, cb.codewords, atol=1e-12)
    print(OUT)
