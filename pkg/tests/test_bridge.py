from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scmaidd.bridge import Interleaver, bits_to_symbol_llr, deinterleave, interleave, symbol_to_bit_llr
from scmaidd.channel import ChannelRealization
from scmaidd.codebook import build_codebook, default_codebook, derive_factor_graph
from scmaidd.detector import detect_log
from scmaidd.ldpc import LLR_CLIP
from scmaidd.ops import OpCounters

NAT = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)


def with_labels(cb, lab):
    return build_codebook(cb.codewords, labels=np.repeat(lab[None], cb.J, axis=0))


def pmf_from_bits(L, lab):
    p0 = 1 / (1 + np.exp(-L))
    p1 = 1 / (1 + np.exp(L))
    return np.array([np.prod([p0[i] if b == 0 else p1[i] for i, b in enumerate(row)]) for row in lab])


class TestBitsToSymbols:
    def test_zero_prior(self, cb):
        assert not bits_to_symbol_llr(np.zeros((5, 6, 2)), cb).any()

    @pytest.mark.parametrize("order", list(permutations(range(4))))
    def test_all_labellings(self, cb, order, rng):
        lab = NAT[list(order)]
        c = with_labels(cb, lab)
        for _ in range(5):
            L = rng.normal(scale=3, size=2)
            p = pmf_from_bits(L, lab)
            ref = np.log(p / p[c.reference[0]])
            np.testing.assert_allclose(bits_to_symbol_llr(L, c, j=0), ref, atol=1e-12)

    def test_certain_bit(self, cb):
        out = bits_to_symbol_llr(np.array([np.inf, 0.0]), cb, j=2)
        one = cb.labels[2][:, 0] == 1
        assert np.all(out[one] == -LLR_CLIP) and np.all(out[~one] == 0)


class TestSymbolsToBits:
    def test_uniform(self, cb):
        out = symbol_to_bit_llr(np.full((3, 6, 4), 1.5), cb)
        assert not out.total.any()

    def test_point_mass(self, cb):
        Ls = np.full(4, -1000.0)
        Ls[2] = 0.0
        out = symbol_to_bit_llr(Ls, cb, j=1)
        expect = np.where(cb.labels[1][2] == 0, LLR_CLIP, -LLR_CLIP)
        np.testing.assert_array_equal(out.total, expect)

    def test_probability_domain(self, cb, rng):
        Ls = rng.normal(scale=4, size=(200, 6, 4))
        prior = rng.normal(scale=2, size=(200, 6, 2))
        out = symbol_to_bit_llr(Ls, cb, bit_prior=prior)
        q = np.exp(Ls) / np.exp(Ls).sum(-1, keepdims=True)
        for j in range(6):
            for i in range(2):
                zero = cb.labels[j][:, i] == 0
                ref = np.log(q[:, j, zero].sum(-1) / q[:, j, ~zero].sum(-1))
                np.testing.assert_allclose(out.total[:, j, i], ref, atol=1e-9)
        np.testing.assert_array_equal(out.total, out.prior + out.intrinsic)
        no_prior = symbol_to_bit_llr(Ls, cb)
        np.testing.assert_allclose(out.intrinsic, no_prior.total - prior, atol=1e-12)

    def test_saturated_prior_keeps_intrinsic(self, cb):
        # a symbol vector built from a +38 prior plus evidence against it
        prior = np.array([LLR_CLIP, 0.0])
        Ls = bits_to_symbol_llr(prior, cb, j=0) + bits_to_symbol_llr(np.array([-5.0, 1.0]), cb, j=0)
        out = symbol_to_bit_llr(Ls, cb, j=0, bit_prior=prior)
        np.testing.assert_allclose(out.intrinsic, [-5.0, 1.0], atol=1e-9)

    def test_counts(self, cb):
        c = OpCounters()
        symbol_to_bit_llr(np.zeros((10, 6, 4)), cb, counter=c)
        # M log2 M exponentials and 2 log2 M logarithms per user-symbol
        assert (c.exp, c.log) == (10 * 6 * 8, 10 * 6 * 4)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (6, 2), elements=st.floats(-30, 30)))
def test_round_trip_through_pass_through_detector(L):
    cb = default_codebook()
    h = np.ones((1, 4, 6))
    sym = detect_log(cb, derive_factor_graph(cb), np.zeros((1, 4)), ChannelRealization(h, 1.0), prior=bits_to_symbol_llr(L, cb), T=0)
    back = symbol_to_bit_llr(sym.total, cb)
    np.testing.assert_allclose(back.total[0], L, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (6, 2), elements=st.floats(-30, 30)), st.integers(0, 5), st.integers(0, 1),
       st.floats(-10, 10))
def test_intrinsic_ignores_own_prior(L, j, i, delta):
    cb = default_codebook()
    evidence = np.random.default_rng(0).normal(size=(6, 4))
    a = symbol_to_bit_llr(bits_to_symbol_llr(L, cb) + evidence, cb, bit_prior=L)
    L2 = L.copy()
    L2[j, i] += delta
    b = symbol_to_bit_llr(bits_to_symbol_llr(L2, cb) + evidence, cb, bit_prior=L2)
    assert abs(a.intrinsic[j, i] - b.intrinsic[j, i]) < 1e-9


class TestInterleaver:
    def test_identity(self, rng):
        x = rng.normal(size=(6, 20))
        np.testing.assert_array_equal(Interleaver.identity(6, 20).interleave(x), x)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 31), st.integers(1, 300))
    def test_round_trip(self, seed, n):
        il = Interleaver.random(3, n, seed)
        x = np.random.default_rng(seed).normal(size=(2, 3, n))
        np.testing.assert_array_equal(il.deinterleave(il.interleave(x)), x)
        assert all(sorted(p) == list(range(n)) for p in il.perms)

    def test_distinct_users(self, comp):
        perms = comp.interleaver.perms
        assert len({p.tobytes() for p in perms}) == perms.shape[0]

    def test_length_mismatch(self):
        il = Interleaver.random(6, 10, 1)
        with pytest.raises(ValueError):
            il.interleave(np.zeros((6, 11)))
        with pytest.raises(ValueError):
            interleave(np.zeros(5), np.arange(4))

    def test_function_pair(self, rng):
        perm = rng.permutation(9)
        x = rng.normal(size=9)
        np.testing.assert_array_equal(deinterleave(interleave(x, perm), perm), x)
