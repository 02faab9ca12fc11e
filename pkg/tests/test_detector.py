from itertools import product

import numpy as np
import pytest

from scmaidd.channel import ChannelRealization, draw_channel, transmit
from scmaidd.codebook import build_codebook, derive_factor_graph, load_codebook
from scmaidd.detector import ORACLE_MAX_COMBOS, detect_log, detect_prob, exact_map_oracle
from scmaidd.ops import OpCounters
from scmaidd.sim.checks import enumerate_factor_messages


def rayleigh_instance(cb, fg, rng, S=20, n0=0.3):
    ch = draw_channel("rayleigh", cb.K, cb.J, fg, rng, n0=n0, n_slots=S)
    sym = rng.integers(0, cb.M, size=(S, cb.J))
    return sym, ch, transmit(cb, fg, sym, ch, rng)


def two_user_tree(rng):
    cw = rng.normal(size=(2, 4, 1)) + 1j * rng.normal(size=(2, 4, 1))
    cw /= np.sqrt((np.abs(cw) ** 2).sum(-1).mean(-1))[:, None, None]
    return build_codebook(cw)


class TestProbabilityDomain:
    def test_noiseless_recovery(self, cb, fg, rng):
        ch = draw_channel("awgn", 4, 6, fg, rng, n0=1e-3, n_slots=50)
        sym = rng.integers(0, 4, size=(50, 6))
        y = transmit(cb, fg, sym, ChannelRealization(ch.h, 0.0), rng)
        v = detect_prob(cb, fg, y, ch, T=3)
        np.testing.assert_array_equal(v.argmax(-1), sym)

    def test_single_user_is_exact_map(self, rng):
        cb = load_codebook({"J": 1, "K": 1, "M": 2, "users": [
            {"support": [1], "codewords": [[[1.0, 0.0]], [[-1.0, 0.0]]], "labels": [[0], [1]]}]})
        fg = derive_factor_graph(cb)
        h = np.array([[0.7 - 0.2j]])
        y = np.array([0.3 + 0.1j])
        prior = np.array([[0.3, 0.7]])
        ch = ChannelRealization(h, 0.8)
        v = detect_prob(cb, fg, y, ch, prior=prior, T=1)
        like = prior[0] * np.exp(-np.abs(y[0] - h[0, 0] * np.array([1, -1])) ** 2 / 0.8)
        np.testing.assert_allclose(v[0], like / like.sum(), rtol=1e-12)

    def test_two_user_tree_matches_enumeration(self, rng):
        cb = two_user_tree(rng)
        fg = derive_factor_graph(cb)
        h = rng.normal(size=(1, 2)) + 1j * rng.normal(size=(1, 2))
        y = np.array([0.4 - 0.9j])
        prior = rng.dirichlet(np.ones(4), size=2)
        ch = ChannelRealization(h, 0.6)
        joint = np.zeros((4, 4))
        for a, b in product(range(4), repeat=2):
            z = h[0, 0] * cb.codewords[0, a, 0] + h[0, 1] * cb.codewords[1, b, 0]
            joint[a, b] = prior[0, a] * prior[1, b] * np.exp(-abs(y[0] - z) ** 2 / 0.6)
        v = detect_prob(cb, fg, y, ch, prior=prior, T=1)
        np.testing.assert_allclose(v[0], joint.sum(1) / joint.sum(), rtol=1e-12)
        np.testing.assert_allclose(v[1], joint.sum(0) / joint.sum(), rtol=1e-12)

    def test_T_must_be_positive(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=2)
        with pytest.raises(ValueError):
            detect_prob(cb, fg, y, ch, T=0)

    def test_shape_mismatch(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=2)
        with pytest.raises(ValueError):
            detect_prob(cb, fg, y[:1], ch, T=1)


class TestLogDomain:
    @pytest.mark.parametrize("T", [1, 2, 4, 7])
    def test_matches_probability_domain(self, cb, fg, rng, T):
        _, ch, y = rayleigh_instance(cb, fg, rng)
        prior = rng.dirichlet(np.ones(4), size=(20, 6))
        p = detect_prob(cb, fg, y, ch, prior=prior, T=T)
        np.testing.assert_allclose(detect_log(cb, fg, y, ch, prior=np.log(prior), T=T).posterior(), p, rtol=1e-9)

    def test_pass_through(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=3)
        out = detect_log(cb, fg, y, ch, T=0)
        assert not out.total.any() and not out.intrinsic.any()

    def test_decomposition_and_reference(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng)
        prior = rng.normal(size=(20, 6, 4))
        out = detect_log(cb, fg, y, ch, prior=prior, T=3)
        np.testing.assert_array_equal(out.total, out.prior + out.intrinsic)
        ref = cb.reference
        for part in (out.total, out.prior, out.intrinsic):
            assert not part[:, np.arange(6), ref].any()
        for store in (out.messages.U, out.messages.V):
            for (k, j), msg in store.items():
                assert not msg[:, ref[j]].any()

    def test_uniform_prior_is_neutral(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=5)
        out = detect_log(cb, fg, y, ch, prior=np.full((5, 6, 4), 3.7), T=2)
        assert not out.prior.any()
        np.testing.assert_allclose(out.total, detect_log(cb, fg, y, ch, T=2).total, atol=1e-12)

    def test_first_iteration_against_enumeration(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=30)
        Lp = rng.normal(size=(30, 6, 4))
        Lp -= Lp[:, np.arange(6), cb.reference][..., None]
        out = detect_log(cb, fg, y, ch, prior=Lp, T=1)
        ref = enumerate_factor_messages(cb, fg, y, ch, {(k, p): Lp[:, p] for k, p in fg.edges()})
        for e in fg.edges():
            np.testing.assert_allclose(out.messages.U[e], ref[e], atol=1e-10)

    def test_exponential_count_per_iteration(self, cb, fg, rng):
        _, ch, y = rayleigh_instance(cb, fg, rng, S=10)
        for T in (1, 3):
            c = OpCounters()
            detect_log(cb, fg, y, ch, T=T, counter=c)
            # d_k K M^d_k / J per user-symbol per iteration
            assert c.exp == T * 128 * 10 * 6

    def test_max_log_is_close_at_high_snr(self, cb, fg, rng):
        sym, ch, y = rayleigh_instance(cb, fg, rng, n0=0.01)
        a = detect_log(cb, fg, y, ch, T=4).decisions()
        b = detect_log(cb, fg, y, ch, T=4, max_log=True).decisions()
        assert (a == b).mean() > 0.95


class TestOracle:
    def test_combination_count(self, cb, fg, rng):
        assert cb.M ** cb.J == 4096 <= ORACLE_MAX_COMBOS
        _, ch, y = rayleigh_instance(cb, fg, rng, S=4)
        res = exact_map_oracle(cb, fg, y, ch)
        np.testing.assert_allclose(res.marginals.sum(-1), 1.0)
        assert res.joint_map.shape == (4, 6)

    def test_single_user(self, rng):
        cw = (rng.normal(size=(1, 4, 2)) + 1j * rng.normal(size=(1, 4, 2)))
        cw /= np.sqrt((np.abs(cw) ** 2).sum(-1).mean())
        cb = build_codebook(cw)
        fg = derive_factor_graph(cb)
        h = np.ones((2, 1))
        y = np.array([0.2 + 0.1j, -0.5j])
        post = np.exp(-(np.abs(y[None] - cw[0]) ** 2).sum(-1) / 0.5)
        res = exact_map_oracle(cb, fg, y, ChannelRealization(h, 0.5))
        np.testing.assert_allclose(res.marginals[0], post / post.sum(), rtol=1e-12)

    def test_symmetric_users(self, rng):
        cw = np.zeros((2, 2, 1), dtype=complex)
        cw[:, :, 0] = [1, -1]
        cb = build_codebook(cw)
        fg = derive_factor_graph(cb)
        res = exact_map_oracle(cb, fg, np.array([0.3]), ChannelRealization(np.ones((1, 2)), 1.0))
        np.testing.assert_allclose(res.marginals[0], res.marginals[1], rtol=1e-14)

    def test_too_large(self, rng):
        cw = np.zeros((11, 4, 1), dtype=complex)
        cw[:, :, 0] = [1, -1, 1j, -1j]
        cb = build_codebook(cw)
        with pytest.raises(ValueError, match="limit"):
            exact_map_oracle(cb, derive_factor_graph(cb), np.zeros(1), ChannelRealization(np.ones((1, 11)), 1.0))
