"""Detector and bridge checks against brute-force references.

Each check builds its own reference by direct enumeration (explicit loops,
``np.logaddexp`` reductions, probability-domain sums) rather than reusing
the detector's message-passing code, and returns a :class:`CheckResult`.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from ..bridge import bits_to_symbol_llr, symbol_to_bit_llr
from ..channel import ChannelRealization, draw_channel, es_n0_db_to_n0, transmit
from ..codebook import Codebook, build_codebook, default_codebook, derive_factor_graph
from ..detector import detect_log, detect_prob, exact_map_oracle


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float  # the measured quantity (max error, SER gap, ...)
    tolerance: float
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _random_cb(rng, supports, K, M=4) -> Codebook:
    J = len(supports)
    cw = np.zeros((J, M, K), dtype=complex)
    for j, sup in enumerate(supports):
        for k in sup:
            cw[j, :, k] = rng.normal(size=M) + 1j * rng.normal(size=M)
    cw /= np.sqrt((np.abs(cw) ** 2).sum(axis=-1).mean(axis=-1))[:, None, None]
    return build_codebook(cw)


def _random_instance(rng, cb, fg, S, n0):
    h = np.zeros((S, cb.K, cb.J), dtype=complex)
    for k, j in fg.edges():
        h[:, k, j] = (rng.normal(size=S) + 1j * rng.normal(size=S)) / np.sqrt(2)
    ch = ChannelRealization(h, n0, "rayleigh")
    sym = rng.integers(0, cb.M, size=(S, cb.J))
    y = transmit(cb, fg, sym, ch, rng)
    prior = rng.dirichlet(np.ones(cb.M), size=(S, cb.J))
    return y, ch, prior


def _rel_err(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def tree_codebook(rng) -> Codebook:
    """3 users on 2 resources with a cycle-free factor graph: 0-(r0)-1-(r1)-2."""
    return _random_cb(rng, [(0,), (0, 1), (1,)], K=2)


@_timed
def check_tree_exact(seed: int = 0, slots: int = 200, tol: float = 1e-9) -> CheckResult:
    """Probability-domain MPA is exact on a tree after a diameter's worth of iterations."""
    rng = np.random.default_rng(seed)
    cb = tree_codebook(rng)
    fg = derive_factor_graph(cb)
    y, ch, prior = _random_instance(rng, cb, fg, slots, n0=0.5)
    diameter = 4  # user 0 to user 2 is four edges
    mpa = detect_prob(cb, fg, y, ch, prior=prior, T=diameter)
    ref = exact_map_oracle(cb, fg, y, ch, prior).marginals
    err = _rel_err(mpa, ref)
    return CheckResult("tree exactness", err <= tol, err, tol, 0.0, f"max relative error {err:.2e} <= {tol:g}")


@_timed
def check_domains(seed: int = 1, instances: int = 100, tol: float = 1e-6, cb: Codebook | None = None) -> CheckResult:
    """Log-domain and probability-domain MPA give the same normalised output."""
    rng = np.random.default_rng(seed)
    cb = cb or default_codebook()
    fg = derive_factor_graph(cb)
    worst = 0.0
    for i in range(instances):
        T = (1, 2, 4)[i % 3]
        n0 = es_n0_db_to_n0(rng.uniform(0.0, 12.0))
        y, ch, prior = _random_instance(rng, cb, fg, 1, n0)
        p = detect_prob(cb, fg, y, ch, prior=prior, T=T)
        post = detect_log(cb, fg, y, ch, prior=np.log(prior), T=T).posterior()
        worst = max(worst, _rel_err(post, p))
    return CheckResult("domain equivalence", worst <= tol, worst, tol, 0.0,
                       f"{instances} instances, T in {{1,2,4}}, max relative error {worst:.2e} <= {tol:g}")


def enumerate_factor_messages(cb, fg, y, ch, Lv) -> dict:
    """Resource-to-user log messages by direct enumeration.

    ``Lv[(k, p)]`` is the (S, M) message from user p into resource k. For
    each edge (k, j) and symbol x_j the M**(d_k - 1) terms are accumulated
    one by one with ``np.logaddexp``; the result is re-referenced to the
    all-zeros-label symbol of user j.
    """
    S = y.shape[0]
    ref = cb.reference
    out = {}
    for k, users in enumerate(fg.resource_neighbors):
        for j in users:
            others = [p for p in users if p != j]
            msg = np.full((S, cb.M), -np.inf)
            for xj in range(cb.M):
                for xs in product(range(cb.M), repeat=len(others)):
                    z = ch.h[:, k, j] * cb.codewords[j, xj, k]
                    term = np.zeros(S)
                    for p, xp in zip(others, xs):
                        z = z + ch.h[:, k, p] * cb.codewords[p, xp, k]
                        term = term + Lv[(k, p)][:, xp]
                    term = term - np.abs(y[:, k] - z) ** 2 / ch.n0
                    msg[:, xj] = np.logaddexp(msg[:, xj], term)
            out[(k, j)] = msg - msg[:, ref[j], None]
    return out


@_timed
def check_factor_messages(seed: int = 2, slots: int = 1000, tol: float = 1e-9) -> CheckResult:
    """One log-domain MPA iteration against the 16-term enumeration of every
    resource-to-user message. With zero initial messages the first user-to-resource
    messages equal the users' priors, which makes them known inputs."""
    rng = np.random.default_rng(seed)
    cb = default_codebook()
    fg = derive_factor_graph(cb)
    n0 = es_n0_db_to_n0(rng.uniform(0.0, 12.0))
    y, ch, _ = _random_instance(rng, cb, fg, slots, n0)
    Lp = rng.normal(scale=3.0, size=(slots, cb.J, cb.M))
    Lp -= Lp[:, np.arange(cb.J), cb.reference][..., None]
    res = detect_log(cb, fg, y, ch, prior=Lp, T=1)
    ref = enumerate_factor_messages(cb, fg, y, ch, {(k, p): Lp[:, p] for k, p in fg.edges()})
    err = max(float(np.abs(res.messages.U[e] - ref[e]).max()) for e in fg.edges())
    return CheckResult("per-factor enumeration", err <= tol, err, tol, 0.0,
                       f"{slots} inputs x {len(list(fg.edges()))} edges x {cb.M} symbols, max abs error {err:.2e} <= {tol:g}")


def symbol_pmf_from_bits(L, labels):
    """p(x) = prod_i p(b_i(x)) with p(b = 0) = 1 / (1 + e^-L); shape (..., M)."""
    p0 = (1.0 / (1.0 + np.exp(-L)))[..., None, :]  # (..., 1, nb)
    p1 = (1.0 / (1.0 + np.exp(L)))[..., None, :]
    p = np.where(labels == 0, p0, p1)
    return p.prod(axis=-1)


def bit_llr_from_symbol_pmf(p, labels):
    nb = labels.shape[-1]
    out = np.empty(p.shape[:-1] + (nb,))
    for i in range(nb):
        out[..., i] = np.log(p[..., labels[:, i] == 0].sum(axis=-1)) - np.log(p[..., labels[:, i] == 1].sum(axis=-1))
    return out


@_timed
def check_bridge(seed: int = 3, vectors: int = 10_000, tol: float = 1e-9) -> CheckResult:
    """Bit/symbol LLR conversions against probability-domain references for every
    labelling of M = 4 symbols, plus the prior/intrinsic identity."""
    rng = np.random.default_rng(seed)
    base = default_codebook()
    worst = 0.0
    split_exact = True
    nat = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)
    for order in permutations(range(4)):
        lab = nat[list(order)]
        cb = build_codebook(base.codewords, labels=np.repeat(lab[None], base.J, axis=0))
        L = rng.normal(scale=4.0, size=(vectors // 24 + 1, 2))
        # bits -> symbols
        sym = bits_to_symbol_llr(L, cb, j=0)
        p = symbol_pmf_from_bits(L, lab)
        ref = np.log(p) - np.log(p[:, cb.reference[0], None])
        worst = max(worst, float(np.abs(sym - ref).max()))
        # symbols -> bits, from an arbitrary symbol LLR vector
        Ls = rng.normal(scale=4.0, size=(L.shape[0], 4))
        q = np.exp(Ls - Ls.max(axis=1, keepdims=True))
        q /= q.sum(axis=1, keepdims=True)
        out = symbol_to_bit_llr(Ls, cb, j=0, bit_prior=L)
        worst = max(worst, float(np.abs(out.total - bit_llr_from_symbol_pmf(q, lab)).max()))
        split_exact &= bool(np.array_equal(out.total, out.prior + out.intrinsic))
        zero_prior = symbol_to_bit_llr(Ls, cb, j=0)
        worst = max(worst, float(np.abs(out.intrinsic - (zero_prior.total - L)).max()))
        # round trip through a pass-through detector
        back = symbol_to_bit_llr(bits_to_symbol_llr(L, cb, j=0), cb, j=0)
        worst = max(worst, float(np.abs(back.total - L).max()))
    ok = worst <= tol and split_exact
    return CheckResult("LLR bridge identities", ok, worst, tol, 0.0,
                       f"24 labellings, max abs error {worst:.2e} <= {tol:g}, split exact: {split_exact}")


@dataclass
class SerComparison:
    ser_mpa: float
    ser_map: float
    half_width: float
    symbols: int


def uncoded_ser(cb: Codebook, es_n0_db: float, slots: int = 10_000, T: int = 6, seed: int = 4,
                chunk: int = 500) -> SerComparison:
    """Uncoded symbol error rates of MPA and exact per-user MAP on the same AWGN symbols."""
    fg = derive_factor_graph(cb)
    rng = np.random.default_rng(seed)
    n0 = es_n0_db_to_n0(es_n0_db)
    err_mpa = err_map = 0
    for lo in range(0, slots, chunk):
        S = min(chunk, slots - lo)
        sym = rng.integers(0, cb.M, size=(S, cb.J))
        ch = draw_channel("awgn", cb.K, cb.J, fg, rng, n0=n0, n_slots=S)
        y = transmit(cb, fg, sym, ch, rng)
        err_mpa += int((detect_log(cb, fg, y, ch, T=T).decisions() != sym).sum())
        err_map += int((exact_map_oracle(cb, fg, y, ch).decisions() != sym).sum())
    n = slots * cb.J
    p = err_map / n
    return SerComparison(err_mpa / n, p, 1.96 * np.sqrt(p * (1 - p) / n), n)


@_timed
def check_uncoded_ser(es_n0_db: float = 11.0, slots: int = 10_000, T: int = 6, seed: int = 4) -> CheckResult:
    """MPA SER lies within the 95% interval of the MAP SER and is not below it."""
    r = uncoded_ser(default_codebook(), es_n0_db, slots, T, seed)
    gap = r.ser_mpa - r.ser_map
    ok = 0.0 <= gap <= r.half_width
    return CheckResult("uncoded SER vs MAP", ok, gap, r.half_width, 0.0,
                       f"{r.symbols} symbols at {es_n0_db:g} dB: MPA {r.ser_mpa:.5f}, MAP {r.ser_map:.5f}, "
                       f"gap {gap:.5f} in [0, {r.half_width:.5f}]")


ALL_CHECKS = (check_tree_exact, check_domains, check_factor_messages, check_bridge, check_uncoded_ser)
