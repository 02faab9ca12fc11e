"""MPA multiuser detection on the SCMA factor graph.

All routines are vectorised over S slots. Shapes used throughout:

    y       (S, K) complex received samples
    h       (S, K, J) complex gains (perfect CSI)
    prior   (S, J, M) symbol pmf (probability domain) or symbol LLR (log domain)

Log-domain symbol LLRs are referenced to the codeword whose bit label is all
zeros, so that entry is exactly 0 in every message and every output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .channel import ChannelRealization
from .codebook import Codebook, FactorGraph
from .ops import OpCounters, logsumexp

ORACLE_MAX_COMBOS = 2 ** 20


@dataclass
class MessageStore:
    """Per-edge tables of length M, keyed by (k, j)."""
    V: dict = field(default_factory=dict)  # user -> resource
    U: dict = field(default_factory=dict)  # resource -> user
    domain: str = "log"


@dataclass
class SymbolLlr:
    """Per-user symbol LLRs with the intrinsic/prior split kept explicit."""
    total: np.ndarray
    intrinsic: np.ndarray
    prior: np.ndarray
    messages: MessageStore | None = None

    def posterior(self) -> np.ndarray:
        z = self.total - self.total.max(axis=-1, keepdims=True)
        p = np.exp(z)
        return p / p.sum(axis=-1, keepdims=True)

    def decisions(self) -> np.ndarray:
        return self.total.argmax(axis=-1)


def _as_slots(y, h):
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    single = y.ndim == 1
    if single:
        y, h = y[None], h[None]
    if h.shape[:2] != y.shape or h.ndim != 3:
        raise ValueError(f"gain shape {h.shape} does not match received shape {y.shape}")
    return y, h, single


def _faded(cb: Codebook, fg: FactorGraph, h: np.ndarray, counter: OpCounters | None):
    """Per resource k: (S, M, ..., M) superposition over all symbol choices of dk.

    Axis a + 1 of the tensor indexes the symbol of user ``fg.resource_neighbors[k][a]``.
    """
    S = h.shape[0]
    sums = []
    for k, users in enumerate(fg.resource_neighbors):
        d = len(users)
        z = np.zeros((S,) + (cb.M,) * d, dtype=complex)
        for a, p in enumerate(users):
            shape = [S] + [1] * d
            shape[a + 1] = cb.M
            z = z + (h[:, k, p, None] * cb.codewords[p, :, k][None, :]).reshape(shape)
        if counter is not None:
            counter.add(mul=4 * S * d * cb.M)
        sums.append(z)
    return sums


def _metric(y_k, z, n0, counter):
    """-|y_k - z|^2 / N0 over every combination in ``z``."""
    diff = y_k.reshape((-1,) + (1,) * (z.ndim - 1)) - z
    if counter is not None:
        counter.add(mul=2 * z.size, div=z.size)
    return -(diff.real ** 2 + diff.imag ** 2) / n0


def _check_T(T, allow_zero=False):
    if int(T) != T or T < (0 if allow_zero else 1):
        raise ValueError(f"iteration count must be >= {0 if allow_zero else 1}, got {T}")


def detect_prob(cb: Codebook, fg: FactorGraph, y, ch: ChannelRealization, prior=None, T: int = 1):
    """Probability-domain MPA.

    Returns the per-user scores p(x_j) * prod_{s in dj} U_{s->j}(x_j) after
    T iterations, normalised to sum to one (shape (S, J, M), or (J, M) for a
    single slot). V messages are renormalised after every update; a
    per-slot constant is taken out of the Gaussian kernel. Neither changes
    the normalised output.
    """
    _check_T(T)
    y, h, single = _as_slots(y, ch.h)
    S, M = y.shape[0], cb.M
    if prior is None:
        p = np.full((S, cb.J, M), 1.0 / M)
    else:
        p = np.broadcast_to(np.asarray(prior, dtype=float), (S, cb.J, M))
    sums = _faded(cb, fg, h, None)
    U = {(k, j): np.ones((S, M)) for k, j in fg.edges()}
    for _ in range(T):
        V = {}
        for k, j in fg.edges():
            v = p[:, j].copy()
            for s in fg.user_neighbors[j]:
                if s != k:
                    v = v * U[(s, j)]
            V[(k, j)] = v / v.sum(axis=1, keepdims=True)
        newU = {}
        for k, users in enumerate(fg.resource_neighbors):
            d = len(users)
            met = _metric(y[:, k], sums[k], ch.n0, None)
            met = met - met.reshape(S, -1).max(axis=1).reshape((S,) + (1,) * d)
            kern = np.exp(met)
            for a, j in enumerate(users):
                w = kern
                for b, q in enumerate(users):
                    if b != a:
                        shape = [S] + [1] * d
                        shape[b + 1] = M
                        w = w * V[(k, q)].reshape(shape)
                axes = tuple(b + 1 for b in range(d) if b != a)
                u = w.sum(axis=axes) if axes else w
                newU[(k, j)] = u / u.sum(axis=1, keepdims=True)
        U = newU
    out = p.copy()
    for k, j in fg.edges():
        out[:, j] = out[:, j] * U[(k, j)]
    out = out / out.sum(axis=-1, keepdims=True)
    return out[0] if single else out


def detect_log(cb: Codebook, fg: FactorGraph, y, ch: ChannelRealization, prior=None, T: int = 1,
               counter: OpCounters | None = None, max_log: bool = False,
               init: MessageStore | None = None) -> SymbolLlr:
    """Log-domain MPA with an explicit intrinsic/prior split of the output.

    LV_{j->k} = prior_j + sum_{s in dj \\ k} LU_{s->j}
    LU_{k->j}(x_j) = LSE_{(x_p), p in dk \\ j} [f_k + sum_p LV_{p->k}(x_p)], re-referenced
    total = prior + intrinsic,  intrinsic = sum_{s in dj} LU_{s->j}

    ``T = 0`` is allowed and passes the prior straight through. ``init``
    seeds the LU messages (otherwise all zero). ``max_log`` keeps only the
    largest term of each log-sum-exp.
    """
    _check_T(T, allow_zero=True)
    y, h, single = _as_slots(y, ch.h)
    S, M = y.shape[0], cb.M
    ref = cb.reference
    if prior is None:
        Lp = np.zeros((S, cb.J, M))
    else:
        Lp = np.array(np.broadcast_to(np.asarray(prior, dtype=float), (S, cb.J, M)))
        Lp -= Lp[:, np.arange(cb.J), ref][..., None]
    if init is not None:
        LU = {e: np.broadcast_to(init.U[e], (S, M)).copy() for e in fg.edges()}
    else:
        LU = {e: np.zeros((S, M)) for e in fg.edges()}
    LV = {}
    sums = _faded(cb, fg, h, counter) if T > 0 else None
    for _ in range(T):
        LV = {}
        for k, j in fg.edges():
            v = Lp[:, j].copy()
            for s in fg.user_neighbors[j]:
                if s != k:
                    v += LU[(s, j)]
            LV[(k, j)] = v
        newLU = {}
        for k, users in enumerate(fg.resource_neighbors):
            d = len(users)
            for a, j in enumerate(users):
                arg = _metric(y[:, k], sums[k], ch.n0, counter)
                for b, q in enumerate(users):
                    if b != a:
                        shape = [S] + [1] * d
                        shape[b + 1] = M
                        arg = arg + LV[(k, q)].reshape(shape)
                arg = np.moveaxis(arg, a + 1, -1).reshape(S, -1, M)
                lu = logsumexp(arg, axis=1, counter=counter, max_log=max_log)
                newLU[(k, j)] = lu - lu[:, ref[j], None]
        LU = newLU
    intrinsic = np.zeros((S, cb.J, M))
    for k, j in fg.edges():
        intrinsic[:, j] += LU[(k, j)]
    total = Lp + intrinsic
    store = MessageStore(V=LV, U=LU, domain="log")
    if single:
        return SymbolLlr(total[0], intrinsic[0], Lp[0], store)
    return SymbolLlr(total, intrinsic, Lp, store)


@dataclass
class OracleResult:
    marginals: np.ndarray  # (S, J, M) exact posterior pmfs
    joint_map: np.ndarray  # (S, J) symbol indices maximising the joint posterior

    def decisions(self) -> np.ndarray:
        """Per-user marginal MAP decisions."""
        return self.marginals.argmax(axis=-1)


def exact_map_oracle(cb: Codebook, fg: FactorGraph, y, ch: ChannelRealization, prior=None,
                     chunk: int = 256) -> OracleResult:
    """Brute-force posterior over all M**J symbol matrices."""
    n_combo = cb.M ** cb.J
    if n_combo > ORACLE_MAX_COMBOS:
        raise ValueError(f"M**J = {n_combo} exceeds the enumeration limit {ORACLE_MAX_COMBOS}")
    y, h, single = _as_slots(y, ch.h)
    S, J, M, K = y.shape[0], cb.J, cb.M, cb.K
    combos = np.array(list(product(range(M), repeat=J)))  # (n_combo, J), user 0 slowest
    X = cb.codewords[np.arange(J), combos] * fg.indicator.T[None]  # (n_combo, J, K)
    if prior is None:
        logp = np.zeros((S, J, M))
    else:
        with np.errstate(divide="ignore"):
            logp = np.log(np.broadcast_to(np.asarray(prior, dtype=float), (S, J, M)))
    marg = np.empty((S, J, M))
    joint = np.empty((S, J), dtype=np.int64)
    for lo in range(0, S, chunk):
        sl = slice(lo, lo + chunk)
        z = np.einsum("skj,cjk->sck", h[sl], X)
        d = y[sl, None, :] - z
        lf = -(np.abs(d) ** 2).sum(axis=-1) / ch.n0
        lf = lf + logp[sl][:, np.arange(J), combos].sum(axis=-1)
        joint[sl] = combos[lf.argmax(axis=1)]
        t = lf.reshape((-1,) + (M,) * J)
        for j in range(J):
            axes = tuple(a + 1 for a in range(J) if a != j)
            lm = logsumexp(t, axis=axes) if axes else t
            lm = lm - lm.max(axis=-1, keepdims=True)
            pm = np.exp(lm)
            marg[sl, j] = pm / pm.sum(axis=-1, keepdims=True)
    if single:
        return OracleResult(marg[0], joint[0])
    return OracleResult(marg, joint)
