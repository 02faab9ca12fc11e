"""Progressive edge-growth construction of (dv, dc)-regular codes.

Used offline to produce the bundled alist files. Each new edge of a bit
goes to a lowest-degree check among those farthest from the bit in the
current graph (or unreachable from it); check degrees are capped at dc, so
the result is exactly regular when n * dv == m * dc.
"""
from __future__ import annotations

import numpy as np

from .matrix import ParityCheckMatrix


def peg_regular(n_bits: int, dv: int = 3, dc: int = 6, seed: int = 0) -> ParityCheckMatrix:
    if (n_bits * dv) % dc:
        raise ValueError("n_bits * dv must be divisible by dc")
    m = n_bits * dv // dc
    rng = np.random.default_rng(seed)
    var_adj = np.full((n_bits, dv), -1, dtype=np.int64)
    chk_adj = np.full((m, dc), -1, dtype=np.int64)
    deg = np.zeros(m, dtype=np.int64)
    # random tie-breaking among equal-degree candidates
    tiebreak = rng.random(m)

    def pick(cands):
        d = deg[cands]
        best = cands[d == d.min()]
        return int(best[np.argmin(tiebreak[best])])

    for v in range(n_bits):
        for e in range(dv):
            open_ = deg < dc
            open_[var_adj[v, :e]] = False
            if e == 0:
                c = pick(np.flatnonzero(open_))
            else:
                seen_c = np.zeros(m, dtype=bool)
                seen_v = np.zeros(n_bits, dtype=bool)
                seen_v[v] = True
                front = var_adj[v, :e]
                seen_c[front] = True
                layers = [front]
                while True:
                    vs = chk_adj[front].ravel()
                    vs = np.unique(vs[vs >= 0])
                    vs = vs[~seen_v[vs]]
                    seen_v[vs] = True
                    cs = var_adj[vs].ravel()
                    cs = np.unique(cs[cs >= 0])
                    cs = cs[~seen_c[cs]]
                    if cs.size == 0:
                        cand = np.flatnonzero(~seen_c & open_)
                        break
                    nxt = seen_c.copy()
                    nxt[cs] = True
                    if not (~nxt & open_).any():
                        cand = np.flatnonzero(~seen_c & open_)
                        break
                    seen_c, front = nxt, cs
                    layers.append(cs)
                # every open check is reachable: take the farthest layer that has one
                for layer in reversed(layers):
                    if cand.size:
                        break
                    cand = layer[open_[layer]]
                if cand.size == 0:
                    cand = np.flatnonzero(open_)
                c = pick(cand)
            var_adj[v, e] = c
            chk_adj[c, deg[c]] = v
            deg[c] += 1
    return ParityCheckMatrix.from_check_lists(n_bits, [row[row >= 0] for row in chk_adj])


def girth(pcm: ParityCheckMatrix, max_len: int = 12) -> int:
    """Shortest cycle length (bipartite, so even), or 0 if none up to ``max_len``."""
    best = 0
    var = pcm.var_neighbors
    chk = pcm.check_neighbors
    for root in range(pcm.n_bits):
        # BFS on the bipartite graph from a bit node; nodes are ('v', i) / ('c', m)
        dist = {("v", root): 0}
        parent = {("v", root): None}
        frontier = [("v", root)]
        d = 0
        while frontier and 2 * d < max_len:
            nxt = []
            for node in frontier:
                kind, idx = node
                nbrs = [("c", c) for c in var[idx]] if kind == "v" else [("v", i) for i in chk[idx]]
                for nb in nbrs:
                    if nb == parent[node]:
                        continue
                    if nb in dist:
                        cyc = dist[node] + dist[nb] + 1
                        if best == 0 or cyc < best:
                            best = cyc
                    else:
                        dist[nb] = dist[node] + 1
                        parent[nb] = node
                        nxt.append(nb)
            frontier = nxt
            d += 1
        if best == 4:
            break
    return best
