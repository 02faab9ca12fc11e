"""SCMA codebooks, factor-graph topology and the bit -> codeword mapper.

Codebook files are JSON documents::

    {
      "J": 6, "K": 4, "M": 4, "N": 2,
      "users": [
        {"support": [1, 2],
         "codewords": [[[re, im], ...K pairs], ...M rows],
         "labels": [[0, 0], [0, 1], [1, 0], [1, 1]]},
        ...
      ]
    }

``support`` uses 1-based resource indices. ``N`` is either one integer
(every user occupies N resources) or a list of J integers. Unknown keys are
rejected at every level. See ``docs/file_formats.md`` for the full schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

ENERGY_TOL = 1e-9
ZERO_TOL = 1e-12

_TOP_KEYS = {"J", "K", "M", "N", "users", "comment"}
_USER_KEYS = {"support", "codewords", "labels"}


class CodebookError(ValueError):
    """Raised for malformed or inconsistent codebook content."""


@dataclass(frozen=True)
class Codebook:
    J: int
    K: int
    M: int
    codewords: np.ndarray  # (J, M, K) complex
    labels: np.ndarray  # (J, M, log2 M) uint8, first bit is the first interleaved bit
    supports: tuple[tuple[int, ...], ...]  # 0-based, ascending

    @property
    def bits_per_symbol(self) -> int:
        return int(self.M).bit_length() - 1

    @property
    def reference(self) -> np.ndarray:
        """Index of the all-zeros-label codeword for every user."""
        return np.array([int(np.flatnonzero(~self.labels[j].any(axis=1))[0])
                         for j in range(self.J)])

    @property
    def label_values(self) -> np.ndarray:
        """(J, M) integer value of each codeword's label, first bit as MSB."""
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return (self.labels.astype(np.int64) * weights).sum(axis=-1)

    @property
    def index_of_label(self) -> np.ndarray:
        """(J, M) inverse of :attr:`label_values`."""
        inv = np.empty((self.J, self.M), dtype=np.int64)
        for j in range(self.J):
            inv[j, self.label_values[j]] = np.arange(self.M)
        return inv

    def energy(self) -> np.ndarray:
        return (np.abs(self.codewords) ** 2).sum(axis=-1).mean(axis=-1)


@dataclass(frozen=True)
class FactorGraph:
    indicator: np.ndarray  # (K, J) uint8
    user_neighbors: tuple[tuple[int, ...], ...]
    resource_neighbors: tuple[tuple[int, ...], ...]

    @property
    def K(self) -> int:
        return self.indicator.shape[0]

    @property
    def J(self) -> int:
        return self.indicator.shape[1]

    @property
    def is_regular(self) -> bool:
        col = self.indicator.sum(axis=0)
        row = self.indicator.sum(axis=1)
        return bool((col == col[0]).all() and (row == row[0]).all())

    @property
    def d_j(self) -> int:
        if not self.is_regular:
            raise ValueError("irregular factor graph has no single user degree")
        return int(self.indicator[:, 0].sum())

    @property
    def d_k(self) -> int:
        if not self.is_regular:
            raise ValueError("irregular factor graph has no single resource degree")
        return int(self.indicator[0].sum())

    def others(self, k: int, j: int) -> tuple[int, ...]:
        """Users on resource ``k`` except ``j``."""
        return tuple(p for p in self.resource_neighbors[k] if p != j)

    def edges(self):
        """(k, j) pairs in resource-major order."""
        for k, users in enumerate(self.resource_neighbors):
            for j in users:
                yield k, j


def natural_labels(M: int) -> np.ndarray:
    nbits = M.bit_length() - 1
    m = np.arange(M)[:, None]
    return ((m >> np.arange(nbits - 1, -1, -1)) & 1).astype(np.uint8)


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise CodebookError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise CodebookError(f"{where}: unknown field(s) {sorted(extra)}")


def build_codebook(codewords, labels=None, supports=None) -> Codebook:
    """Validate raw arrays and wrap them in a :class:`Codebook`.

    ``supports`` (0-based) is optional; when given it must agree with the
    nonzero pattern of every codeword.
    """
    cw = np.asarray(codewords, dtype=complex)
    if cw.ndim != 3:
        raise CodebookError("codewords must have shape (J, M, K)")
    J, M, K = cw.shape
    if not _is_pow2(M) or M < 2:
        raise CodebookError(f"M={M} is not a power of two >= 2")
    nbits = M.bit_length() - 1
    lab = natural_labels(M)[None].repeat(J, axis=0) if labels is None else np.asarray(labels)
    if lab.shape != (J, M, nbits) or not np.isin(lab, (0, 1)).all():
        raise CodebookError(f"labels must be 0/1 with shape {(J, M, nbits)}")
    lab = lab.astype(np.uint8)

    found = []
    for j in range(J):
        nz = np.abs(cw[j]) > ZERO_TOL
        pattern = nz[0]
        if not (nz == pattern).all():
            bad = int(np.flatnonzero((nz != pattern).any(axis=1))[0])
            raise CodebookError(f"user {j + 1}: codeword {bad} has a different support")
        if not pattern.any():
            raise CodebookError(f"user {j + 1}: empty support")
        found.append(tuple(int(k) for k in np.flatnonzero(pattern)))
        vals = (lab[j].astype(np.int64) << np.arange(nbits - 1, -1, -1)).sum(axis=1)
        if len(set(vals.tolist())) != M:
            raise CodebookError(f"user {j + 1}: bit labels are not a bijection")
    if supports is not None:
        for j, (s, f) in enumerate(zip(supports, found)):
            if tuple(sorted(s)) != f:
                raise CodebookError(f"user {j + 1}: declared support {list(s)} != nonzero pattern {list(f)}")

    cb = Codebook(J=J, K=K, M=M, codewords=cw, labels=lab, supports=tuple(found))
    energy = cb.energy()
    if np.abs(energy - 1.0).max() > ENERGY_TOL:
        raise CodebookError(f"average energy per user must be 1, got {energy.tolist()}")
    cb.codewords.setflags(write=False)
    cb.labels.setflags(write=False)
    return cb


def parse_codebook(doc: dict) -> Codebook:
    _check_keys(doc, _TOP_KEYS, "codebook")
    try:
        J, K, M = int(doc["J"]), int(doc["K"]), int(doc["M"])
        users = doc["users"]
    except KeyError as e:
        raise CodebookError(f"codebook: missing field {e}") from None
    if not _is_pow2(M) or M < 2:
        raise CodebookError(f"M={M} is not a power of two >= 2")
    if not isinstance(users, list) or len(users) != J:
        raise CodebookError(f"expected {J} user entries")
    N = doc.get("N")
    if N is not None:
        N = [int(N)] * J if isinstance(N, int) else [int(n) for n in N]
        if len(N) != J:
            raise CodebookError("N must be an integer or a list of J integers")

    cw = np.zeros((J, M, K), dtype=complex)
    labels = np.zeros((J, M, M.bit_length() - 1), dtype=np.int64)
    supports = []
    for j, u in enumerate(users):
        where = f"user {j + 1}"
        _check_keys(u, _USER_KEYS, where)
        try:
            support = [int(k) - 1 for k in u["support"]]
            rows = np.asarray(u["codewords"], dtype=float)
            lab = np.asarray(u["labels"], dtype=np.int64)
        except KeyError as e:
            raise CodebookError(f"{where}: missing field {e}") from None
        except (TypeError, ValueError) as e:
            raise CodebookError(f"{where}: {e}") from None
        if any(k < 0 or k >= K for k in support):
            raise CodebookError(f"{where}: support index out of range 1..{K}")
        if N is not None and len(support) != N[j]:
            raise CodebookError(f"{where}: support size {len(support)} != N={N[j]}")
        if rows.shape != (M, K, 2):
            raise CodebookError(f"{where}: codewords must be {M} rows of {K} (re, im) pairs")
        if lab.shape != labels.shape[1:]:
            raise CodebookError(f"{where}: labels must be {M} rows of {labels.shape[2]} bits")
        cw[j] = rows[..., 0] + 1j * rows[..., 1]
        labels[j] = lab
        supports.append(support)
    return build_codebook(cw, labels, supports)


def load_codebook(source) -> Codebook:
    """Load a codebook from a path, a JSON string or an already-parsed dict."""
    if isinstance(source, dict):
        return parse_codebook(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        source = Path(source).read_text()
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as e:
        raise CodebookError(f"not valid JSON: {e}") from None
    return parse_codebook(doc)


def dump_codebook(cb: Codebook, comment: str | None = None) -> str:
    users = []
    for j in range(cb.J):
        users.append({
            "support": [k + 1 for k in cb.supports[j]],
            "codewords": [[[float(z.real), float(z.imag)] for z in row] for row in cb.codewords[j]],
            "labels": cb.labels[j].tolist(),
        })
    doc = {"J": cb.J, "K": cb.K, "M": cb.M, "N": [len(s) for s in cb.supports], "users": users}
    if comment:
        doc = {"comment": comment, **doc}
    return json.dumps(doc, indent=1)


def default_codebook() -> Codebook:
    """The bundled J=6, K=4, M=4 codebook."""
    text = resources.files("scmaidd.data").joinpath("codebook_6x4_m4.json").read_text()
    return load_codebook(text)


def derive_factor_graph(cb: Codebook) -> FactorGraph:
    C = np.zeros((cb.K, cb.J), dtype=np.uint8)
    for j, sup in enumerate(cb.supports):
        C[list(sup), j] = 1
    C.setflags(write=False)
    user_nb = tuple(tuple(int(k) for k in np.flatnonzero(C[:, j])) for j in range(cb.J))
    res_nb = tuple(tuple(int(j) for j in np.flatnonzero(C[k])) for k in range(cb.K))
    return FactorGraph(indicator=C, user_neighbors=user_nb, resource_neighbors=res_nb)


def map_bits(cb: Codebook, j: int, bits) -> np.ndarray:
    """Codeword of user ``j`` carrying ``bits`` (length log2 M)."""
    b = np.asarray(bits).ravel()
    if b.size != cb.bits_per_symbol:
        raise ValueError(f"expected {cb.bits_per_symbol} bits, got {b.size}")
    value = int((b.astype(np.int64) << np.arange(b.size - 1, -1, -1)).sum())
    return cb.codewords[j, cb.index_of_label[j, value]]


def bits_to_indices(cb: Codebook, bits: np.ndarray) -> np.ndarray:
    """Vectorised mapper: (J, S * log2 M) bits -> (J, S) codeword indices."""
    nb = cb.bits_per_symbol
    b = np.asarray(bits, dtype=np.int64)
    J, n = b.shape
    if n % nb:
        raise ValueError(f"bit count {n} is not a multiple of {nb}")
    vals = (b.reshape(J, n // nb, nb) << np.arange(nb - 1, -1, -1)).sum(axis=-1)
    return np.take_along_axis(cb.index_of_label, vals, axis=1)


def indices_to_bits(cb: Codebook, idx: np.ndarray) -> np.ndarray:
    """Inverse of :func:`bits_to_indices`."""
    idx = np.asarray(idx)
    J, S = idx.shape
    out = np.stack([cb.labels[j][idx[j]] for j in range(J)])
    return out.reshape(J, S * cb.bits_per_symbol)


def make_default_codebook(ratio: float = 2.0) -> Codebook:
    """Rebuild the bundled codebook from its generating rule.

    The mother constellation is a 4-point real pair per symbol: the values
    (a, -b, b, -a) on the first occupied resource and (-b, -a, a, b) on the
    second, with a / b = ``ratio``. It is spread over the supports of the
    regular 4x6 indicator matrix with per-edge phase rotations from
    {0, pi/3, 2 pi/3}, chosen so the three users sharing a resource are
    mutually rotated, and scaled to unit average energy per user.
    """
    C = np.array([[1, 1, 1, 0, 0, 0],
                  [1, 0, 0, 1, 1, 0],
                  [0, 1, 0, 1, 0, 1],
                  [0, 0, 1, 0, 1, 1]])
    rot = np.array([[0, 1, 2, 0, 0, 0],
                    [1, 0, 0, 2, 0, 0],
                    [0, 2, 0, 0, 0, 1],
                    [0, 0, 0, 0, 1, 2]]) * (np.pi / 3)
    b = 1.0 / np.sqrt(1.0 + ratio ** 2)
    a = ratio * b
    mother = np.stack([np.array([a, -b, b, -a]), np.array([-b, -a, a, b])], axis=1)  # (M, 2)
    J, K, M = 6, 4, 4
    cw = np.zeros((J, M, K), dtype=complex)
    for j in range(J):
        for d, k in enumerate(np.flatnonzero(C[:, j])):
            cw[j, :, k] = mother[:, d] * np.exp(1j * rot[k, j])
    cw /= np.sqrt((np.abs(cw) ** 2).sum(axis=-1).mean(axis=-1))[:, None, None]
    return build_codebook(cw)
