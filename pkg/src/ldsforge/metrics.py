"""Figures of merit for a superimposed-codeword set.

Everything here works on the full enumeration of the M^J sums of per-user
codewords.  The key quantities, evaluated by exhaustive pair scans:

* product distance squared of a pair: product of |x_k - y_k|^2 over the
  coordinates where the two vectors differ,
* its set-wide minimum (MPDS) with the minimizing pair,
* diversity order: the fewest differing coordinates over any pair,
* kissing number: how many pairs sit at the minimum,
* a fading-channel pairwise error bound and the bit-weighted union bound
  built from it.

Scans are cut into fixed row blocks and reduced in block order, so results
are identical for any worker count.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .codebook import CodebookSet
from .errors import EnumerationCapError, ValidationError
from .parallel import map_tasks

#: default limit on M^J enumeration size
DEFAULT_CAP = 2 ** 20

#: absolute threshold on |x_k - y_k| below which coordinates count as equal
DEFAULT_EPS = 1e-9

#: pairs within this relative distance of the minimum count as kissing
KISSING_RTOL = 1e-9

_ROW_BLOCK = 128  # fixed scan granularity, independent of worker count


@dataclass(eq=False)
class SuperimposedSet:
    """All M^J superimposed codewords, in lexicographic message-tuple order."""

    messages: np.ndarray  # (N, J) symbol indices
    vectors: np.ndarray   # (N, K) complex sums
    K: int
    J: int
    M: int

    def __len__(self) -> int:
        return self.vectors.shape[0]


@dataclass
class MetricsReport:
    """Distance figures of one superimposed set.

    mpds is zero exactly when the message-to-vector map is not injective;
    in that case diversity_order is zero, kissing_number counts the
    coincident pairs, and minimizing_pair names the first of them.
    """

    mpds: float
    diversity_order: int
    kissing_number: int
    injective: bool
    minimizing_pair: Tuple[Tuple[int, ...], Tuple[int, ...]]

    def to_json_dict(self) -> dict:
        return {
            "mpds": self.mpds,
            "diversity_order": self.diversity_order,
            "kissing_number": self.kissing_number,
            "injective": self.injective,
            "minimizing_pair": [list(self.minimizing_pair[0]), list(self.minimizing_pair[1])],
        }


def message_tuples(J: int, M: int) -> np.ndarray:
    """(M^J, J) array of symbol indices in lexicographic order, user 0 slowest."""
    n = M ** J
    idx = np.arange(n)
    out = np.empty((n, J), dtype=np.int64)
    for j in range(J):
        out[:, j] = (idx // M ** (J - 1 - j)) % M
    return out


def enumerate_superimposed(books: CodebookSet, cap: int = DEFAULT_CAP) -> SuperimposedSet:
    """Sum the per-user codewords for every message tuple.

    Refuses to enumerate more than `cap` tuples.
    """
    K, J, M = books.K, books.J, books.M
    n = M ** J
    if n > cap:
        raise EnumerationCapError(
            f"superimposed set has M^J = {n} entries, exceeding cap {cap}"
        )
    msgs = message_tuples(J, M)
    vectors = np.zeros((n, K), dtype=complex)
    for j in range(J):
        vectors += books.books[j][:, msgs[:, j]].T
    return SuperimposedSet(messages=msgs, vectors=vectors, K=K, J=J, M=M)


def product_distance_sq(x, y, eps: float = DEFAULT_EPS) -> Tuple[float, int]:
    """Product of squared coordinate distances over differing coordinates.

    Returns (value, diversity) where diversity counts coordinates with
    |x_k - y_k| > eps.  Equal vectors give the empty product (1.0, 0);
    callers treat diversity 0 as degenerate.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape} vs {y.shape}")
    if eps <= 0:
        raise ValidationError("eps must be positive")
    d = x - y
    mag2 = d.real ** 2 + d.imag ** 2
    mask = mag2 > eps * eps
    value = float(np.prod(mag2[mask])) if mask.any() else 1.0
    return value, int(mask.sum())


def _pair_blocks(n: int) -> List[Tuple[int, int]]:
    return [(a, min(a + _ROW_BLOCK, n - 1)) for a in range(0, n - 1, _ROW_BLOCK)]


def _block_geometry(vectors, a, b, eps):
    """Products and diversities for pairs (i, j) with a <= i < b, j > i."""
    rows = vectors[a:b, None, :]
    cols = vectors[None, a + 1:, :]
    d = rows - cols
    mag2 = d.real ** 2 + d.imag ** 2
    differs = mag2 > eps * eps
    div = differs.sum(axis=2)
    prod = np.where(differs, mag2, 1.0).prod(axis=2)
    # columns start at global index a+1; pair validity is col >= row offset
    valid = np.arange(cols.shape[1])[None, :] >= np.arange(rows.shape[0])[:, None]
    return prod, div, valid


def _scan_min_task(args):
    vectors, a, b, eps = args
    prod, div, valid = _block_geometry(vectors, a, b, eps)
    prod = np.where(valid, prod, np.inf)
    flat = int(np.argmin(prod))
    r, c = divmod(flat, prod.shape[1])
    best = float(prod[r, c])
    best_pair = (a + r, a + 1 + c)
    div_masked = np.where(valid, div, np.iinfo(np.int64).max)
    min_div = int(div_masked.min())
    coincident = div_masked == 0
    n_coincident = int(coincident.sum())
    first_coincident = None
    if n_coincident:
        flat = int(np.argmax(coincident))
        r, c = divmod(flat, prod.shape[1])
        first_coincident = (a + r, a + 1 + c)
    return best, best_pair, min_div, n_coincident, first_coincident


def _count_at_min_task(args):
    vectors, a, b, eps, threshold = args
    prod, div, valid = _block_geometry(vectors, a, b, eps)
    return int(np.count_nonzero((prod <= threshold) & valid))


def mpds(sset: SuperimposedSet, eps: float = DEFAULT_EPS, workers: int = 1) -> MetricsReport:
    """Exhaustive minimum-product-distance report over all unordered pairs."""
    n = len(sset)
    if n < 2:
        raise ValidationError("need at least two superimposed codewords")
    blocks = _pair_blocks(n)
    results = map_tasks(
        _scan_min_task, [(sset.vectors, a, b, eps) for a, b in blocks], workers
    )
    best = math.inf
    best_pair = (0, 0)
    min_div = np.iinfo(np.int64).max
    n_coincident = 0
    first_coincident = None
    for val, pair, mdiv, ncoin, first in results:  # block order fixes tie-breaks
        if val < best:
            best, best_pair = val, pair
        min_div = min(min_div, mdiv)
        n_coincident += ncoin
        if first_coincident is None and first is not None:
            first_coincident = first
    injective = n_coincident == 0
    if injective:
        threshold = best * (1.0 + KISSING_RTOL)
        counts = map_tasks(
            _count_at_min_task,
            [(sset.vectors, a, b, eps, threshold) for a, b in blocks],
            workers,
        )
        kissing = int(sum(counts))
        value = best
        pair = best_pair
    else:
        kissing = n_coincident
        value = 0.0
        pair = first_coincident
        min_div = 0
    tuples = (tuple(int(x) for x in sset.messages[pair[0]]),
              tuple(int(x) for x in sset.messages[pair[1]]))
    return MetricsReport(
        mpds=value,
        diversity_order=int(min_div),
        kissing_number=kissing,
        injective=injective,
        minimizing_pair=tuples,
    )


def min_product_distance(sset: SuperimposedSet, eps: float = DEFAULT_EPS,
                         workers: int = 1) -> float:
    """The MPDS value alone (zero when not injective); skips kissing counting."""
    n = len(sset)
    if n < 2:
        raise ValidationError("need at least two superimposed codewords")
    results = map_tasks(
        _scan_min_task,
        [(sset.vectors, a, b, eps) for a, b in _pair_blocks(n)],
        workers,
    )
    if any(r[3] for r in results):
        return 0.0
    return min(r[0] for r in results)


def pep_bound(x, y, N0: float, eps: float = DEFAULT_EPS) -> float:
    """Fading-channel pairwise error bound for confusing x with y.

    Half the product, over differing coordinates, of 1 / (1 + |x_k - y_k|^2
    / (8 N0)).  Symmetric in its arguments and always in (0, 1/2).
    """
    if N0 <= 0:
        raise ValidationError("N0 must be positive")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape} vs {y.shape}")
    d = x - y
    mag2 = d.real ** 2 + d.imag ** 2
    mask = mag2 > eps * eps
    if not mask.any():
        raise ValidationError("pairwise error bound is undefined for equal vectors")
    return float(0.5 * np.prod(1.0 / (1.0 + mag2[mask] / (8.0 * N0))))


def hamming_bits(m1, m2, labels) -> int:
    """Differing information bits between two message tuples under one labeling."""
    m1 = tuple(m1)
    m2 = tuple(m2)
    if len(m1) != len(m2):
        raise ValidationError(f"tuple lengths differ: {len(m1)} vs {len(m2)}")
    return sum(
        a != b
        for s1, s2 in zip(m1, m2)
        for a, b in zip(labels[s1], labels[s2])
    )


def _aber_task(args):
    vectors, bits, a, b, inv_8n0, eps = args
    d = vectors[a:b, None, :] - vectors[None, :, :]
    mag2 = d.real ** 2 + d.imag ** 2
    factors = np.where(mag2 > eps * eps, 1.0 / (1.0 + mag2 * inv_8n0), 1.0)
    pep = 0.5 * factors.prod(axis=2)
    # identical-message pairs (the diagonal) carry weight 0, so no exclusion
    d_h = (bits[a:b, None, :] != bits[None, :, :]).sum(axis=2)
    return float((d_h * pep).sum())


def aber_union_bound(books: CodebookSet, N0: float, cap: int = DEFAULT_CAP,
                     eps: float = DEFAULT_EPS, workers: int = 1) -> float:
    """Bit-weighted union bound on average bit error rate.

    Averages, over every ordered pair of distinct message tuples, the
    pairwise error bound weighted by the fraction of information bits the
    two tuples disagree on.  Pairs whose superimposed vectors coincide are
    undetectable and contribute a pairwise error of 1/2.
    """
    if N0 <= 0:
        raise ValidationError("N0 must be positive")
    sset = enumerate_superimposed(books, cap)
    n = len(sset)
    label_bits = books.label_bits()
    bits = label_bits[sset.messages].reshape(n, -1)
    total_bits = bits.shape[1]
    inv_8n0 = 1.0 / (8.0 * N0)
    blocks = [(a, min(a + _ROW_BLOCK, n)) for a in range(0, n, _ROW_BLOCK)]
    partials = map_tasks(
        _aber_task,
        [(sset.vectors, bits, a, b, inv_8n0, eps) for a, b in blocks],
        workers,
    )
    weighted = float(np.sum(np.asarray(partials)))
    return weighted / (total_bits * n)
