"""Multiuser detection: exhaustive MAP oracle and message passing.

The model is y = diag(h) * sum_j x_j + n with known h and Gaussian n of
per-component variance N0.  `map_detect` enumerates all M^J message tuples.
`mpa_detect` runs sum-product message passing on the factor graph implied by
the codebooks' sparsity: resource nodes marginalize the local likelihood
over their d_c users, user nodes multiply messages across their d_v
resources, flooding schedule, all in the log domain (exact log-sum-exp, or
max-log behind a flag).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .codebook import CodebookSet
from .errors import ValidationError
from .metrics import DEFAULT_CAP, enumerate_superimposed


@dataclass(eq=False)
class DetectionProblem:
    """One received block: observation, channel, codebooks, noise level."""

    y: np.ndarray
    h: np.ndarray
    books: CodebookSet
    N0: float

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex).reshape(-1)
        h = np.asarray(self.h, dtype=complex).reshape(-1)
        k = self.books.K
        if y.shape != (k,):
            raise ValidationError(f"y has {y.shape[0]} entries, expected K = {k}")
        if h.shape != (k,):
            raise ValidationError(f"h has {h.shape[0]} entries, expected K = {k}")
        if not self.N0 > 0:
            raise ValidationError(f"N0 must be positive, got {self.N0}")
        self.y = y
        self.h = h
        self.N0 = float(self.N0)


@dataclass(eq=False)
class Posteriors:
    """Per-user symbol posteriors with hard symbol and bit decisions."""

    probabilities: np.ndarray  # (J, M), rows sum to 1
    symbols: np.ndarray        # (J,) argmax symbol indices
    bits: np.ndarray           # (J * log2 M,) concatenated decided label bits


def map_detect(p: DetectionProblem, cap: int = DEFAULT_CAP) -> tuple:
    """Most likely message tuple by exhaustive search.

    Minimizes ||y - diag(h) x(m)||^2 over all M^J tuples; ties go to the
    lexicographically first tuple.
    """
    sset = enumerate_superimposed(p.books, cap)
    r = p.y[None, :] - p.h[None, :] * sset.vectors
    cost = (r.real ** 2 + r.imag ** 2).sum(axis=1)
    best = int(np.argmin(cost))  # first occurrence = lexicographic order
    return tuple(int(m) for m in sset.messages[best])


class MpaEngine:
    """Precomputed message-passing schedule for one codebook set.

    Building the engine validates graph regularity and caches, per resource,
    the d_c-dimensional table of superimposed contributions.  `log_posteriors`
    then runs the flooding iterations on a whole batch of blocks at once.
    """

    def __init__(self, books: CodebookSet, max_log: bool = False):
        inc = books.incidence()
        row_deg = inc.sum(axis=1)
        col_deg = inc.sum(axis=0)
        if np.ptp(row_deg) or np.ptp(col_deg):
            raise ValidationError(
                "message passing requires a regular graph: "
                f"row degrees {row_deg.tolist()}, column degrees {col_deg.tolist()}"
            )
        self.books = books
        self.max_log = max_log
        self.K, self.J, self.M = books.K, books.J, books.M
        self.d_c = int(row_deg[0])
        self.d_v = int(col_deg[0])
        self.rows = [np.flatnonzero(inc[k]) for k in range(self.K)]
        self.cols = [np.flatnonzero(inc[:, j]) for j in range(self.J)]
        self.edge = {}
        for k in range(self.K):
            for j in self.rows[k]:
                self.edge[(k, int(j))] = len(self.edge)
        self.n_edges = len(self.edge)
        # per resource: flat (M^d_c,) table of sum_t X_{j_t}[k, m_t], axis t
        # of the unflattened table indexing user t's symbol
        self.totals = []
        for k in range(self.K):
            tot = np.zeros((self.M,) * self.d_c, dtype=complex)
            for t, j in enumerate(self.rows[k]):
                shape = [1] * self.d_c
                shape[t] = self.M
                tot = tot + books.books[j][k, :].reshape(shape)
            self.totals.append(tot.reshape(-1))

    def _reduce(self, t, axes):
        if self.max_log:
            return t.max(axis=axes)
        return logsumexp(t, axis=axes)

    def log_posteriors(self, y, h, N0, iters: int) -> np.ndarray:
        """(B, J, M) normalized log posteriors for a (B, K) batch."""
        if iters < 1:
            raise ValidationError(f"iters must be >= 1, got {iters}")
        if not N0 > 0:
            raise ValidationError(f"N0 must be positive, got {N0}")
        y = np.asarray(y, dtype=complex)
        h = np.asarray(h, dtype=complex)
        b = y.shape[0]
        m, d_c = self.M, self.d_c
        cube = (b,) + (m,) * d_c
        # local log likelihoods, fixed across iterations
        loc = []
        for k in range(self.K):
            r = y[:, k, None] - h[:, k, None] * self.totals[k][None, :]
            loc.append((-(r.real ** 2 + r.imag ** 2) / N0).reshape(cube))
        r_msg = np.zeros((self.n_edges, b, m))
        u_msg = np.zeros((self.n_edges, b, m))
        for _ in range(iters):
            for k in range(self.K):
                users = self.rows[k]
                for t, j in enumerate(users):
                    t_full = loc[k]
                    for t2, j2 in enumerate(users):
                        if t2 == t:
                            continue
                        shape = [1] * d_c
                        shape[t2] = m
                        t_full = t_full + u_msg[self.edge[(k, int(j2))]].reshape(
                            (b,) + tuple(shape)
                        )
                    axes = tuple(1 + t2 for t2 in range(d_c) if t2 != t)
                    r_msg[self.edge[(k, int(j))]] = self._reduce(t_full, axes)
            r_msg -= logsumexp(r_msg, axis=-1, keepdims=True)
            for j in range(self.J):
                ids = [self.edge[(int(k), j)] for k in self.cols[j]]
                tot = np.zeros((b, m))
                for e in ids:
                    tot = tot + r_msg[e]
                for e in ids:  # leave-one-out in log domain; all terms finite
                    u_msg[e] = tot - r_msg[e]
            u_msg -= logsumexp(u_msg, axis=-1, keepdims=True)
        post = np.zeros((b, self.J, m))
        for j in range(self.J):
            for k in self.cols[j]:
                post[:, j, :] += r_msg[self.edge[(int(k), j)]]
        post -= logsumexp(post, axis=-1, keepdims=True)
        return post

    def decide(self, log_post) -> np.ndarray:
        """(B, J) hard symbol decisions from a log-posterior batch."""
        return np.argmax(log_post, axis=-1)


def mpa_detect(p: DetectionProblem, iters: int = 8, max_log: bool = False) -> Posteriors:
    """Sum-product detection of a single block; see MpaEngine."""
    engine = MpaEngine(p.books, max_log=max_log)
    log_post = engine.log_posteriors(p.y[None, :], p.h[None, :], p.N0, iters)[0]
    probs = np.exp(log_post)
    symbols = np.argmax(log_post, axis=-1)
    bits = p.books.label_bits()[symbols].reshape(-1)
    return Posteriors(probabilities=probs, symbols=symbols, bits=bits)
