"""Randomized construction of power-imbalanced signature sets.

A candidate assigns, per resource row, a random bijection from the row's
active users to d_c configured lattice rings, draws one random ring point
per assignment, and normalizes the matrix to squared Frobenius norm d_v * J.
Random search keeps the candidate with the largest minimum product distance;
an optional refinement pass then walks single-entry ring-point swaps,
accepting the first strict improvement until none is left.

Candidate i's randomness is derived from (seed, i) alone, so search results
are identical for any evaluation order or worker count.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .codebook import Constellation, LdsMatrix, expand, normalize
from .eisenstein import enumerate_ring, to_complex
from .errors import EnumerationCapError, ValidationError
from .graph import FactorGraph
from .metrics import DEFAULT_CAP, enumerate_superimposed, min_product_distance
from .parallel import map_tasks

_CAND_CHUNK = 8  # candidates per worker task, fixed for determinism


@dataclass(eq=False)
class SearchConfig:
    """Search space and budget for the randomized construction."""

    graph: FactorGraph
    ring_radii_sq: Tuple[int, ...]
    constellation: Constellation
    budget: int
    seed: int
    cap: int = DEFAULT_CAP
    hill_climb: bool = False

    def __post_init__(self):
        radii = tuple(int(r) for r in self.ring_radii_sq)
        if len(radii) != self.graph.d_c:
            raise ValidationError(
                f"need d_c = {self.graph.d_c} ring radii, got {len(radii)}"
            )
        if any(r < 1 for r in radii):
            raise ValidationError(f"ring radii must be positive, got {radii}")
        if list(radii) != sorted(set(radii)):
            raise ValidationError(f"ring radii must be strictly ascending, got {radii}")
        for r in radii:
            if len(enumerate_ring(r)) == 0:
                raise ValidationError(f"ring with squared radius {r} is empty")
        if self.budget < 1:
            raise ValidationError(f"budget must be >= 1, got {self.budget}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must fit in 64 bits, got {self.seed}")
        if self.cap < 1:
            raise ValidationError(f"cap must be >= 1, got {self.cap}")
        self.ring_radii_sq = radii


@dataclass(eq=False)
class SearchResult:
    """Best candidate found, its score, and the improvement history."""

    best: LdsMatrix
    best_mpds: float
    trace: List[Tuple[int, float]] = field(default_factory=list)


@dataclass(eq=False)
class _Assignment:
    """One candidate in structured form: per row, ring and point choices."""

    ring_of_slot: np.ndarray    # (K, d_c) ring index for each active-user slot
    point_of_slot: np.ndarray   # (K, d_c) index into the assigned ring


def _candidate_rng(seed: int, index: int) -> np.random.Generator:
    bits = np.random.Philox(key=np.array([seed, index], dtype=np.uint64))
    return np.random.Generator(bits)


def _rings(cfg: SearchConfig):
    return [enumerate_ring(r) for r in cfg.ring_radii_sq]


def _row_users(graph: FactorGraph):
    return [np.flatnonzero(graph.incidence[k]) for k in range(graph.K)]


def _draw_assignment(cfg: SearchConfig, rng: np.random.Generator) -> _Assignment:
    k, d_c = cfg.graph.K, cfg.graph.d_c
    rings = _rings(cfg)
    ring_of_slot = np.empty((k, d_c), dtype=np.int64)
    point_of_slot = np.empty((k, d_c), dtype=np.int64)
    for row in range(k):
        ring_of_slot[row] = rng.permutation(d_c)
        for slot in range(d_c):
            point_of_slot[row, slot] = rng.integers(len(rings[ring_of_slot[row, slot]]))
    return _Assignment(ring_of_slot, point_of_slot)


def _assemble(cfg: SearchConfig, asg: _Assignment) -> LdsMatrix:
    graph = cfg.graph
    rings = _rings(cfg)
    users = _row_users(graph)
    entries = np.zeros((graph.K, graph.J), dtype=complex)
    for row in range(graph.K):
        norms = set()
        for slot, j in enumerate(users[row]):
            ring = rings[asg.ring_of_slot[row, slot]]
            p = ring.points[asg.point_of_slot[row, slot]]
            norms.add(p.norm_sq)
            entries[row, j] = to_complex(p)
        # Step 2 row property: one point from each ring, exact integer norms
        assert norms == set(cfg.ring_radii_sq)
    return normalize(LdsMatrix(graph, entries))


def random_candidate(cfg: SearchConfig, rng: np.random.Generator) -> LdsMatrix:
    """Draw one normalized candidate; consumes the stream deterministically."""
    return _assemble(cfg, _draw_assignment(cfg, rng))


def _score(cfg: SearchConfig, s: LdsMatrix) -> float:
    books = expand(s, cfg.constellation)
    return min_product_distance(enumerate_superimposed(books, cfg.cap))


def _score_chunk(args):
    cfg, start, count = args
    return [
        _score(cfg, random_candidate(cfg, _candidate_rng(cfg.seed, start + i)))
        for i in range(count)
    ]


def search(cfg: SearchConfig, workers: int = 1) -> SearchResult:
    """Evaluate `budget` candidates, keep the best, optionally refine it.

    Ties in score go to the lowest candidate index.  The trace records one
    (candidate index, mpds) entry per strict improvement; refinement steps
    continue the index sequence past the random budget.
    """
    n = cfg.constellation.M ** cfg.graph.J
    if n > cfg.cap:
        raise EnumerationCapError(
            f"superimposed set has M^J = {n} entries, exceeding cap {cfg.cap}"
        )
    chunks = [
        (cfg, s, min(_CAND_CHUNK, cfg.budget - s))
        for s in range(0, cfg.budget, _CAND_CHUNK)
    ]
    scores = []
    for part in map_tasks(_score_chunk, chunks, workers):
        scores.extend(part)
    best_idx = -1
    best_score = -np.inf
    trace = []
    for i, sc in enumerate(scores):
        if sc > best_score:
            best_idx, best_score = i, sc
            trace.append((i, float(sc)))
    best_asg = _draw_assignment(cfg, _candidate_rng(cfg.seed, best_idx))
    if cfg.hill_climb:
        best_asg, best_score, trace = _refine(cfg, best_asg, best_score, trace)
    return SearchResult(best=_assemble(cfg, best_asg), best_mpds=float(best_score),
                        trace=trace)


def _refine(cfg: SearchConfig, asg: _Assignment, score: float, trace):
    """First-improvement single-entry point swaps until a full quiet pass.

    The ring assignment stays fixed; only point choices move.  Deterministic:
    rows, slots and replacement points are visited in enumeration order.
    """
    rings = _rings(cfg)
    step = cfg.budget
    improved = True
    while improved:
        improved = False
        for row in range(cfg.graph.K):
            for slot in range(cfg.graph.d_c):
                ring = rings[asg.ring_of_slot[row, slot]]
                current = asg.point_of_slot[row, slot]
                for p in range(len(ring)):
                    if p == current:
                        continue
                    asg.point_of_slot[row, slot] = p
                    sc = _score(cfg, _assemble(cfg, asg))
                    if sc > score:
                        score = sc
                        trace.append((step, float(sc)))
                        step += 1
                        improved = True
                        break
                    asg.point_of_slot[row, slot] = current
    return asg, score, trace
