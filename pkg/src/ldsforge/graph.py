"""Bipartite resource/user structure of a sparse multiple-access system.

The incidence matrix is K x J: row k lists which of the J users are active
on resource k.  A (d_v, d_c)-regular graph has every column summing to d_v
(resources per user) and every row to d_c (users per resource).
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ValidationError

# Built-in 4x6 layout: J=6 users over K=4 resources, d_v=2, d_c=3,
# overloading factor 1.5.  This is the graph the bundled signature sets use.
_BUILTIN_INCIDENCE = (
    (0, 1, 1, 0, 1, 0),
    (1, 0, 1, 0, 0, 1),
    (0, 1, 0, 1, 0, 1),
    (1, 0, 0, 1, 1, 0),
)


@dataclass(eq=False)
class FactorGraph:
    """K x J binary incidence with declared regularity parameters.

    Irregular matrices are accepted here; operations that require regularity
    (construction search, message passing) reject them via `validate`.
    """

    K: int
    J: int
    d_v: int
    d_c: int
    incidence: np.ndarray

    def __post_init__(self):
        inc = np.array(self.incidence, dtype=np.int8)
        if inc.shape != (self.K, self.J):
            raise ValidationError(
                f"incidence shape {inc.shape} does not match (K, J) = ({self.K}, {self.J})"
            )
        inc.setflags(write=False)
        self.incidence = inc

    @property
    def overloading(self) -> float:
        """Users per orthogonal resource, J/K.  Reported, never enforced."""
        return self.J / self.K


def builtin_graph() -> FactorGraph:
    """The standard 4x6 graph with (K, J, d_v, d_c) = (4, 6, 2, 3)."""
    return FactorGraph(K=4, J=6, d_v=2, d_c=3, incidence=_BUILTIN_INCIDENCE)


def active_users(g: FactorGraph, k: int) -> List[int]:
    """Users active on resource k, ascending.  Indices are 1-based on both sides."""
    if not 1 <= k <= g.K:
        raise ValidationError(f"resource index must be in 1..{g.K}, got {k}")
    return [j + 1 for j in np.flatnonzero(g.incidence[k - 1])]


def validate(g: FactorGraph) -> List[str]:
    """Regularity violations as human-readable strings; empty means regular.

    Checks entries are binary, every row degree equals d_c, every column
    degree equals d_v, and the declared parameters satisfy K*d_c == J*d_v.
    Violations are data, not exceptions.
    """
    problems = []
    if not np.isin(g.incidence, (0, 1)).all():
        problems.append("incidence entries must be 0 or 1")
    if g.K * g.d_c != g.J * g.d_v:
        problems.append(
            f"edge count mismatch: K*d_c = {g.K * g.d_c} but J*d_v = {g.J * g.d_v}"
        )
    row_sums = g.incidence.sum(axis=1)
    for k, got in enumerate(row_sums, start=1):
        if got != g.d_c:
            problems.append(f"row {k}: degree {got}, expected d_c = {g.d_c}")
    col_sums = g.incidence.sum(axis=0)
    for j, got in enumerate(col_sums, start=1):
        if got != g.d_v:
            problems.append(f"column {j}: degree {got}, expected d_v = {g.d_v}")
    return problems
