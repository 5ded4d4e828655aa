"""Randomized construction of an imbalanced signature set, compared to S1.

Draws candidates on the built-in 4x6 graph from rings of squared radius
1, 3 and 7 (one point of each ring per resource row) and keeps the best
minimum product distance.  A few dozen random candidates already land within
an order of magnitude of the shipped S1 set; closing the rest of the gap
takes a much larger budget plus the hill-climb refinement (`ldsforge
construct --hill-climb`), which rescans all 8.4M codeword pairs per trial
swap and is too slow for a quick demo.
"""

from ldsforge import (
    builtin_graph,
    builtin_s1,
    enumerate_superimposed,
    expand,
    min_product_distance,
    qpsk,
)
from ldsforge.search import SearchConfig, search

BUDGET = 24
SEED = 11

if __name__ == "__main__":
    cfg = SearchConfig(graph=builtin_graph(), ring_radii_sq=(1, 3, 7),
                       constellation=qpsk(), budget=BUDGET, seed=SEED)
    print(f"scoring {BUDGET} random candidates (seed {SEED})...")
    result = search(cfg)
    for i, value in result.trace:
        print(f"  new best at candidate {i:3d}: mpds {value:.6f}")

    reference = min_product_distance(
        enumerate_superimposed(expand(builtin_s1(), qpsk())))
    print(f"best found mpds   {result.best_mpds:.6f}")
    print(f"built-in S1 mpds  {reference:.6f}")
    print(f"ratio             {result.best_mpds / reference:.2f}")
