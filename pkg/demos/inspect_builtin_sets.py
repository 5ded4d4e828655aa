"""Print distance metrics and per-user energies of the two built-in sets.

S1 spreads its users over lattice rings of squared radius 1, 3 and 7, so the
users receive deliberately unequal power; S2 keeps every nonzero entry at
unit magnitude.  The imbalance buys a larger minimum product distance and a
higher diversity order at the same total energy.
"""

from ldsforge import (
    builtin_s1,
    builtin_s2,
    energy_distribution,
    enumerate_superimposed,
    expand,
    mpds,
    qpsk,
)


def describe(name, s):
    books = expand(s, qpsk())
    rep = mpds(enumerate_superimposed(books))
    energies = energy_distribution(s)
    print(f"{name}: K={s.K} J={s.J} overloading {s.J / s.K:.0%}")
    print(f"  mpds            {rep.mpds:.6f}")
    print(f"  diversity order {rep.diversity_order}")
    print(f"  kissing number  {rep.kissing_number}")
    print(f"  user energies   {[round(float(e), 4) for e in energies]}")
    print(f"  power balanced  {s.is_power_balanced()}")
    print()


if __name__ == "__main__":
    describe("S1 (imbalanced)", builtin_s1())
    describe("S2 (balanced)", builtin_s2())
