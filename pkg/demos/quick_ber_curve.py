"""Short AWGN sweep comparing the built-in sets against their union bounds.

Runs a deliberately small Monte Carlo budget (50 bit errors per point) so the
whole script finishes in well under a minute; the acceptance-grade curves in
the test suite use 200+ errors per point.  Columns: Eb/N0, simulated BER,
union bound.
"""

from ldsforge import aber_union_bound, builtin_s1, builtin_s2, expand, qpsk
from ldsforge.sim import SimConfig, ebno_to_n0, simulate

GRID_DB = [0.0, 4.0, 8.0]
SEED = 1


def sweep(name, s):
    books = expand(s, qpsk())
    cfg = SimConfig(books=books, channel="awgn", ebno_grid_db=GRID_DB,
                    min_errors=50, max_blocks=10 ** 5, seed=SEED)
    points = simulate(cfg)
    print(f"{name}  (awgn, {cfg.mpa_iters} MPA iterations, seed {SEED})")
    print("  Eb/N0 dB     sim BER   union bound")
    for p in points:
        bound = aber_union_bound(books, ebno_to_n0(p.ebno_db, s, qpsk()))
        print(f"  {p.ebno_db:8.1f}  {p.ber:.4e}   {bound:.4e}")
    print()


if __name__ == "__main__":
    sweep("S1", builtin_s1())
    sweep("S2", builtin_s2())
