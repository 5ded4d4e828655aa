"""Monte Carlo bit error rate simulation over AWGN and Rayleigh channels.

Each block draws one message tuple, a channel realization, and noise, then
detects with message passing under perfect channel knowledge.  Randomness is
counter-based: every block's stream is derived from (seed, grid point index,
block index), so curves are identical for any execution order or worker
count.  Blocks are processed in fixed batches of `BATCH_BLOCKS`; a point's
stop rule (enough bit errors, or a block budget) is checked at batch
boundaries in batch order, which keeps the committed block count a pure
function of the configuration.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .codebook import CodebookSet, Constellation, LdsMatrix
from .detector import MpaEngine
from .errors import ValidationError
from .parallel import map_tasks

CHANNELS = ("awgn", "rayleigh")

#: blocks per RNG/stop-rule batch; fixed so results never depend on workers
BATCH_BLOCKS = 4096


@dataclass(eq=False)
class SimConfig:
    """One BER sweep: codebooks, channel, Eb/N0 grid, detector and stop rule."""

    books: CodebookSet
    channel: str
    ebno_grid_db: Sequence[float]
    mpa_iters: int = 8
    min_errors: int = 200
    max_blocks: int = 10 ** 6
    seed: int = 0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValidationError(
                f"unknown channel {self.channel!r}, expected one of {CHANNELS}"
            )
        if len(self.ebno_grid_db) == 0:
            raise ValidationError("ebno grid must be non-empty")
        if self.mpa_iters < 1:
            raise ValidationError(f"mpa_iters must be >= 1, got {self.mpa_iters}")
        if self.min_errors < 1:
            raise ValidationError(f"min_errors must be >= 1, got {self.min_errors}")
        if self.max_blocks < 1:
            raise ValidationError(f"max_blocks must be >= 1, got {self.max_blocks}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must fit in 64 bits, got {self.seed}")
        self.ebno_grid_db = tuple(float(x) for x in self.ebno_grid_db)


@dataclass
class BerPoint:
    """Monte Carlo estimate at one grid point."""

    ebno_db: float
    blocks: int
    bits: int
    bit_errors: int
    ber: float
    ci95: float


def _eb_per_bit(total_symbol_energy: float, j: int, m: int) -> float:
    return total_symbol_energy / (j * math.log2(m))


def ebno_to_n0(ebno_db: float, s: LdsMatrix, c: Constellation) -> float:
    """Noise density for a target Eb/N0 in dB.

    Eb is the transmitted energy per information bit: the signature set's
    squared Frobenius norm times the constellation's mean point energy,
    spread over J log2(M) bits.
    """
    es = float(np.mean(np.abs(c.points) ** 2))
    eb = _eb_per_bit(s.frobenius_sq() * es, s.J, c.M)
    return eb / 10 ** (ebno_db / 10)


def books_ebno_to_n0(ebno_db: float, books: CodebookSet) -> float:
    """Same mapping computed from expanded codebooks (mean codeword energy)."""
    total = sum(float((np.abs(b) ** 2).sum()) / books.M for b in books.books)
    eb = _eb_per_bit(total, books.J, books.M)
    return eb / 10 ** (ebno_db / 10)


def _block_rng(seed: int, point_idx: int, block_idx: int) -> np.random.Generator:
    bits = np.random.Philox(
        key=np.array([seed, point_idx], dtype=np.uint64),
        counter=np.array([0, 0, 0, block_idx], dtype=np.uint64),
    )
    return np.random.Generator(bits)


def draw_block(seed, point_idx, block_idx, j, m, k, channel, n0):
    """(messages, h, noise) for one block; the draw order is part of the contract."""
    rng = _block_rng(seed, point_idx, block_idx)
    msgs = rng.integers(0, m, size=j)
    if channel == "rayleigh":
        z = rng.standard_normal((k, 2))
        h = (z[:, 0] + 1j * z[:, 1]) * math.sqrt(0.5)
    else:
        h = np.ones(k, dtype=complex)
    z = rng.standard_normal((k, 2))
    noise = (z[:, 0] + 1j * z[:, 1]) * math.sqrt(n0 / 2)
    return msgs, h, noise


def _draw_batch(seed, point_idx, start_block, count, j, m, k, channel, n0):
    msgs = np.empty((count, j), dtype=np.int64)
    h = np.empty((count, k), dtype=complex)
    noise = np.empty((count, k), dtype=complex)
    for i in range(count):
        msgs[i], h[i], noise[i] = draw_block(
            seed, point_idx, start_block + i, j, m, k, channel, n0
        )
    return msgs, h, noise


def _batch_task(args):
    books, channel, n0, iters, seed, point_idx, start_block, count = args
    j, m, k = books.J, books.M, books.K
    msgs, h, noise = _draw_batch(seed, point_idx, start_block, count, j, m, k, channel, n0)
    x = np.zeros((count, k), dtype=complex)
    for u in range(j):
        x += books.books[u][:, msgs[:, u]].T
    y = h * x + noise
    engine = MpaEngine(books)
    decided = engine.decide(engine.log_posteriors(y, h, n0, iters))
    label_bits = books.label_bits()
    errors = int((label_bits[msgs] != label_bits[decided]).sum())
    return errors


def _run_point(cfg: SimConfig, point_idx: int, n0: float, workers: int) -> Tuple[int, int]:
    """(blocks, bit_errors) committed for one grid point."""
    starts = list(range(0, cfg.max_blocks, BATCH_BLOCKS))
    batches = [(s, min(BATCH_BLOCKS, cfg.max_blocks - s)) for s in starts]
    blocks = 0
    errors = 0
    window = max(1, workers) * 2
    i = 0
    while i < len(batches):
        chunk = batches[i:i + window]
        args = [
            (cfg.books, cfg.channel, n0, cfg.mpa_iters, cfg.seed, point_idx, s, c)
            for s, c in chunk
        ]
        results = map_tasks(_batch_task, args, workers)
        done = False
        for (s, c), e in zip(chunk, results):  # commit in batch order
            blocks += c
            errors += e
            if errors >= cfg.min_errors:
                done = True
                break
        if done:
            break
        i += len(chunk)
    return blocks, errors


def simulate(cfg: SimConfig, workers: int = 1) -> List[BerPoint]:
    """BER at every grid point; deterministic for a given config."""
    bits_per_block = cfg.books.J * cfg.books.bits_per_symbol
    points = []
    for point_idx, ebno_db in enumerate(cfg.ebno_grid_db):
        n0 = books_ebno_to_n0(ebno_db, cfg.books)
        blocks, errors = _run_point(cfg, point_idx, n0, workers)
        bits = blocks * bits_per_block
        ber = errors / bits
        ci95 = 1.96 * math.sqrt(ber * (1.0 - ber) / bits)
        points.append(BerPoint(ebno_db, blocks, bits, errors, ber, ci95))
    return points


def write_curve_csv(points: List[BerPoint], path) -> None:
    """CSV with header ebno_db,blocks,bits,bit_errors,ber,ci95."""
    lines = ["ebno_db,blocks,bits,bit_errors,ber,ci95"]
    for p in points:
        lines.append(
            f"{p.ebno_db!r},{p.blocks},{p.bits},{p.bit_errors},{p.ber!r},{p.ci95!r}"
        )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
