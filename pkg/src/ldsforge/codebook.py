"""Signature matrices, constellations, and sparse codebook expansion.

A low-density signature set is a K x J complex matrix S whose sparsity
pattern follows a factor graph; user j's codebook is the rank-1 expansion
of column s_j by an M-point constellation, giving a K x M matrix per user
with K - d_v all-zero rows.
"""

import cmath
import json
import math
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from .eisenstein import OMEGA
from .errors import ValidationError
from .graph import FactorGraph, builtin_graph


@dataclass(eq=False)
class Constellation:
    """M labeled complex points; labels are bit strings of length log2(M)."""

    points: np.ndarray
    labels: Tuple[str, ...]

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex)
        labels = tuple(self.labels)
        m = len(pts)
        if m < 2 or m & (m - 1):
            raise ValidationError(f"constellation order must be a power of two, got {m}")
        if len(labels) != m:
            raise ValidationError(f"{m} points but {len(labels)} labels")
        if len(set(labels)) != m:
            raise ValidationError("constellation labels must be distinct")
        nbits = m.bit_length() - 1
        for lab in labels:
            if len(lab) != nbits or set(lab) - {"0", "1"}:
                raise ValidationError(f"label {lab!r} is not a {nbits}-bit string")
        pts.setflags(write=False)
        self.points = pts
        self.labels = labels

    @property
    def M(self) -> int:
        return len(self.points)

    @property
    def bits_per_symbol(self) -> int:
        return self.M.bit_length() - 1

    def label_bits(self) -> np.ndarray:
        """M x bits_per_symbol array of 0/1 ints, row m = bits of label m."""
        return np.array([[int(c) for c in lab] for lab in self.labels], dtype=np.uint8)


def qpsk() -> Constellation:
    """Unit-energy QPSK, points (+-1 +-1j)/sqrt(2), Gray labeled.

    Symbol order: 00 -> (1+1j)/sqrt(2), 01 -> (-1+1j)/sqrt(2),
    11 -> (-1-1j)/sqrt(2), 10 -> (1-1j)/sqrt(2).
    """
    s = 1.0 / math.sqrt(2.0)
    points = [s * (1 + 1j), s * (-1 + 1j), s * (-1 - 1j), s * (1 - 1j)]
    return Constellation(points, ("00", "01", "11", "10"))


@dataclass(eq=False)
class LdsMatrix:
    """K x J signature matrix tied to a factor graph.

    Entries must vanish wherever the graph's incidence does; a nonzero entry
    off the sparsity pattern is rejected at construction time.
    """

    graph: FactorGraph
    entries: np.ndarray

    def __post_init__(self):
        ent = np.array(self.entries, dtype=complex)
        g = self.graph
        if ent.shape != (g.K, g.J):
            raise ValidationError(
                f"signature matrix shape {ent.shape} does not match (K, J) = ({g.K}, {g.J})"
            )
        bad = (ent != 0) & (g.incidence == 0)
        if bad.any():
            k, j = np.argwhere(bad)[0]
            raise ValidationError(
                f"sparsity violation: entry at resource {k + 1}, user {j + 1} is "
                "nonzero where the graph has no edge"
            )
        ent.setflags(write=False)
        self.entries = ent

    @property
    def K(self) -> int:
        return self.graph.K

    @property
    def J(self) -> int:
        return self.graph.J

    def frobenius_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def is_power_balanced(self, tol: float = 1e-9) -> bool:
        """True if all nonzero entry magnitudes coincide within tol (relative)."""
        mags = np.abs(self.entries[self.graph.incidence == 1])
        if mags.size == 0:
            return True
        lo, hi = mags.min(), mags.max()
        return bool(hi - lo <= tol * hi)


def normalize(s: LdsMatrix) -> LdsMatrix:
    """Scale by one positive real so the squared Frobenius norm equals d_v * J."""
    total = s.frobenius_sq()
    if total <= 0.0:
        raise ValidationError("cannot normalize an all-zero signature matrix")
    scale = math.sqrt(s.graph.d_v * s.graph.J / total)
    return LdsMatrix(s.graph, s.entries * scale)


def energy_distribution(s: LdsMatrix) -> np.ndarray:
    """Per-user energies: element j is the squared norm of column j."""
    return np.sum(np.abs(s.entries) ** 2, axis=0)


@dataclass(eq=False)
class CodebookSet:
    """Per-user K x M codebooks plus the shared bit labeling of the M symbols."""

    books: List[np.ndarray]
    labels: Tuple[str, ...]

    def __post_init__(self):
        books = [np.array(b, dtype=complex) for b in self.books]
        if not books:
            raise ValidationError("codebook set must contain at least one user")
        shape = books[0].shape
        if len(shape) != 2 or any(b.shape != shape for b in books):
            raise ValidationError("all user codebooks must share one K x M shape")
        labels = tuple(self.labels)
        if len(labels) != shape[1]:
            raise ValidationError(
                f"{shape[1]} codewords per user but {len(labels)} labels"
            )
        for b in books:
            b.setflags(write=False)
        self.books = books
        self.labels = labels

    @property
    def K(self) -> int:
        return self.books[0].shape[0]

    @property
    def J(self) -> int:
        return len(self.books)

    @property
    def M(self) -> int:
        return self.books[0].shape[1]

    @property
    def bits_per_symbol(self) -> int:
        return self.M.bit_length() - 1

    def label_bits(self) -> np.ndarray:
        return np.array([[int(c) for c in lab] for lab in self.labels], dtype=np.uint8)

    def incidence(self) -> np.ndarray:
        """K x J pattern of rows each user actually occupies."""
        cols = [np.any(b != 0, axis=1).astype(np.int8) for b in self.books]
        return np.stack(cols, axis=1)


def expand(s: LdsMatrix, c: Constellation) -> CodebookSet:
    """Rank-1 codebooks: user j's codeword for symbol m is s_j scaled by point m."""
    books = [np.outer(s.entries[:, j], c.points) for j in range(s.J)]
    return CodebookSet(books, c.labels)


def _default_labels(m: int) -> Tuple[str, ...]:
    nbits = m.bit_length() - 1
    return tuple(format(i, f"0{nbits}b") for i in range(m))


# The first built-in signature set, stored as lattice coordinates (a, b)
# meaning a + b*w with w = exp(2*pi*i/3).  Each row draws one point from each
# of the rings of squared radii 1, 3 and 7, so every resource sees three
# distinct power levels; per-user energies differ as well.  The coordinates
# must be exact: hand-rounded entries break coordinate cancellations in the
# superimposed sums and collapse the minimum product distance.  Total squared
# norm is 44, so scaling by sqrt(12/44) normalizes the Frobenius norm.
_S1_POINTS = (
    (None, (1, -1), (-1, 0), None, (2, -1), None),
    ((-2, -3), None, (-1, 1), None, None, (-1, -1)),
    (None, (1, 2), None, (1, 1), None, (2, 3)),
    ((-1, 0), None, None, (3, 2), (-2, -1), None),
)

_HALF_OMEGA = cmath.exp(1j * cmath.pi / 3)  # principal square root of OMEGA

# Power-balanced reference set on the same graph, Latin-style: every nonzero
# entry has unit magnitude, drawn from {1, w, w^(1/2)}.
_S2_RAW = (
    (0, OMEGA, 1, 0, _HALF_OMEGA, 0),
    (_HALF_OMEGA, 0, OMEGA, 0, 0, 1),
    (0, _HALF_OMEGA, 0, 1, 0, OMEGA),
    (1, 0, 0, _HALF_OMEGA, OMEGA, 0),
)


def builtin_s1() -> LdsMatrix:
    """Power-imbalanced built-in set S1, from lattice rings 1, 3 and 7."""
    points = [p for row in _S1_POINTS for p in row if p is not None]
    total = sum(a * a - a * b + b * b for a, b in points)
    scale = math.sqrt(12 / total)
    entries = np.zeros((len(_S1_POINTS), len(_S1_POINTS[0])), dtype=complex)
    for k, row in enumerate(_S1_POINTS):
        for j, p in enumerate(row):
            if p is not None:
                a, b = p
                entries[k, j] = scale * (a + b * OMEGA)
    return LdsMatrix(builtin_graph(), entries)


def builtin_s2() -> LdsMatrix:
    """Power-balanced built-in set S2; unit-magnitude entries, already normalized."""
    return LdsMatrix(builtin_graph(), _S2_RAW)


def _complex_out(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _complex_in(v, where: str) -> complex:
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(x, (int, float)) for x in v)
    ):
        raise ValidationError(f"{where}: complex values must be [re, im] pairs")
    return complex(v[0], v[1])


def save(s: LdsMatrix, path) -> None:
    """Write an LDS JSON file: graph parameters, incidence, and S as [re, im] pairs."""
    g = s.graph
    doc = {
        "K": g.K,
        "J": g.J,
        "d_v": g.d_v,
        "d_c": g.d_c,
        "incidence": [[int(x) for x in row] for row in g.incidence],
        "S": [[_complex_out(z) for z in row] for row in s.entries],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _require(doc: dict, key: str, path) -> object:
    if key not in doc:
        raise ValidationError(f"{path}: missing required key {key!r}")
    return doc[key]


def _load_lds(doc: dict, path) -> LdsMatrix:
    K = int(_require(doc, "K", path))
    J = int(_require(doc, "J", path))
    d_v = int(_require(doc, "d_v", path))
    d_c = int(_require(doc, "d_c", path))
    incidence = _require(doc, "incidence", path)
    raw = _require(doc, "S", path)
    if len(raw) != K or any(len(row) != J for row in raw):
        raise ValidationError(f"{path}: S must be a {K}x{J} row-major matrix")
    entries = [
        [_complex_in(v, f"{path}: S[{k}][{j}]") for j, v in enumerate(row)]
        for k, row in enumerate(raw)
    ]
    try:
        graph = FactorGraph(K=K, J=J, d_v=d_v, d_c=d_c, incidence=incidence)
        return LdsMatrix(graph, entries)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _load_codebooks(doc: dict, path) -> CodebookSet:
    K = int(_require(doc, "K", path))
    J = int(_require(doc, "J", path))
    M = int(_require(doc, "M", path))
    raw = _require(doc, "books", path)
    if len(raw) != J:
        raise ValidationError(f"{path}: expected {J} user codebooks, got {len(raw)}")
    books = []
    for j, book in enumerate(raw):
        if len(book) != K or any(len(row) != M for row in book):
            raise ValidationError(f"{path}: user {j + 1} codebook must be {K}x{M}")
        books.append(
            [
                [_complex_in(v, f"{path}: books[{j}][{k}][{m}]") for m, v in enumerate(row)]
                for k, row in enumerate(book)
            ]
        )
    labels = doc.get("labels")
    labels = tuple(labels) if labels is not None else _default_labels(M)
    try:
        return CodebookSet([np.array(b, dtype=complex) for b in books], labels)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def load(path) -> Union[LdsMatrix, CodebookSet]:
    """Load an LDS JSON file or an external full-codebook JSON file.

    The two schemas are distinguished by their top-level keys ("S" versus
    "books").  Round trips through `save` reproduce the matrix bit-exactly.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be a JSON object")
    if "S" in doc:
        return _load_lds(doc, path)
    if "books" in doc:
        return _load_codebooks(doc, path)
    raise ValidationError(f"{path}: neither an LDS file (key 'S') nor a codebook file (key 'books')")
