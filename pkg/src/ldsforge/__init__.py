"""Low-density signatures from hexagonal lattice rings.

Construction, distance analysis, union bounds, and message-passing BER
simulation for power-imbalanced low-density signature matrices.
"""

from .codebook import (
    CodebookSet,
    Constellation,
    LdsMatrix,
    builtin_s1,
    builtin_s2,
    energy_distribution,
    expand,
    load,
    normalize,
    qpsk,
    save,
)
from .detector import DetectionProblem, MpaEngine, Posteriors, map_detect, mpa_detect
from .eisenstein import EisensteinInt, Ring, enumerate_ring, list_rings, to_complex
from .errors import EnumerationCapError, LdsError, ValidationError
from .graph import FactorGraph, active_users, builtin_graph, validate
from .metrics import (
    MetricsReport,
    SuperimposedSet,
    aber_union_bound,
    enumerate_superimposed,
    hamming_bits,
    min_product_distance,
    mpds,
    pep_bound,
    product_distance_sq,
)
from .search import SearchConfig, SearchResult, random_candidate, search
from .sim import BerPoint, SimConfig, ebno_to_n0, simulate, write_curve_csv

__version__ = "0.1.0"

__all__ = [
    "BerPoint",
    "CodebookSet",
    "Constellation",
    "DetectionProblem",
    "EisensteinInt",
    "EnumerationCapError",
    "FactorGraph",
    "LdsError",
    "LdsMatrix",
    "MetricsReport",
    "MpaEngine",
    "Posteriors",
    "Ring",
    "SearchConfig",
    "SearchResult",
    "SimConfig",
    "SuperimposedSet",
    "ValidationError",
    "aber_union_bound",
    "active_users",
    "builtin_graph",
    "builtin_s1",
    "builtin_s2",
    "ebno_to_n0",
    "energy_distribution",
    "enumerate_ring",
    "enumerate_superimposed",
    "expand",
    "hamming_bits",
    "list_rings",
    "load",
    "map_detect",
    "min_product_distance",
    "mpa_detect",
    "mpds",
    "normalize",
    "pep_bound",
    "product_distance_sq",
    "qpsk",
    "random_candidate",
    "save",
    "search",
    "simulate",
    "to_complex",
    "write_curve_csv",
]
