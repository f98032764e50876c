"""Quantum stochastic walks on arbitrary directed graphs.

GKSL evolution generators in local, global and nonmoralizing-global regimes,
density-matrix propagation with dense or sparse-Krylov matrix exponentials,
and analysis of measurement distributions and stationary states.
"""

from .analysis import (
    MeasurementDistribution,
    ballistic_exponent,
    canonical_measurement,
    moment,
    null_dim,
    stationary_state,
)
from .demoral import (
    Vertex,
    VertexSet,
    default_nm_loc_ham,
    make_vertex_set,
    nm_glob_ham,
    nm_init,
    nm_lind,
    nm_loc_ham,
    nm_measurement,
    vertexsetsize,
)
from .errors import (
    DegenerateStationaryError,
    NumericalError,
    ParseError,
    ResourceLimitError,
)
from .evolve import evolve, evolve_closed, evolve_operator
from .expaction import KrylovConfig, expm_dense, expmv
from .generator import evolve_generator, local_lind
from .graphio import (
    GraphSpec,
    adjacency,
    parse_edge_list,
    parse_matrix_market,
    write_edge_list,
    write_matrix_market,
)
from .linalg import (
    bra,
    density_defects,
    fourier_matrix,
    hermiticity_defect,
    is_sparse,
    ket,
    ketbra,
    proj,
    res,
    to_dense,
    to_sparse,
    unres,
)

__all__ = [
    "MeasurementDistribution", "ballistic_exponent", "canonical_measurement",
    "moment", "null_dim", "stationary_state",
    "Vertex", "VertexSet", "default_nm_loc_ham", "make_vertex_set",
    "nm_glob_ham", "nm_init", "nm_lind", "nm_loc_ham", "nm_measurement",
    "vertexsetsize",
    "DegenerateStationaryError", "NumericalError", "ParseError",
    "ResourceLimitError",
    "evolve", "evolve_closed", "evolve_operator",
    "KrylovConfig", "expm_dense", "expmv",
    "evolve_generator", "local_lind",
    "GraphSpec", "adjacency", "parse_edge_list", "parse_matrix_market",
    "write_edge_list", "write_matrix_market",
    "bra", "density_defects", "fourier_matrix", "hermiticity_defect",
    "is_sparse", "ket", "ketbra", "proj", "res", "to_dense", "to_sparse",
    "unres",
]

__version__ = "0.1.0"
