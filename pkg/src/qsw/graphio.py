"""Graph ingestion and generation feeding adjacency matrices to the engine.

Raw parsed matrices store arcs in out-form (entry (u, v) = weight of the arc
u -> v); :func:`adjacency` applies the requested orientation, where "in" puts
the arc j -> i at entry (i, j) and "undirected" symmetrizes to the underlying
undirected graph.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ParseError


@dataclass(frozen=True)
class GraphSpec:
    """Description of a graph source: a path graph, an Erdos-Renyi draw, or
    a file in edge-list or Matrix Market format."""

    kind: str
    n: int = 0
    p: float = 0.0
    directed: bool = False
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("path", "erdos_renyi", "file"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind != "file" and self.n < 1:
            raise ValueError("vertex count must be >= 1")
        if self.kind == "erdos_renyi" and not 0.0 <= self.p <= 1.0:
            raise ValueError("edge probability must lie in [0, 1]")
        if self.kind == "file" and not self.path:
            raise ValueError("file graphs need a path")

    @classmethod
    def parse(cls, text: str, seed: int = 0, directed: bool | None = None) -> "GraphSpec":
        """Parse CLI shorthand: ``path:N``, ``er:N:P`` or ``file:PATH``."""
        kind, _, rest = text.partition(":")
        if kind == "path":
            return cls("path", n=int(rest))
        if kind in ("er", "erdos_renyi"):
            fields = rest.split(":")
            if len(fields) < 2:
                raise ValueError("erdos_renyi spec needs N:P")
            n, p = int(fields[0]), float(fields[1])
            s = int(fields[2]) if len(fields) > 2 else seed
            return cls("erdos_renyi", n=n, p=p, seed=s,
                       directed=True if directed is None else directed)
        if kind == "file":
            return cls("file", path=rest, directed=True)
        raise ValueError(f"unknown graph spec {text!r}")


def _path_graph(n: int) -> sparse.csr_array:
    if n == 1:
        return sparse.csr_array((1, 1), dtype=float)
    i = np.arange(n - 1)
    rows = np.concatenate([i, i + 1])
    cols = np.concatenate([i + 1, i])
    data = np.ones(2 * (n - 1))
    return sparse.csr_array((data, (rows, cols)), shape=(n, n))


def _erdos_renyi(n: int, p: float, seed: int, directed: bool) -> sparse.csr_array:
    # Philox is counter-based, so draws are reproducible across platforms
    rng = np.random.Generator(np.random.Philox(key=seed))
    if directed:
        draws = rng.random((n, n))
        np.fill_diagonal(draws, 1.1)
        mask = draws < p if p < 1.0 else ~np.eye(n, dtype=bool)
    else:
        upper = rng.random((n, n))
        keep = (np.triu(upper, k=1) < p) & np.triu(np.ones((n, n), dtype=bool), k=1)
        if p >= 1.0:
            keep = np.triu(np.ones((n, n), dtype=bool), k=1)
        mask = keep | keep.T
    return sparse.csr_array(mask.astype(float))


def adjacency(spec: GraphSpec, orientation: str = "undirected") -> sparse.csr_array:
    """Adjacency matrix of a graph source in the requested orientation."""
    if orientation not in ("in", "out", "undirected"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if spec.kind == "path":
        raw = _path_graph(spec.n)
        directed = False
    elif spec.kind == "erdos_renyi":
        raw = _erdos_renyi(spec.n, spec.p, spec.seed, spec.directed)
        directed = spec.directed
    else:
        if not os.path.exists(spec.path):
            raise ParseError(f"graph file {spec.path!r} does not exist")
        with open(spec.path, encoding="utf-8") as fh:
            text = fh.read()
        raw = parse_matrix_market(text) if text.lstrip().startswith("%%MatrixMarket") \
            else parse_edge_list(text)
        directed = True
    if not directed:
        if orientation != "undirected":
            raise ValueError(
                f"orientation {orientation!r} is invalid for an undirected graph")
        return raw
    if orientation == "out":
        return raw
    if orientation == "in":
        return sparse.csr_array(raw.T)
    return raw.maximum(sparse.csr_array(raw.T))


def parse_edge_list(text: str) -> sparse.csr_array:
    """Parse whitespace-separated ``src dst [weight]`` lines (1-based vertices,
    ``#`` comments) into an out-form sparse adjacency matrix."""
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        payload = line.split("#", 1)[0].strip()
        if not payload:
            continue
        fields = payload.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {payload!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"vertex ids must be integers in {payload!r}", lineno) from None
        if u < 1 or v < 1:
            raise ParseError(f"vertex ids are 1-based, got {payload!r}", lineno)
        try:
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise ParseError(f"bad weight in {payload!r}", lineno) from None
        rows.append(u - 1)
        cols.append(v - 1)
        vals.append(w)
    n = max(max(rows, default=-1), max(cols, default=-1)) + 1
    out = sparse.csr_array((vals, (rows, cols)), shape=(n, n), dtype=float)
    out.sum_duplicates()
    return out


def write_edge_list(m) -> str:
    """Serialize a square matrix as the edge-list format read back by
    :func:`parse_edge_list`."""
    coo = sparse.coo_array(m)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.row[k] + 1} {coo.col[k] + 1} {coo.data[k]!r}" for k in order]
    return "\n".join(lines) + "\n"


_MM_FIELDS = ("real", "complex", "integer", "pattern")
_MM_SYMMETRIES = ("general", "symmetric")


def parse_matrix_market(text: str) -> sparse.csr_array:
    """Parse a Matrix Market coordinate-format matrix (real or complex,
    general or symmetric)."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty Matrix Market input", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise ParseError(f"malformed header {lines[0]!r}", 1)
    _, obj, fmt, field, symmetry = (h.lower() for h in header)
    if obj != "matrix" or fmt != "coordinate":
        raise ParseError("only 'matrix coordinate' inputs are supported", 1)
    if field not in _MM_FIELDS:
        raise ParseError(f"unsupported field {field!r}", 1)
    if symmetry not in _MM_SYMMETRIES:
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1)

    body = [(k + 1, ln) for k, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError("missing size line", len(lines))
    size_lineno, size_line = body[0]
    fields = size_line.split()
    if len(fields) != 3:
        raise ParseError(f"size line must be 'rows cols nnz', got {size_line!r}",
                         size_lineno)
    try:
        nrows, ncols, nnz = (int(x) for x in fields)
    except ValueError:
        raise ParseError(f"non-integer size line {size_line!r}", size_lineno) from None

    entries = body[1:]
    if len(entries) != nnz:
        raise ParseError(
            f"header declares {nnz} nonzeros but {len(entries)} entries are present",
            size_lineno)
    want = {"real": 3, "integer": 3, "complex": 4, "pattern": 2}[field]
    rows, cols, vals = [], [], []
    for lineno, line in entries:
        fields = line.split()
        if len(fields) != want:
            raise ParseError(
                f"expected {want} fields for a {field} entry, got {line.strip()!r}",
                lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
            if field == "pattern":
                v = 1.0
            elif field == "complex":
                v = complex(float(fields[2]), float(fields[3]))
            else:
                v = float(fields[2])
        except ValueError:
            raise ParseError(f"malformed entry {line.strip()!r}", lineno) from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ParseError(f"entry ({i}, {j}) outside {nrows} x {ncols}", lineno)
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
        if symmetry == "symmetric" and i != j:
            rows.append(j - 1)
            cols.append(i - 1)
            vals.append(v)
    dtype = complex if field == "complex" else float
    out = sparse.csr_array((np.asarray(vals, dtype=dtype), (rows, cols)),
                           shape=(nrows, ncols))
    out.sum_duplicates()
    return out


def write_matrix_market(m) -> str:
    """Serialize a matrix in Matrix Market coordinate format (general)."""
    coo = sparse.coo_array(m)
    is_complex = np.iscomplexobj(coo.data)
    field = "complex" if is_complex else "real"
    order = np.lexsort((coo.col, coo.row))
    lines = [f"%%MatrixMarket matrix coordinate {field} general",
             f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    for k in order:
        i, j, v = coo.row[k] + 1, coo.col[k] + 1, coo.data[k]
        if is_complex:
            lines.append(f"{i} {j} {v.real!r} {v.imag!r}")
        else:
            lines.append(f"{i} {j} {v!r}")
    return "\n".join(lines) + "\n"
