"""Nonmoralizing correction: vertex-subspace bookkeeping and the corrected
Lindblad, global-Hamiltonian, local-Hamiltonian, initial-state and
measurement constructions on the enlarged space.

Each vertex of the input graph receives one copy per nonzero entry of its
matrix row (at least one), and the enlarged canonical basis is partitioned
into the per-vertex subspaces described by :class:`VertexSet`.  The corrected
Lindblad routes the amplitude from an in-neighbor through one column of an
orthogonal-column matrix attached to the receiving vertex (a Fourier matrix
by default), which removes the spurious couplings between parents of a
common child.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .linalg import fourier_matrix, hermiticity_defect, is_sparse, to_dense

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Vertex:
    """Labels (1-based, contiguous, ascending) of one vertex's subspace."""

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ValueError("a vertex needs at least one label")
        if any(b != a + 1 for a, b in zip(labels, labels[1:])):
            raise ValueError("vertex labels must be contiguous and ascending")
        if labels[0] < 1:
            raise ValueError("labels are 1-based")
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    @property
    def indices(self) -> np.ndarray:
        """0-based numpy indices of the subspace."""
        return np.asarray(self.labels, dtype=int) - 1


@dataclass(frozen=True)
class VertexSet:
    """Ordered partition of the enlarged basis into vertex subspaces."""

    vertices: tuple[Vertex, ...]

    def __post_init__(self):
        vertices = tuple(self.vertices)
        seen = []
        for v in vertices:
            seen.extend(v.labels)
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise ValueError("vertex labels must partition 1..size without gaps")
        object.__setattr__(self, "vertices", vertices)

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i) -> Vertex:
        return self.vertices[i]

    def __iter__(self):
        return iter(self.vertices)


def vertexsetsize(vs: VertexSet) -> int:
    """Total number of labels, i.e. the dimension of the enlarged space."""
    return sum(len(v) for v in vs)


def _dense_square(a) -> np.ndarray:
    m = np.asarray(to_dense(a))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return m


def make_vertex_set(a, epsilon: float | None = None) -> VertexSet:
    """Partition derived from a matrix: vertex ``i`` gets one copy per entry
    of row ``i`` with modulus at least ``epsilon`` (one copy minimum)."""
    if epsilon is None:
        epsilon = float(np.finfo(float).eps)
    m = _dense_square(a)
    degrees = (np.abs(m) >= epsilon).sum(axis=1)
    degrees = np.maximum(degrees, 1)
    vertices = []
    start = 1
    for d in degrees:
        vertices.append(Vertex(tuple(range(start, start + int(d)))))
        start += int(d)
    return VertexSet(tuple(vertices))


def _vertex_key_lookup(mapping, vertex: Vertex, what: str):
    """Resolve a user dictionary keyed either by Vertex or by subspace size."""
    if vertex in mapping:
        return mapping[vertex]
    d = len(vertex)
    if d in mapping:
        return mapping[d]
    raise ValueError(f"no {what} supplied for vertex {vertex.labels} (dimension {d})")


def _check_orthogonal_columns(mat: np.ndarray, d: int) -> np.ndarray:
    mat = np.asarray(to_dense(mat), dtype=complex)
    if mat.shape != (d, d):
        raise ValueError(f"elementary matrix of shape {mat.shape}, expected {(d, d)}")
    gram = mat.conj().T @ mat
    off = gram - np.diag(np.diag(gram))
    scale = max(1.0, float(np.abs(gram).max()))
    if np.abs(off).max() > _ORTHO_TOL * scale:
        raise ValueError("elementary matrix must have pairwise orthogonal columns")
    return mat


def nm_lind(a, linds: dict | None = None, epsilon: float | None = None):
    """Corrected Lindblad operator on the enlarged space, with its VertexSet.

    The block sending vertex ``v_j`` into vertex ``v_i`` (present when
    ``|a[i, j]| >= epsilon``) has every column equal to ``a[i, j]`` times the
    column of the elementary matrix of ``v_i`` indexed by the position of
    ``j`` among the in-neighbors of ``i`` in increasing vertex order.
    ``linds`` optionally maps a subspace dimension or a :class:`Vertex` to an
    elementary matrix with pairwise orthogonal columns; Fourier matrices are
    used by default.
    """
    if epsilon is None:
        epsilon = float(np.finfo(float).eps)
    m = _dense_square(a)
    vs = make_vertex_set(m, epsilon)
    size = vertexsetsize(vs)
    out = np.zeros((size, size), dtype=complex)
    for i, vi in enumerate(vs):
        nbrs = np.flatnonzero(np.abs(m[i, :]) >= epsilon)
        if nbrs.size == 0:
            continue
        d = len(vi)
        if linds is None:
            elem = fourier_matrix(d)
        else:
            elem = _check_orthogonal_columns(_vertex_key_lookup(linds, vi, "elementary matrix"), d)
        rows = vi.indices
        for pos, j in enumerate(nbrs):
            col = m[i, j] * elem[:, pos]
            out[np.ix_(rows, vs[j].indices)] = col[:, None]
    result = sparse.csr_array(out) if is_sparse(a) else out
    return result, vs


def nm_glob_ham(a, hams: dict | None = None, epsilon: float | None = None):
    """Global Hamiltonian of the correction scheme on the enlarged space.

    ``a`` must be Hermitian; for every pair ``i < j`` with
    ``|a[i, j]| >= epsilon`` the (v_i, v_j) block is ``a[i, j]`` times a
    chosen submatrix (all ones by default) and the (v_j, v_i) block is its
    conjugate transpose.  ``hams`` optionally maps a ``(dim_i, dim_j)`` tuple
    or a ``(Vertex, Vertex)`` tuple to the submatrix.
    """
    if epsilon is None:
        epsilon = float(np.finfo(float).eps)
    m = _dense_square(a)
    if hermiticity_defect(m) > 1e-10:
        raise ValueError("nm_glob_ham expects a symmetric (Hermitian) matrix")
    vs = make_vertex_set(m, epsilon)
    size = vertexsetsize(vs)
    out = np.zeros((size, size), dtype=complex)
    n = m.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if abs(m[i, j]) < epsilon:
                continue
            vi, vj = vs[i], vs[j]
            di, dj = len(vi), len(vj)
            if hams is None:
                block = np.ones((di, dj), dtype=complex)
            else:
                if (vi, vj) in hams:
                    block = np.asarray(to_dense(hams[(vi, vj)]), dtype=complex)
                elif (di, dj) in hams:
                    block = np.asarray(to_dense(hams[(di, dj)]), dtype=complex)
                else:
                    raise ValueError(
                        f"no submatrix supplied for vertex pair ({i + 1}, {j + 1}) "
                        f"of dimensions ({di}, {dj})")
                if block.shape != (di, dj):
                    raise ValueError(
                        f"submatrix of shape {block.shape}, expected {(di, dj)}")
            out[np.ix_(vi.indices, vj.indices)] = m[i, j] * block
            out[np.ix_(vj.indices, vi.indices)] = np.conj(m[i, j]) * block.conj().T
    return sparse.csr_array(out) if is_sparse(a) else out


def default_nm_loc_ham(size: int) -> np.ndarray:
    """Default local-Hamiltonian block: +1i on the first superdiagonal and
    -1i on the first subdiagonal (the zero matrix for size 1)."""
    if size < 1:
        raise ValueError("size must be positive")
    out = np.zeros((size, size), dtype=complex)
    idx = np.arange(size - 1)
    out[idx, idx + 1] = 1j
    out[idx + 1, idx] = -1j
    return out


def nm_loc_ham(vs: VertexSet, hams: dict | None = None) -> np.ndarray:
    """Block-diagonal Hermitian operator acting inside each vertex subspace."""
    size = vertexsetsize(vs)
    out = np.zeros((size, size), dtype=complex)
    for v in vs:
        d = len(v)
        if hams is None:
            block = default_nm_loc_ham(d)
        else:
            block = np.asarray(to_dense(_vertex_key_lookup(hams, v, "local block")),
                               dtype=complex)
            if block.shape != (d, d):
                raise ValueError(f"local block of shape {block.shape}, expected {(d, d)}")
            if hermiticity_defect(block) > 1e-10:
                raise ValueError("local blocks must be Hermitian")
        out[np.ix_(v.indices, v.indices)] = block
    return out


def nm_init(init, vs: VertexSet) -> np.ndarray:
    """Initial density matrix on the enlarged space.

    With a :class:`Vertex` (or list of vertices), each chosen vertex gets the
    uniform block ``I_d / (d * k)`` so that all chosen vertices carry equal
    probability ``1/k``.  With a dict mapping vertices to nonnegative blocks,
    the blocks are placed as given and their traces must sum to one.
    """
    size = vertexsetsize(vs)
    out = np.zeros((size, size), dtype=complex)
    known = set(vs.vertices)
    if isinstance(init, Vertex):
        init = [init]
    if isinstance(init, dict):
        total = 0.0
        for v, block in init.items():
            if v not in known:
                raise ValueError(f"vertex {getattr(v, 'labels', v)} not in the vertex set")
            d = len(v)
            b = np.asarray(to_dense(block), dtype=complex)
            if b.shape != (d, d):
                raise ValueError(f"block of shape {b.shape}, expected {(d, d)}")
            w = np.linalg.eigvalsh((b + b.conj().T) / 2.0)
            if w.size and w.min() < -1e-10:
                raise ValueError("initial blocks must be nonnegative definite")
            out[np.ix_(v.indices, v.indices)] = b
            total += float(np.trace(b).real)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"block traces sum to {total!r}, expected 1")
        return out
    chosen = list(init)
    if not chosen:
        raise ValueError("at least one vertex must be chosen")
    k = len(chosen)
    for v in chosen:
        if v not in known:
            raise ValueError(f"vertex {getattr(v, 'labels', v)} not in the vertex set")
        d = len(v)
        out[v.indices, v.indices] = 1.0 / (d * k)
    return out


def nm_measurement(state, vs: VertexSet):
    """Vertex probabilities of a state on the enlarged space.

    For a density matrix the probability of vertex ``v`` is the real part of
    the sum of the diagonal over the labels of ``v``; a plain probability
    vector is summed per vertex the same way.
    """
    from .analysis import MeasurementDistribution

    size = vertexsetsize(vs)
    arr = to_dense(state)
    if arr.ndim == 2:
        if arr.shape != (size, size):
            raise ValueError(f"state of shape {arr.shape}, expected {(size, size)}")
        diag = np.diagonal(arr)
    elif arr.ndim == 1:
        if arr.size != size:
            raise ValueError(f"vector of length {arr.size}, expected {size}")
        diag = arr
    else:
        raise ValueError("state must be a matrix or a vector")
    probs = np.array([complex(diag[v.indices].sum()) for v in vs])
    return MeasurementDistribution.from_complex(probs)
