"""Construction of GKSL evolution generators from graph operators.

Under the row-major vectorization used throughout the package,
``vec(A @ X @ B) = kron(A, B.T) @ vec(X)``, so the master equation with
Hamiltonian ``h``, Lindblad collection ``ls`` and optional local Hamiltonian
``local_h`` has the generator (acting on vectorized density matrices)

    F = alpha * (-1i) * (h (x) I - I (x) conj(h))
        + beta * [ (-1i) * (local_h (x) I - I (x) conj(local_h))
                   + sum_L ( L (x) conj(L)
                             - (L^d L (x) I + I (x) (L^d L)^T) / 2 ) ]

with ``(alpha, beta) = (1 - omega, omega)`` when the smoothing parameter is
given, and ``(1, 1)`` otherwise.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .linalg import hermiticity_defect, is_sparse, to_dense

_HERM_TOL = 1e-10


def local_lind(a, epsilon: float | None = None) -> list:
    """Split a matrix into single-entry sparse Lindblad operators.

    One operator is produced per entry of ``a`` whose modulus is at least
    ``epsilon`` (machine epsilon by default), carrying that entry's value at
    its position.  This realizes the local-interaction Lindblad set with one
    operator per arc.
    """
    if epsilon is None:
        epsilon = float(np.finfo(float).eps)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    n, mcols = a.shape
    if n != mcols:
        raise ValueError("local_lind expects a square matrix")
    if is_sparse(a):
        coo = sparse.coo_array(a)
        order = np.lexsort((coo.col, coo.row))
        rows, cols, vals = coo.row[order], coo.col[order], coo.data[order]
    else:
        dense = np.asarray(a)
        rows, cols = np.nonzero(dense)
        vals = dense[rows, cols]
    out = []
    for i, j, v in zip(rows, cols, vals):
        if abs(v) >= epsilon:
            out.append(sparse.csr_array(
                ([complex(v)], ([int(i)], [int(j)])), shape=(n, n), dtype=complex))
    return out


def _as_csr(m) -> sparse.csr_array:
    return sparse.csr_array(sparse.csr_array(m), dtype=complex)


_CHUNK_ENTRIES = 4_000_000


def _kron_terms_to_csr(terms, diag: np.ndarray | None, nn: int) -> sparse.csr_array:
    """Assemble ``sum_k kron(A_k, B_k) (+ diag)`` directly in CSR form.

    Entries are written straight into preallocated CSR arrays, batching the
    rows of each left factor by equal nonzero count, so the peak memory stays
    close to the final matrix size even for superoperators with 1e8
    nonzeros.  ``diag``, when given, is a dense main-diagonal contribution;
    duplicate positions across terms are merged at the end.
    """
    big = nn * nn
    counts = np.zeros(big, dtype=np.int64)
    prepared = []
    for alpha, a, b in terms:
        a = _as_csr(a)
        b = _as_csr(b)
        ca = np.diff(a.indptr).astype(np.int64)
        cb = np.diff(b.indptr).astype(np.int64)
        counts += np.multiply.outer(ca, cb).ravel()
        prepared.append((complex(alpha), a, b, ca, cb))
    dmask = None
    if diag is not None:
        dmask = diag != 0
        counts += dmask

    nnz = int(counts.sum())
    idx_dtype = np.int32 if max(big, nnz) <= np.iinfo(np.int32).max else np.int64
    indptr = np.zeros(big + 1, dtype=idx_dtype)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(nnz, dtype=idx_dtype)
    data = np.empty(nnz, dtype=np.complex128)
    fill = indptr[:-1].astype(np.int64)

    if dmask is not None:
        where = np.flatnonzero(dmask)
        pos = fill[where]
        indices[pos] = where
        data[pos] = diag[where]
        fill[where] += 1

    subrow = np.arange(nn, dtype=np.int64)
    for alpha, a, b, ca, cb in prepared:
        if a.nnz == 0 or b.nnz == 0:
            continue
        bd = alpha * b.data
        bi = b.indices.astype(np.int64)
        nnzb = bd.size
        for c in np.unique(ca[ca > 0]):
            rows_c = np.flatnonzero(ca == c)
            c = int(c)
            # gather the batch's A entries as (rows, c) blocks
            take = a.indptr[rows_c][:, None] + np.arange(c)[None, :]
            va = a.data[take]
            ja = a.indices[take].astype(np.int64) * nn
            # one strip covers output rows (i, 0..nn-1); entries are grouped
            # by B row, with the c A-slots innermost (any in-row col order
            # is valid CSR)
            runs = c * cb
            within = np.arange(c * nnzb, dtype=np.int64)
            within -= np.repeat(np.concatenate(([0], np.cumsum(runs[:-1]))), runs)
            per_strip = c * nnzb
            step = max(1, _CHUNK_ENTRIES // per_strip)
            for s in range(0, rows_c.size, step):
                ri = rows_c[s:s + step]
                dchunk = (bd[None, :, None] * va[s:s + step][:, None, :]).ravel()
                cchunk = (bi[None, :, None] + ja[s:s + step][:, None, :]).ravel()
                rowidx = ri[:, None] * nn + subrow[None, :]
                starts = fill[rowidx]
                dest = np.repeat(starts.ravel(), np.tile(runs, ri.size))
                dest += np.tile(within, ri.size)
                data[dest] = dchunk
                indices[dest] = cchunk
                fill[rowidx] += runs[None, :]
    out = sparse.csr_array((data, indices, indptr), shape=(big, big))
    out.sum_duplicates()
    return out


def evolve_generator(h, ls=(), local_h=None, omega: float | None = None):
    """Evolution generator ``F`` on vectorized states (size n^2 x n^2).

    ``h`` is the Hamiltonian, ``ls`` an iterable of Lindblad operators,
    ``local_h`` an optional local Hamiltonian entering the dissipative part,
    and ``omega`` the smoothing parameter in [0, 1] weighting the coherent
    part by ``1 - omega`` and the dissipative part by ``omega``; with
    ``omega`` absent both weights are 1.

    The output carries the sparse storage tag exactly when every input
    operator is sparse.
    """
    ls = list(ls)
    n, ncols = h.shape
    if n != ncols:
        raise ValueError("Hamiltonian must be square")
    for ell in ls:
        if ell.shape != (n, n):
            raise ValueError(f"Lindblad operator of shape {ell.shape}, expected {(n, n)}")
    if local_h is not None and local_h.shape != (n, n):
        raise ValueError(f"local Hamiltonian of shape {local_h.shape}, expected {(n, n)}")
    if omega is not None and not 0.0 <= omega <= 1.0:
        raise ValueError("omega must lie in [0, 1]")
    if hermiticity_defect(h) > _HERM_TOL:
        raise ValueError("Hamiltonian must be Hermitian")
    if local_h is not None and hermiticity_defect(local_h) > _HERM_TOL:
        raise ValueError("local Hamiltonian must be Hermitian")

    alpha, beta = (1.0 - omega, omega) if omega is not None else (1.0, 1.0)
    all_sparse = is_sparse(h) and all(is_sparse(ell) for ell in ls) \
        and (local_h is None or is_sparse(local_h))

    if not all_sparse:
        return _dense_generator(h, ls, local_h, alpha, beta, n)

    # left/right one-sided parts are combined before taking Kronecker
    # products, keeping the term count (and assembly memory) low
    left = -1j * alpha * _as_csr(h)
    right = 1j * alpha * _as_csr(h).conj()
    if local_h is not None and beta != 0.0:
        lh = _as_csr(local_h)
        left = left - 1j * beta * lh
        right = right + 1j * beta * lh.conj()
    if beta != 0.0:
        for ell in ls:
            ell = _as_csr(ell)
            gram = sparse.csr_array((ell.conj().T @ ell), dtype=complex)
            left = left - 0.5 * beta * gram
            right = right - 0.5 * beta * gram.T

    eye = sparse.eye_array(n, dtype=complex, format="csr")
    dl = left.diagonal()
    dr = right.diagonal()
    left_off = left - sparse.diags_array(dl, format="csr")
    right_off = right - sparse.diags_array(dr, format="csr")
    left_off.eliminate_zeros()
    right_off.eliminate_zeros()
    diag = np.add.outer(dl, dr).ravel()

    terms = [(1.0, left_off, eye), (1.0, eye, right_off)]
    if beta != 0.0:
        for ell in ls:
            ell = _as_csr(ell)
            terms.append((beta, ell, ell.conj()))
    return _kron_terms_to_csr(terms, diag, n)


def _dense_generator(h, ls, local_h, alpha, beta, n):
    hd = np.asarray(to_dense(h), dtype=complex)
    eye = np.eye(n, dtype=complex)
    left = -1j * alpha * hd
    right = 1j * alpha * hd.conj()
    if local_h is not None and beta != 0.0:
        lh = np.asarray(to_dense(local_h), dtype=complex)
        left = left - 1j * beta * lh
        right = right + 1j * beta * lh.conj()
    f = np.kron(left, eye) + np.kron(eye, right)
    if beta != 0.0:
        for ell in ls:
            ld = np.asarray(to_dense(ell), dtype=complex)
            gram = ld.conj().T @ ld
            f += beta * (np.kron(ld, ld.conj())
                         - 0.5 * (np.kron(gram, eye) + np.kron(eye, gram.T)))
    return f
