"""Dense/sparse complex matrix primitives and Dirac-notation helpers.

Conventions shared by the whole package:

- A matrix is either a dense ``numpy.ndarray`` or a ``scipy.sparse`` matrix;
  the Python type itself is the dense/sparse storage tag, and it is preserved
  by arithmetic unless explicitly converted with :func:`to_dense` /
  :func:`to_sparse`.
- Basis indices in the public API are 1-based, so ``ket(1, n)`` is the first
  standard-basis vector.
- Vectorization is row-major: :func:`res` stacks the rows of a matrix left to
  right, top to bottom, so that ``res(A @ X @ B) == kron(A, B.T) @ res(X)``.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse


def is_sparse(m) -> bool:
    """True when ``m`` carries the sparse storage tag."""
    return sparse.issparse(m)


def to_dense(m) -> np.ndarray:
    """Dense copy of a matrix, preserving entries bit-exactly."""
    if sparse.issparse(m):
        return np.asarray(m.todense())
    return np.asarray(m)


def to_sparse(m):
    """CSR copy of a matrix, preserving entries bit-exactly."""
    if sparse.issparse(m):
        return sparse.csr_array(m)
    return sparse.csr_array(np.asarray(m))


def _check_index(index: int, size: int) -> None:
    if not 1 <= index <= size:
        raise ValueError(f"index {index} outside 1..{size}")


def ket(index: int, size: int) -> np.ndarray:
    """``index``-th standard-basis column vector (1-based) of length ``size``."""
    _check_index(index, size)
    v = np.zeros(size, dtype=complex)
    v[index - 1] = 1.0
    return v


def bra(index: int, size: int) -> np.ndarray:
    """Conjugate transpose of :func:`ket`, playing the row-covector role."""
    return ket(index, size).conj()


def ketbra(irow: int, icol: int, size: int) -> np.ndarray:
    """Matrix with a single 1 at (``irow``, ``icol``), both 1-based."""
    _check_index(irow, size)
    _check_index(icol, size)
    m = np.zeros((size, size), dtype=complex)
    m[irow - 1, icol - 1] = 1.0
    return m


def proj(arg, size: int | None = None) -> np.ndarray:
    """Projector ``|v><v|``.

    ``proj(i, n)`` projects onto the ``i``-th basis vector and equals
    ``ketbra(i, i, n)``; ``proj(v)`` builds the outer product of an arbitrary
    vector with itself (not normalized).
    """
    if size is not None:
        return ketbra(arg, arg, size)
    v = np.asarray(to_dense(arg), dtype=complex).ravel()
    return np.outer(v, v.conj())


def res(m) -> np.ndarray:
    """Row-order vectorization of a matrix (rows stacked left to right)."""
    a = to_dense(m)
    if a.ndim != 2:
        raise ValueError("res expects a matrix")
    return np.asarray(a, dtype=complex).ravel()


def unres(v) -> np.ndarray:
    """Inverse of :func:`res`; the vector length must be a perfect square."""
    a = np.asarray(to_dense(v), dtype=complex).ravel()
    n = int(round(np.sqrt(a.size)))
    if n * n != a.size:
        raise ValueError(f"vector of length {a.size} is not a vectorized square matrix")
    return a.reshape(n, n).copy()


def fourier_matrix(dim: int) -> np.ndarray:
    """Unnormalized Fourier matrix, entry (j, k) = exp(2i pi (j-1)(k-1)/dim).

    Columns are pairwise orthogonal with squared norm ``dim``.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    j = np.arange(dim)
    prod = np.outer(j, j) % dim
    out = np.exp(2j * np.pi * prod / dim)
    # exact values at quarter turns, so e.g. fourier_matrix(2) is exactly
    # [[1, 1], [1, -1]] with no floating sine residue
    quarter, rem = np.divmod(4 * prod, dim)
    table = np.array([1.0, 1.0j, -1.0, -1.0j])
    exact = rem == 0
    out[exact] = table[quarter[exact] % 4]
    return out


def hermiticity_defect(m) -> float:
    """Max-abs deviation of a matrix from its conjugate transpose."""
    if sparse.issparse(m):
        d = m - m.conj().T
        return float(np.max(np.abs(d.toarray()))) if d.shape[0] else 0.0
    a = np.asarray(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(m, tol: float = 1e-10) -> bool:
    return hermiticity_defect(m) <= tol


def density_defects(
    rho,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    eig_floor: float = -1e-8,
) -> list[str]:
    """Violations of the density-matrix invariants, as human-readable strings.

    Checks Hermiticity (max-abs of rho - rho^dag), unit trace, and
    positive semidefiniteness of the Hermitian part.
    """
    a = to_dense(rho)
    defects = []
    h = hermiticity_defect(a)
    if h > herm_tol:
        defects.append(f"not Hermitian: max |rho - rho^dag| = {h:.3e}")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > trace_tol:
        defects.append(f"trace {tr:.12g} differs from 1 by {abs(tr - 1.0):.3e}")
    w = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    if w.size and w.min() < eig_floor:
        defects.append(f"negative eigenvalue {w.min():.3e}")
    return defects
