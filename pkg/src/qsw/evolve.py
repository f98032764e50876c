"""Time evolution drivers.

``evolve`` propagates density matrices either with a generator (sparse
generators go through the Krylov exponential action, dense ones through the
full matrix exponential) or with a precomputed superoperator.  The closed
system shortcut conjugates with ``exp(-i h t)`` computed from the
eigendecomposition of the Hamiltonian, so only an n x n problem is solved
instead of the n^2 x n^2 one.
"""

from __future__ import annotations

import warnings

import numpy as np

from .expaction import KrylovConfig, expm_dense, expmv
from .linalg import density_defects, hermiticity_defect, is_sparse, res, to_dense, unres


def _check_state(rho, n, strict):
    if rho.shape != (n, n):
        raise ValueError(f"state of shape {rho.shape}, expected {(n, n)}")
    defects = density_defects(rho)
    if defects:
        message = "initial state is not a proper density matrix: " + "; ".join(defects)
        if strict:
            raise ValueError(message)
        warnings.warn(message, stacklevel=3)


def evolve(op, rho0, time=None, *, krylov: KrylovConfig | None = None,
           strict: bool = False):
    """Propagate a density matrix.

    - ``evolve(f, rho0, t)`` applies ``exp(t*f)`` to the vectorized state for
      a single nonnegative time ``t``.
    - ``evolve(f, rho0, tpoints)`` returns the list of states at each time.
    - ``evolve(u, rho0)`` applies a precomputed superoperator ``u`` directly.

    Sparse generators use the Krylov exponential action (configured by
    ``krylov``); dense ones use the full matrix exponential.  State
    validation is warn-level unless ``strict`` is set.
    """
    rho0 = np.asarray(to_dense(rho0), dtype=complex)
    big = op.shape[0]
    if op.shape[0] != op.shape[1]:
        raise ValueError("operator must be square")
    n = int(round(np.sqrt(big)))
    if n * n != big:
        raise ValueError(f"operator side {big} is not a perfect square")
    _check_state(rho0, n, strict)

    if time is None:
        return unres(to_dense(op) @ res(rho0) if not is_sparse(op) else op @ res(rho0))

    if np.ndim(time) == 0:
        return _evolve_single(op, rho0, float(time), krylov)

    tpoints = [float(t) for t in time]
    for t in tpoints:
        if t < 0:
            raise ValueError("time must be non-negative")
    if is_sparse(op):
        return [_evolve_single(op, rho0, t, krylov) for t in tpoints]
    return _evolve_dense_path(op, rho0, tpoints)


def _evolve_single(op, rho0, t, krylov):
    if t < 0:
        raise ValueError("time must be non-negative")
    v = res(rho0)
    if is_sparse(op):
        return unres(expmv(t, op, v, krylov))
    return unres(expm_dense(t * np.asarray(op, dtype=complex)) @ v)


def _evolve_dense_path(op, rho0, tpoints):
    """Walk the sorted time points, reusing one exponential per distinct gap."""
    f = np.asarray(op, dtype=complex)
    order = np.argsort(tpoints, kind="stable")
    cache = {}
    states = [None] * len(tpoints)
    v = res(rho0)
    current = 0.0
    for k in order:
        gap = tpoints[k] - current
        if gap > 0.0:
            u = cache.get(gap)
            if u is None:
                u = expm_dense(gap * f)
                cache[gap] = u
            v = u @ v
            current = tpoints[k]
        states[k] = unres(v)
    return states


def evolve_operator(f, t: float) -> np.ndarray:
    """Superoperator ``exp(t*f)`` for a dense generator."""
    if is_sparse(f):
        raise ValueError("evolve_operator works for dense generators only")
    if t < 0:
        raise ValueError("time must be non-negative")
    return expm_dense(t * np.asarray(f, dtype=complex))


def evolve_closed(h, rho0, t: float, *, strict: bool = False) -> np.ndarray:
    """Closed-system evolution ``exp(-i h t) rho exp(i h t)``."""
    hd = np.asarray(to_dense(h), dtype=complex)
    if hd.ndim != 2 or hd.shape[0] != hd.shape[1]:
        raise ValueError("Hamiltonian must be square")
    if hermiticity_defect(hd) > 1e-10:
        raise ValueError("Hamiltonian must be Hermitian")
    rho0 = np.asarray(to_dense(rho0), dtype=complex)
    _check_state(rho0, hd.shape[0], strict)
    w, vecs = np.linalg.eigh(hd)
    phases = np.exp(-1j * float(t) * w)
    u = (vecs * phases) @ vecs.conj().T
    return u @ rho0 @ u.conj().T
