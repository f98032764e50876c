"""Matrix exponential engines.

Two routes are provided, dispatched elsewhere on the storage tag of the
operator:

- :func:`expm_dense` computes the full exponential of a dense matrix with
  diagonal Pade approximants and the standard scaling-and-squaring schedule
  (orders 3/5/7/9/13 selected by 1-norm thresholds).
- :func:`expmv` approximates the action ``exp(t*A) @ v`` without forming
  ``exp(t*A)``, using an Arnoldi-projected Krylov subspace with adaptive
  internal time substepping and a posteriori error control, in the style of
  the classic expv scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import blas

from .errors import NumericalError

_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# 1-norm thresholds for the Pade order selection
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068,
    13: 5.371920351148152,
}


def _pade(a: np.ndarray, order: int) -> np.ndarray:
    n = a.shape[0]
    c = _PADE_COEFFS[order]
    ident = np.eye(n, dtype=a.dtype)
    if order < 13:
        pows = [ident, a @ a]
        for _ in range(2, (order + 1) // 2):
            pows.append(pows[-1] @ pows[1])
        u = np.zeros_like(a)
        v = np.zeros_like(a)
        for j in range(order, 0, -2):
            u += c[j] * pows[j // 2]
        u = a @ u
        for j in range(order - 1, -1, -2):
            v += c[j] * pows[(j + 1) // 2]
    else:
        a2 = a @ a
        a4 = a2 @ a2
        a6 = a2 @ a4
        u = a @ (a6 @ (c[13] * a6 + c[11] * a4 + c[9] * a2)
                 + c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * ident)
        v = (a6 @ (c[12] * a6 + c[10] * a4 + c[8] * a2)
             + c[6] * a6 + c[4] * a4 + c[2] * a2 + c[0] * ident)
    return np.linalg.solve(v - u, v + u)


def expm_dense(m) -> np.ndarray:
    """Matrix exponential of a dense square matrix.

    Uses diagonal Pade approximation with scaling and squaring; the order and
    the number of squarings are chosen from the matrix 1-norm.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm_dense expects a square matrix")
    if a.size == 0:
        return a.copy()
    if not np.all(np.isfinite(a)):
        raise ValueError("expm_dense requires finite entries")
    norm1 = float(np.abs(a).sum(axis=0).max())
    if norm1 <= _THETA[13]:
        for order in (3, 5, 7, 9, 13):
            if norm1 <= _THETA[order]:
                return _pade(a, order)
    s = max(0, int(math.ceil(math.log2(norm1 / _THETA[13]))))
    f = _pade(a / (2.0 ** s), 13)
    for _ in range(s):
        f = f @ f
    return f


@dataclass(frozen=True)
class KrylovConfig:
    """Parameters of the Krylov exponential action.

    ``subspace_dim`` is the Arnoldi basis size, ``tolerance`` bounds the
    local error per unit time, and ``max_step_halvings`` caps the number of
    consecutive step-size reductions before giving up.
    """

    subspace_dim: int = 30
    tolerance: float = 1e-7
    max_step_halvings: int = 10

    def __post_init__(self):
        if self.subspace_dim < 1:
            raise ValueError("subspace_dim must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_step_halvings < 1:
            raise ValueError("max_step_halvings must be >= 1")


def _inf_norm(a) -> float:
    """Infinity norm (max absolute row sum), memory-lean for CSR input."""
    if sparse.issparse(a):
        if a.format != "csr":
            a = sparse.csr_array(a)
        if a.nnz == 0:
            return 0.0
        # prefix sums of |data| give row sums without a per-row Python loop
        acc = np.empty(a.nnz + 1, dtype=float)
        acc[0] = 0.0
        np.abs(a.data, out=acc[1:])
        np.cumsum(acc[1:], out=acc[1:])
        rows = acc[a.indptr[1:]] - acc[a.indptr[:-1]]
        return float(rows.max())
    return float(np.abs(np.asarray(a)).sum(axis=1).max())


def _round_step(tau: float) -> float:
    # round up to 2 significant digits for reproducible step sizes
    if tau <= 0 or not math.isfinite(tau):
        return tau
    s = 10.0 ** (math.floor(math.log10(tau)) - 1)
    return math.ceil(tau / s) * s


def expmv(t: float, a, v, cfg: KrylovConfig | None = None) -> np.ndarray:
    """Approximate ``exp(t*a) @ v`` via the Arnoldi-projected Krylov subspace.

    The time interval is covered with adaptive substeps; each substep is
    accepted only when the a posteriori local error estimate stays below
    ``cfg.tolerance`` per unit time.  A happy breakdown (the subspace closes
    early) yields the exact result on the closed subspace.

    Raises :class:`~qsw.errors.NumericalError` when a substep fails to
    converge after ``cfg.max_step_halvings`` consecutive rejections.
    """
    cfg = cfg or KrylovConfig()
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    w = np.asarray(v, dtype=complex).ravel().copy()
    if w.size != n:
        raise ValueError(f"vector length {w.size} does not match matrix dim {n}")
    beta = float(np.linalg.norm(w))
    if t == 0.0 or beta == 0.0:
        return w
    anorm = _inf_norm(a)
    if anorm == 0.0:
        return w

    m = min(cfg.subspace_dim, n)
    tol = cfg.tolerance
    gamma, delta = 0.9, 1.2
    rndoff = anorm * np.finfo(float).eps
    btol = max(anorm * 1e-13, 1e-300)
    sgn = 1.0 if t > 0 else -1.0
    t_out = abs(t)
    t_now = 0.0

    xm = 1.0 / m
    fact = ((m + 1) / math.e) ** (m + 1) * math.sqrt(2.0 * math.pi * (m + 1))
    tau = _round_step((1.0 / anorm) * ((fact * tol) / (4.0 * beta * anorm)) ** xm)

    vbasis = np.empty((m + 1, n), dtype=complex)
    hess = np.empty((m + 2, m + 2), dtype=complex)

    while t_now < t_out:
        tau = min(t_out - t_now, tau)
        hess[:] = 0.0
        np.multiply(w, 1.0 / beta, out=vbasis[0])
        happy = False
        mb = m
        k1 = 2
        avnorm = 0.0
        for j in range(m):
            p = a @ vbasis[j]
            # modified Gram-Schmidt against the current basis, in place
            for i in range(j + 1):
                hij = np.vdot(vbasis[i], p)
                hess[i, j] = hij
                p = blas.zaxpy(vbasis[i], p, a=-hij)
            s = float(np.linalg.norm(p))
            if s < btol:
                happy = True
                k1 = 0
                mb = j + 1
                tau = t_out - t_now
                break
            hess[j + 1, j] = s
            np.multiply(p, 1.0 / s, out=vbasis[j + 1])
        if not happy:
            hess[m + 1, m] = 1.0
            avnorm = float(np.linalg.norm(a @ vbasis[m]))

        ireject = 0
        while True:
            mx = mb + k1
            fsmall = expm_dense(sgn * tau * hess[:mx, :mx])
            if k1 == 0:
                err_loc = btol
                break
            phi1 = abs(beta * fsmall[m, 0])
            phi2 = abs(beta * fsmall[m + 1, 0]) * avnorm
            if phi1 > 10.0 * phi2:
                err_loc = phi2
                xm = 1.0 / m
            elif phi1 > phi2:
                err_loc = (phi1 * phi2) / (phi1 - phi2)
                xm = 1.0 / m
            else:
                err_loc = phi1
                xm = 1.0 / (m - 1) if m > 1 else 1.0
            if err_loc <= delta * tau * tol:
                break
            ireject += 1
            if ireject >= cfg.max_step_halvings:
                raise NumericalError(
                    "expmv failed to converge: "
                    f"t_done={t_now:.6g}/{t_out:.6g}, step={tau:.3e}, "
                    f"local error estimate={err_loc:.3e}, "
                    f"subspace_dim={m}, rejections={ireject}"
                )
            tau = _round_step(gamma * tau * (tau * tol / err_loc) ** xm)

        mx = mb + max(0, k1 - 1)
        w = (beta * fsmall[:mx, 0]) @ vbasis[:mx]
        beta = float(np.linalg.norm(w))
        t_now += tau
        err_loc = max(err_loc, rndoff)
        tau = _round_step(gamma * tau * (tau * tol / err_loc) ** xm)
        if beta == 0.0:
            break

    return w
