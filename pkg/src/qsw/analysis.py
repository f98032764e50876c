"""Spectral analysis of generators and statistics of vertex distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStationaryError, ResourceLimitError
from .linalg import to_dense, unres

_IMAG_RESIDUE = 1e-8


@dataclass(frozen=True)
class MeasurementDistribution:
    """Real probability vector over vertices, with optional lattice positions.

    ``positions`` holds integer site offsets (needed for moments); entries of
    ``probs`` keep their sign, so tiny negative numerical residues remain
    visible.
    """

    probs: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if self.positions is not None:
            positions = np.asarray(self.positions)
            if positions.shape != probs.shape:
                raise ValueError("positions must match probs in length")
            object.__setattr__(self, "positions", positions)

    @classmethod
    def from_complex(cls, values, positions=None) -> "MeasurementDistribution":
        values = np.asarray(values, dtype=complex)
        residue = float(np.abs(values.imag).max()) if values.size else 0.0
        if residue > _IMAG_RESIDUE:
            raise ValueError(f"imaginary residue {residue:.3e} exceeds {_IMAG_RESIDUE}")
        return cls(values.real.copy(), positions)

    def with_positions(self, positions) -> "MeasurementDistribution":
        return MeasurementDistribution(self.probs, positions)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __len__(self):
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)


def canonical_measurement(state, positions=None) -> MeasurementDistribution:
    """Diagonal of a density matrix as a vertex distribution."""
    diag = np.diagonal(np.asarray(to_dense(state), dtype=complex))
    return MeasurementDistribution.from_complex(diag, positions)


def null_dim(f, tol: float = 1e-5, max_dim: int = 4096) -> int:
    """Number of eigenvalues of the generator with modulus below ``tol``.

    The generator is converted to dense for a full eigendecomposition, so the
    side length is capped at ``max_dim``.
    """
    big = f.shape[0]
    if big > max_dim:
        raise ResourceLimitError(
            f"generator side {big} exceeds the dense eigendecomposition cap "
            f"{max_dim}")
    w = np.linalg.eigvals(np.asarray(to_dense(f), dtype=complex))
    return int(np.count_nonzero(np.abs(w) < tol))


def stationary_state(f, tol: float = 1e-5, max_dim: int = 4096) -> np.ndarray:
    """Unique trace-one Hermitian state spanning the generator null space.

    Raises :class:`~qsw.errors.DegenerateStationaryError` when the null space
    dimension differs from one.
    """
    big = f.shape[0]
    if big > max_dim:
        raise ResourceLimitError(
            f"generator side {big} exceeds the dense eigendecomposition cap "
            f"{max_dim}")
    fd = np.asarray(to_dense(f), dtype=complex)
    w, vecs = np.linalg.eig(fd)
    null = np.flatnonzero(np.abs(w) < tol)
    if null.size != 1:
        raise DegenerateStationaryError(int(null.size))
    rho = unres(vecs[:, null[0]])
    rho = (rho + rho.conj().T) / 2.0
    tr = float(np.trace(rho).real)
    if abs(tr) < 1e-12:
        raise DegenerateStationaryError(1)
    return rho / tr


def moment(dist: MeasurementDistribution, order: int, central: bool = False) -> float:
    """Moment ``sum_i (x_i - c)^order p_i`` of a distribution with positions.

    ``c`` is the mean when ``central`` is set and zero otherwise.
    """
    if dist.positions is None:
        raise ValueError("moment requires a distribution with positions")
    if order < 1:
        raise ValueError("order must be >= 1")
    x = np.asarray(dist.positions, dtype=float)
    p = dist.probs
    c = float(np.sum(x * p)) if central else 0.0
    return float(np.sum((x - c) ** order * p))


def ballistic_exponent(times, second_moments) -> float:
    """Log-log slope of the second moment over the trailing half of samples."""
    t = np.asarray(times, dtype=float)
    m2 = np.asarray(second_moments, dtype=float)
    if t.size != m2.size or t.size < 5:
        raise ValueError("need at least 5 (time, moment) pairs")
    if np.any(t <= 0) or np.any(m2 <= 0):
        raise ValueError("times and moments must be positive")
    order = np.argsort(t)
    t, m2 = t[order], m2[order]
    tail = (t.size + 1) // 2
    slope = np.polyfit(np.log(t[-tail:]), np.log(m2[-tail:]), 1)[0]
    return float(slope)
