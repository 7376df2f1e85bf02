"""Grade-diagonal Hamiltonian blocks H_f = Q_{f-1} Q_{f-1}^T + Q_f^T Q_f."""

from __future__ import annotations

import numpy as np

from .couplings import CouplingScheme
from .linalg import certified_nullity
from .matrix import SparseRationalMatrix
from .state_space import ChainSpec, ResourceError, enumerate_basis
from .supercharge import q_block

DEFAULT_TOL = 1e-9
MAX_DENSE_DIM = 4000


def build_h(spec: ChainSpec, scheme: CouplingScheme, f: int) -> SparseRationalMatrix:
    basis = enumerate_basis(spec)
    if not 0 <= f <= basis.f_max:
        raise ValueError(f"grade {f} outside [0, {basis.f_max}]")
    down = q_block(spec, scheme, f - 1)
    up = q_block(spec, scheme, f)
    return down @ down.T + up.T @ up


def eigenvalues(h: SparseRationalMatrix, max_dim: int = MAX_DENSE_DIM) -> np.ndarray:
    if h.n_rows != h.n_cols:
        raise ValueError("Hamiltonian block must be square")
    if h.n_rows > max_dim:
        raise ResourceError(f"block of dimension {h.n_rows} exceeds dense limit {max_dim}")
    if h.n_rows == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(h.to_numpy())


def numeric_zero_modes(h: SparseRationalMatrix, tol: float = DEFAULT_TOL, max_dim: int = MAX_DENSE_DIM) -> int:
    """Eigenvalues with |E| < tol in double precision."""
    return int(np.sum(np.abs(eigenvalues(h, max_dim)) < tol))


def kernel_dimension(spec: ChainSpec, scheme: CouplingScheme, f: int) -> int:
    """Exact dim ker H_f (see :func:`mell.linalg.certified_nullity`)."""
    return certified_nullity(build_h(spec, scheme, f))
