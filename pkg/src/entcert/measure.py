"""Joint outcome statistics of local measurements and simulated coincidence counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import BasisPair
from .errors import DimensionError, EmptyDataError, NumericalError, ShapeError
from .qcore import DensityMatrix

NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-10
IMAG_TOL = 1e-10

# 800 coincidences/s over a 10 s integration
DEFAULT_N_TOTAL = 8000


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class JointProbTable:
    """``cells[a, b]`` = probability of outcome a on system 1 and b on system 2."""

    cells: np.ndarray
    labels: tuple[str, str] = ("", "")

    def __post_init__(self) -> None:
        c = np.asarray(self.cells, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ShapeError(f"joint table must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NumericalError("joint table contains NaN or Inf")
        if c.min() < -NEGATIVE_TOL:
            raise NumericalError(f"joint table has a negative cell {c.min():.3g}")
        c = np.clip(c, 0.0, None)
        total = c.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise NumericalError(f"joint table sums to {total!r}, not 1")
        object.__setattr__(self, "cells", _frozen(c / total, float))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.cells.shape[0]

    @property
    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return self.cells.sum(axis=1), self.cells.sum(axis=0)


@dataclass(frozen=True)
class CountsTable:
    counts: np.ndarray
    labels: tuple[str, str] = ("", "")
    n_nominal: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ShapeError(f"counts table must be square, got shape {c.shape}")
        if np.any(c < 0) or not np.all(np.equal(np.mod(c, 1), 0)):
            raise ValueError("counts must be nonnegative integers")
        object.__setattr__(self, "counts", _frozen(c, np.int64))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def joint_probabilities(rho: DensityMatrix, pair: BasisPair) -> JointProbTable:
    """Born-rule table ``<a|<b| rho |a>|b>`` for all outcome pairs."""
    d = rho.local_dim
    if pair.dim != d:
        raise DimensionError(f"pair has dimension {pair.dim}, state has local dimension {d}")
    A = pair.system1.vectors
    B = pair.system2.vectors
    r = rho.matrix.reshape(d, d, d, d)  # [i, j, k, l] = <ij| rho |kl>
    # contract row indices with the bras, then column indices with the kets: O(d^5)
    t = np.tensordot(A.conj(), r, axes=([1], [0]))  # [a, j, k, l]
    t = np.einsum("bj,ajkl->abkl", B.conj(), t, optimize=True)
    t = np.einsum("ak,abkl->abl", A, t, optimize=True)
    p = np.einsum("bl,abl->ab", B, t, optimize=True)
    if np.max(np.abs(p.imag)) > IMAG_TOL:
        raise NumericalError(f"joint probabilities have imaginary part {np.max(np.abs(p.imag)):.3g}")
    return JointProbTable(p.real, pair.labels)


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulate_counts(table: JointProbTable, n_total: int = DEFAULT_N_TOTAL, seed=None) -> CountsTable:
    """Independent Poisson(n_total * p) draw for every cell.

    ``seed`` may be an integer or an owned ``numpy.random.Generator``.  The
    realized total generally differs from ``n_total``.
    """
    if int(n_total) < 1:
        raise ValueError(f"n_total must be >= 1, got {n_total}")
    rng = _generator(seed)
    counts = rng.poisson(int(n_total) * table.cells)
    return CountsTable(
        counts,
        table.labels,
        n_nominal=int(n_total),
        seed=seed if isinstance(seed, (int, np.integer)) else None,
    )


def normalize_counts(counts: CountsTable) -> tuple[JointProbTable, np.ndarray]:
    """Relative frequencies and their Poisson uncertainties.

    ``dp_i = p_i (sqrt(N_i)/N_i + sqrt(N_tot)/N_tot)``; empty cells get
    ``p = dp = 0``.
    """
    n = counts.counts.astype(float)
    n_tot = n.sum()
    if n_tot <= 0:
        raise EmptyDataError("counts table is empty")
    p = n / n_tot
    rel = np.zeros_like(n)
    nz = n > 0
    rel[nz] = 1.0 / np.sqrt(n[nz])
    dp = p * (rel + 1.0 / np.sqrt(n_tot))
    dp.setflags(write=False)
    return JointProbTable(p, counts.labels), dp
