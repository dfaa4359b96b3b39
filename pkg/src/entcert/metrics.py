"""Correlation measures on joint outcome tables, closed forms and error propagation.

All information quantities are in bits with the convention 0 log 0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .bases import BasisPair
from .errors import DegenerateError, DimensionError, ParamError
from .measure import CountsTable, JointProbTable, joint_probabilities, normalize_counts
from .qcore import DensityMatrix, tensor_product

BISECT_XTOL = 1e-6


@dataclass(frozen=True)
class MiResult:
    per_pair: tuple[float, ...]
    labels: tuple[str, ...] = ()
    sigma_sum: float | None = None

    @property
    def i_ab(self) -> float:
        return self.per_pair[0]

    @property
    def i_cd(self) -> float:
        return self.per_pair[1]

    @property
    def sum(self) -> float:
        return float(np.sum(self.per_pair))


@dataclass(frozen=True)
class PearsonResult:
    c_ab: float
    c_cd: float
    values1: tuple[float, ...]
    values2: tuple[float, ...]
    canonical: bool = True

    @property
    def sum(self) -> float:
        """Sum of magnitudes; relabeling the outcomes of one side flips a coefficient's sign."""
        return abs(self.c_ab) + abs(self.c_cd)

    @property
    def signed_sum(self) -> float:
        return self.c_ab + self.c_cd


def mutual_information(table: JointProbTable | np.ndarray) -> float:
    """Shannon mutual information between the two outcome labels of a joint table."""
    cells = table.cells if isinstance(table, JointProbTable) else np.asarray(table, dtype=float)
    pa = cells.sum(axis=1)
    pb = cells.sum(axis=0)
    a, b = np.nonzero(cells > 0)
    p = cells[a, b]
    # log space: the marginal product can underflow for tiny cells
    mi = float(np.sum(p * (np.log2(p) - np.log2(pa[a]) - np.log2(pb[b]))))
    # round-off can leave tiny negatives on product distributions
    return max(mi, 0.0)


def shannon_entropy(probs: np.ndarray) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def mi_sum(rho: DensityMatrix, pairs: Sequence[BasisPair]) -> MiResult:
    """Mutual information of each measurement pair on ``rho`` and their sum."""
    if len(pairs) < 2:
        raise ValueError("need at least two measurement pairs")
    values = tuple(mutual_information(joint_probabilities(rho, pair)) for pair in pairs)
    return MiResult(values, tuple(pair.label for pair in pairs))


def _xlog2x(x: float) -> float:
    return 0.0 if x <= 0.0 else x * np.log2(x)


def _check(d: int, p: float) -> None:
    if int(d) < 2:
        raise DimensionError(f"d must be >= 2, got {d}")
    if not 0.0 <= p <= 1.0:
        raise ParamError(f"p must lie in [0, 1], got {p}")


def _noisy_diagonal_mi(d: int, p: float) -> float:
    # MI of the table p/d delta_ab + (1-p)/d^2
    return ((d - 1) / d) * _xlog2x(1 - p) + _xlog2x(1 + (d - 1) * p) / d


def analytic_mi_sum_rho_c(d: int, p: float) -> float:
    """Closed-form MI sum of ``rho_c`` for computational + (sigma_x or Fourier) pairs."""
    _check(d, p)
    return float(np.log2(d) + _noisy_diagonal_mi(d, p))


def analytic_mi_sum_werner(d: int, p: float) -> float:
    """Closed-form MI sum of the Werner state; both pairs contribute equally."""
    _check(d, p)
    return float(2 * _noisy_diagonal_mi(d, p))


def threshold_crossing(f, target: float, lo: float = 0.0, hi: float = 1.0,
                       xtol: float = BISECT_XTOL) -> float | None:
    """Bisection root of ``f(p) = target`` on ``[lo, hi]``; None without a sign change."""
    g = lambda p: f(p) - target  # noqa: E731
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if np.sign(glo) == np.sign(ghi):
        return None
    return float(bisect(g, lo, hi, xtol=xtol))


def default_outcome_values(d: int) -> tuple[tuple[float, ...], bool]:
    """(+1, -1) for qubits; 0..d-1 otherwise, flagged non-canonical."""
    if d == 2:
        return (1.0, -1.0), True
    return tuple(float(k) for k in range(d)), False


def pearson(table: JointProbTable, values1: Sequence[float], values2: Sequence[float]) -> float:
    """Pearson coefficient of the joint distribution over assigned outcome values."""
    cells = table.cells
    x = np.asarray(values1, dtype=float)
    y = np.asarray(values2, dtype=float)
    if x.shape != (table.dim,) or y.shape != (table.dim,):
        raise DimensionError(f"need {table.dim} outcome values per side")
    pa, pb = table.marginals
    mx, my = pa @ x, pb @ y
    var_x = pa @ (x - mx) ** 2
    var_y = pb @ (y - my) ** 2
    if var_x <= 1e-15 or var_y <= 1e-15:
        raise DegenerateError("a marginal has zero variance; correlation is undefined")
    cov = (x - mx) @ cells @ (y - my)
    return float(np.clip(cov / np.sqrt(var_x * var_y), -1.0, 1.0))


def pearson_sum(rho: DensityMatrix, pairs: Sequence[BasisPair],
                values1: Sequence[float] | None = None,
                values2: Sequence[float] | None = None) -> PearsonResult:
    if len(pairs) != 2:
        raise ValueError("the Pearson criterion uses exactly two measurement pairs")
    d = rho.local_dim
    canonical = True
    if values1 is None or values2 is None:
        default, canonical = default_outcome_values(d)
        values1 = default if values1 is None else values1
        values2 = default if values2 is None else values2
    c = [pearson(joint_probabilities(rho, pair), values1, values2) for pair in pairs]
    return PearsonResult(c[0], c[1], tuple(values1), tuple(values2), canonical)


def delta_mi(counts: CountsTable) -> float:
    """Linear error propagation for the information of a counts table.

    ``dI = (1/ln 2) sum_i dp_i |ln p_i + 1|`` over all cells, with ``dp_i``
    from :func:`normalize_counts`; empty cells contribute nothing.
    """
    table, dp = normalize_counts(counts)
    p = table.cells
    m = p > 0
    return float(np.sum(dp[m] * np.abs(np.log(p[m]) + 1.0)) / np.log(2))


def mi_from_counts(counts: CountsTable) -> tuple[float, float]:
    """(mutual information, propagated uncertainty) of a measured counts table."""
    table, _ = normalize_counts(counts)
    return mutual_information(table), delta_mi(counts)


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
WITNESS = np.eye(4, dtype=complex) - tensor_product(_SZ, _SZ) - tensor_product(_SX, _SX)


def witness_expectation(rho: DensityMatrix) -> float:
    """Tr(W rho) with W = I - ZZ - XX; negative values certify entanglement."""
    if rho.local_dim != 2:
        raise DimensionError(f"the witness is defined for two qubits, got d={rho.local_dim}")
    return float(np.real(rho.expectation(WITNESS)))
