"""Dense complex linear algebra for bipartite qudit states.

Index convention
----------------
A joint basis state ``|a>|b>`` of two qudits with local dimension ``d`` sits
at flat index ``a * d + b``: the system-1 index is the more significant one.
This is the ordering produced by :func:`numpy.kron` and it is used by every
module of the package.  For systems built from qubits, tensor slots are
likewise ordered most-significant first, so the qubit holding the highest
bit of ``j`` is the leftmost factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionError, NumericalError, ShapeError

MAX_TOTAL_DIM = 4096

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8


def omega(d: int) -> complex:
    """Primitive ``d``-th root of unity exp(2*pi*i/d)."""
    return complex(np.exp(2j * np.pi / d))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def tensor_product(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more vectors or matrices.

    The leftmost operand carries the most significant index.
    """
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    arrays = [np.asarray(op, dtype=complex) for op in ops]
    if any(a.ndim != arrays[0].ndim for a in arrays):
        raise ShapeError("cannot mix vectors and matrices in a tensor product")
    out = reduce(np.kron, arrays)
    if max(out.shape) > MAX_TOTAL_DIM:
        raise DimensionError(f"tensor product dimension {max(out.shape)} exceeds {MAX_TOTAL_DIM}")
    return out


def ket_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """Bipartite state on ``C^d (x) C^d`` stored as a dense ``d^2 x d^2`` array.

    Construction checks shape and finiteness only; physicality is checked by
    :func:`validate_density` so that deliberately broken inputs can still be
    inspected.
    """

    matrix: np.ndarray
    local_dim: int

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        d = int(self.local_dim)
        if d < 1:
            raise DimensionError(f"local dimension must be positive, got {d}")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] != d * d:
            raise DimensionError(f"matrix size {m.shape[0]} does not equal local_dim**2 = {d * d}")
        if m.shape[0] > MAX_TOTAL_DIM:
            raise DimensionError(f"total dimension {m.shape[0]} exceeds {MAX_TOTAL_DIM}")
        if not np.all(np.isfinite(m)):
            raise NumericalError("density matrix contains NaN or Inf")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "local_dim", d)

    @property
    def total_dim(self) -> int:
        return self.local_dim * self.local_dim

    @classmethod
    def from_ket(cls, psi: np.ndarray, local_dim: int) -> "DensityMatrix":
        return cls(ket_to_density(psi), local_dim)

    def __add__(self, other: "DensityMatrix") -> "DensityMatrix":
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        if other.local_dim != self.local_dim:
            raise DimensionError("cannot add states of different local dimension")
        return DensityMatrix(self.matrix + other.matrix, self.local_dim)

    def __mul__(self, scalar: float) -> "DensityMatrix":
        return DensityMatrix(self.matrix * scalar, self.local_dim)

    __rmul__ = __mul__

    def expectation(self, op: np.ndarray) -> complex:
        """Tr(op @ rho)."""
        return complex(np.trace(np.asarray(op) @ self.matrix))

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        return self.local_dim == other.local_dim and np.allclose(
            self.matrix, other.matrix, rtol=0.0, atol=atol
        )


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    eigenvalues: np.ndarray = field(repr=False)
    tol: float
    psd_tol: float

    @property
    def passed(self) -> bool:
        return (
            self.hermiticity_defect <= self.tol
            and self.trace_defect <= self.tol
            and self.min_eigenvalue >= -self.psd_tol
        )

    def __bool__(self) -> bool:
        return self.passed


def validate_density(rho: DensityMatrix | np.ndarray, tol: float = HERMITIAN_TOL,
                     psd_tol: float = PSD_TOL) -> ValidationReport:
    """Measure how far ``rho`` is from a Hermitian, unit-trace, PSD operator.

    The minimum eigenvalue comes from a full Hermitian eigendecomposition of
    the Hermitian part of ``rho``.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    trace_defect = float(abs(np.trace(m) - 1.0))
    evals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return ValidationReport(
        hermiticity_defect=herm,
        trace_defect=trace_defect,
        min_eigenvalue=float(evals[0]),
        eigenvalues=evals,
        tol=tol,
        psd_tol=psd_tol,
    )


@dataclass(frozen=True)
class QubitPairMapping:
    """Relabeling of ``2n`` qubit tensor slots.

    ``permutation[k]`` is the input slot that lands in output slot ``k``.  The
    default interleaved mapping takes ``n`` consecutive qubit pairs
    ``(s1, s2)(s1, s2)...`` and gathers the first qubit of every pair into
    system 1 and the second into system 2, so ``(|00>+|11>)^{(x)n}`` becomes
    ``sum_j |j>|j>``.
    """

    n: int
    permutation: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(k) for k in self.permutation)
        if self.n < 1:
            raise DimensionError("a qubit-pair mapping needs n >= 1")
        if sorted(perm) != list(range(2 * self.n)):
            raise ValueError(f"permutation {perm} is not a bijection on {2 * self.n} slots")
        object.__setattr__(self, "permutation", perm)

    @classmethod
    def interleaved(cls, n: int) -> "QubitPairMapping":
        return cls(n, tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2)))

    def inverse(self) -> "QubitPairMapping":
        return QubitPairMapping(self.n, tuple(int(k) for k in np.argsort(self.permutation)))


def _qubits_per_side(total_dim: int) -> int:
    n2 = total_dim.bit_length() - 1
    if total_dim < 4 or (1 << n2) != total_dim or n2 % 2:
        raise DimensionError(f"dimension {total_dim} is not a power of 4")
    return n2 // 2


def apply_pair_mapping(obj, mapping: QubitPairMapping | None = None):
    """Permute qubit tensor slots of a ket, a square matrix or a DensityMatrix.

    The output has the same kind as the input.  With ``mapping=None`` the
    interleaved mapping of matching size is used.
    """
    if isinstance(obj, DensityMatrix):
        return DensityMatrix(apply_pair_mapping(obj.matrix, mapping), obj.local_dim)
    a = np.asarray(obj, dtype=complex)
    if a.ndim not in (1, 2) or (a.ndim == 2 and a.shape[0] != a.shape[1]):
        raise ShapeError(f"expected a vector or square matrix, got shape {a.shape}")
    n = _qubits_per_side(a.shape[0])
    if mapping is None:
        mapping = QubitPairMapping.interleaved(n)
    elif mapping.n != n:
        raise DimensionError(f"mapping is for n={mapping.n}, object has n={n} qubits per side")
    perm = list(mapping.permutation)
    k = 2 * n
    if a.ndim == 1:
        return a.reshape((2,) * k).transpose(perm).reshape(a.shape)
    axes = perm + [k + p for p in perm]
    return a.reshape((2,) * (2 * k)).transpose(axes).reshape(a.shape)
