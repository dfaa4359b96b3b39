"""State families on two qudits, parameterized by local dimension and mixing weight."""

from __future__ import annotations

import enum

import numpy as np

from .bases import log2_exact
from .errors import DimensionError, ParamError
from .qcore import DensityMatrix, apply_pair_mapping, ket_to_density, tensor_product


class StateFamily(str, enum.Enum):
    MAX_ENTANGLED = "max"
    CLASS_CORR = "class"
    RHO_C = "rho_c"
    RHO_W = "rho_w"
    RHO_A = "rho_a"
    RHO_B = "rho_b"
    RHO_S = "rho_s"


def _check_d(d: int) -> int:
    d = int(d)
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    if d * d > 4096:
        raise DimensionError(f"d={d} exceeds the dense-matrix cap (d <= 64)")
    return d


def _check_p(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ParamError(f"mixing parameter p must lie in [0, 1], got {p}")
    return p


def max_entangled_ket(d: int) -> np.ndarray:
    d = _check_d(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return psi


def max_entangled(d: int) -> DensityMatrix:
    """Projector onto sum_j |jj> / sqrt(d)."""
    d = _check_d(d)
    m = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d) * (d + 1)
    m[np.ix_(idx, idx)] = 1.0 / d
    return DensityMatrix(m, d)


def classically_correlated(d: int) -> DensityMatrix:
    """(1/d) sum_j |jj><jj|."""
    d = _check_d(d)
    diag = np.zeros(d * d)
    diag[np.arange(d) * (d + 1)] = 1.0 / d
    return DensityMatrix(np.diag(diag).astype(complex), d)


def maximally_mixed(d: int) -> DensityMatrix:
    d = _check_d(d)
    return DensityMatrix(np.eye(d * d, dtype=complex) / (d * d), d)


def _mix(p: float, a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    if p == 1.0:
        return a
    if p == 0.0:
        return b
    return DensityMatrix(p * a.matrix + (1.0 - p) * b.matrix, a.local_dim)


def rho_c(d: int, p: float) -> DensityMatrix:
    """Maximally entangled state mixed with classical correlation in the computational basis."""
    p = _check_p(p)
    return _mix(p, max_entangled(d), classically_correlated(d))


def rho_w(d: int, p: float) -> DensityMatrix:
    """Isotropic (Werner-type) state: maximally entangled mixed with white noise."""
    p = _check_p(p)
    return _mix(p, max_entangled(d), maximally_mixed(d))


def _plus_minus_anticorrelated() -> np.ndarray:
    s = 1 / np.sqrt(2)
    plus, minus = np.array([s, s]), np.array([s, -s])
    return 0.5 * (ket_to_density(np.kron(plus, minus)) + ket_to_density(np.kron(minus, plus)))


def rho_a(d: int, p: float) -> DensityMatrix:
    """Maximally entangled state mixed with n copies of (|+-><+-| + |-+><-+|)/2.

    The noise term is assembled pair by pair and then regrouped with the same
    slot permutation that maps (|00>+|11>)^n onto sum_j |jj>.
    """
    p = _check_p(p)
    d = _check_d(d)
    n = log2_exact(d)
    if n is None:
        raise DimensionError(f"rho_a is defined for d = 2^n only, got d={d}")
    noise = tensor_product(*[_plus_minus_anticorrelated()] * n)
    return _mix(p, max_entangled(d), DensityMatrix(apply_pair_mapping(noise), d))


def _bell(sign: int) -> np.ndarray:
    return np.array([1, 0, 0, sign], dtype=complex) / np.sqrt(2)


def rho_b(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1-p) |Phi-><Phi-|."""
    p = _check_p(p)
    m = p * ket_to_density(_bell(1)) + (1 - p) * ket_to_density(_bell(-1))
    return DensityMatrix(m, 2)


def rho_s(p: float) -> DensityMatrix:
    """Separable mixture of computational and sigma_x classical correlations."""
    p = _check_p(p)
    s = 1 / np.sqrt(2)
    plus, minus = np.array([s, s]), np.array([s, -s])
    zz = np.diag([0.5, 0, 0, 0.5]).astype(complex)
    xx = 0.5 * (ket_to_density(np.kron(plus, plus)) + ket_to_density(np.kron(minus, minus)))
    return DensityMatrix(p * zz + (1 - p) * xx, 2)


def build_state(family: str | StateFamily, d: int, p: float | None = None) -> DensityMatrix:
    """Construct a family member from CLI-style strings, e.g. ``("rho_w", 8, 0.85)``."""
    try:
        fam = StateFamily(family)
    except ValueError:
        raise ParamError(
            f"unknown family {family!r}; choose from {[f.value for f in StateFamily]}"
        ) from None
    if fam is StateFamily.MAX_ENTANGLED:
        return max_entangled(d)
    if fam is StateFamily.CLASS_CORR:
        return classically_correlated(d)
    if p is None:
        raise ParamError(f"family {fam.value} needs a mixing parameter p")
    if fam in (StateFamily.RHO_B, StateFamily.RHO_S):
        if int(d) != 2:
            raise DimensionError(f"{fam.value} is a two-qubit family (d=2), got d={d}")
        return rho_b(p) if fam is StateFamily.RHO_B else rho_s(p)
    return {StateFamily.RHO_C: rho_c, StateFamily.RHO_W: rho_w, StateFamily.RHO_A: rho_a}[fam](d, p)


def random_product_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    def haar(k: int) -> np.ndarray:
        v = rng.normal(size=k) + 1j * rng.normal(size=k)
        return v / np.linalg.norm(v)

    return np.kron(haar(d), haar(d))


def random_separable(d: int, rng: np.random.Generator, n_terms: int | None = None) -> DensityMatrix:
    """Random convex mixture of Haar-random product pure states."""
    d = _check_d(d)
    n_terms = n_terms or int(rng.integers(1, 2 * d * d + 1))
    weights = rng.dirichlet(np.ones(n_terms))
    m = sum(w * ket_to_density(random_product_ket(d, rng)) for w in weights)
    return DensityMatrix(m, d)
