"""Local measurement bases and collections of mutually unbiased bases.

A :class:`Basis` stores its kets as the rows of a ``d x d`` complex array.
For a system-1 basis ``A`` the *correlation partner* on system 2 is the
basis of complex-conjugated kets: on ``sum_j |jj>/sqrt(d)`` the amplitude
``<a|<conj(a')|Phi>`` equals ``<a|a'>/sqrt(d)``, so outcomes coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConstructionError, DimensionError
from .qcore import omega, tensor_product

ORTHONORMAL_TOL = 1e-10
UNBIASED_TOL = 1e-10


def orthonormality_defects(vectors: np.ndarray, tol: float = ORTHONORMAL_TOL):
    """List ``(i, j, |<v_i|v_j> - delta_ij|)`` for every Gram entry off by more than ``tol``."""
    v = np.asarray(vectors, dtype=complex)
    gram = v.conj() @ v.T
    dev = np.abs(gram - np.eye(len(v)))
    return [(i, j, float(dev[i, j])) for i in range(len(v)) for j in range(i, len(v)) if dev[i, j] > tol]


def _describe_defects(label: str, defects) -> str:
    parts = []
    for i, j, dev in defects:
        what = f"ket {i} has norm defect" if i == j else f"kets {i},{j} overlap"
        parts.append(f"{what} {dev:.3g}")
    return f"basis {label!r} is not orthonormal: " + "; ".join(parts)


@dataclass(frozen=True)
class Basis:
    """Ordered orthonormal basis; ket ``k`` is ``vectors[k]``."""

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=complex, copy=True)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 2:
            raise DimensionError(f"a basis needs d >= 2 kets of length d, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ConstructionError(f"basis {self.label!r} contains NaN or Inf")
        defects = orthonormality_defects(v)
        if defects:
            raise ConstructionError(_describe_defects(self.label, defects))
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def kets(self) -> list[np.ndarray]:
        return list(self.vectors)

    def conjugate(self, label: str | None = None) -> "Basis":
        return Basis(self.vectors.conj(), label if label is not None else f"{self.label}*")

    def equivalent(self, other: "Basis", tol: float = 1e-10) -> bool:
        """Same kets in the same order, each up to a global phase."""
        if self.dim != other.dim:
            return False
        overlaps = np.abs(np.einsum("ij,ij->i", self.vectors.conj(), other.vectors))
        return bool(np.all(np.abs(overlaps - 1.0) <= tol))

    def same_set(self, other: "Basis", tol: float = 1e-10) -> bool:
        """Same kets up to reordering and per-ket global phase."""
        if self.dim != other.dim:
            return False
        ov = np.abs(self.vectors.conj() @ other.vectors.T)
        match = np.abs(ov - 1.0) <= tol
        return bool(np.all(match.sum(axis=1) == 1) and np.all(match.sum(axis=0) == 1))


@dataclass(frozen=True)
class BasisPair:
    """Measurement setting: ``system1`` on the first qudit, ``system2`` on the second."""

    system1: Basis
    system2: Basis
    label: str = ""

    def __post_init__(self) -> None:
        if self.system1.dim != self.system2.dim:
            raise DimensionError("both bases of a pair must have the same dimension")
        if not self.label:
            object.__setattr__(self, "label", f"{self.system1.label}/{self.system2.label}")

    @property
    def dim(self) -> int:
        return self.system1.dim

    @property
    def labels(self) -> tuple[str, str]:
        return (self.system1.label, self.system2.label)


def partner_pair(basis: Basis, label: str | None = None) -> BasisPair:
    """Pair ``basis`` with its conjugate, which is perfectly correlated on ``sum_j |jj>``."""
    return BasisPair(basis, basis.conjugate(), label or basis.label)


def check_mutually_unbiased(b1: Basis, b2: Basis, tol: float = UNBIASED_TOL) -> tuple[bool, float]:
    """Return ``(unbiased, worst | |<a|c>|^2 - 1/d |)``."""
    if b1.dim != b2.dim:
        raise DimensionError(f"dimension mismatch: {b1.dim} vs {b2.dim}")
    ov = np.abs(b1.vectors.conj() @ b2.vectors.T) ** 2
    dev = float(np.max(np.abs(ov - 1.0 / b1.dim)))
    return dev <= tol, dev


# --- single bases -----------------------------------------------------------

def _check_dim(d: int) -> int:
    d = int(d)
    if d < 2:
        raise DimensionError(f"local dimension must be >= 2, got {d}")
    return d


def computational_basis(d: int) -> Basis:
    d = _check_dim(d)
    return Basis(np.eye(d, dtype=complex), "comp")


def fourier_basis(d: int) -> Basis:
    """Kets ``|f_j> = d^{-1/2} sum_k w^{kj} |k>`` with ``w = exp(2 pi i / d)``."""
    d = _check_dim(d)
    k = np.arange(d)
    # exponent reduced mod d before exponentiation keeps the phases exact to ~1 ulp
    phases = np.exp(2j * np.pi * (np.outer(k, k) % d) / d)
    return Basis(phases / np.sqrt(d), "fourier")


def _qubit_count(n: int) -> int:
    n = int(n)
    if n < 1:
        raise DimensionError(f"need at least one qubit, got n={n}")
    return n


def _product_basis(n: int, zero_bit: np.ndarray, one_bit: np.ndarray, label: str) -> Basis:
    # ket k: leftmost qubit carries the most significant bit of k
    kets = []
    for k in range(2 ** n):
        bits = [(k >> (n - 1 - q)) & 1 for q in range(n)]
        kets.append(tensor_product(*[one_bit if b else zero_bit for b in bits]))
    return Basis(np.array(kets), label)


def sigma_x_basis(n: int) -> Basis:
    """Product of per-qubit sigma_x eigenbases; bit 0 -> |+>, bit 1 -> |->."""
    n = _qubit_count(n)
    s = 1 / np.sqrt(2)
    return _product_basis(n, np.array([s, s]), np.array([s, -s]), "sx")


def sigma_y_basis(n: int) -> Basis:
    """Product of per-qubit sigma_y eigenbases; bit 0 -> (|0>+i|1>)/sqrt2, bit 1 -> (|0>-i|1>)/sqrt2."""
    n = _qubit_count(n)
    s = 1 / np.sqrt(2)
    return _product_basis(n, np.array([s, 1j * s]), np.array([s, -1j * s]), "sy")


def log2_exact(d: int) -> int | None:
    """``n`` with ``2**n == d``, else None."""
    d = int(d)
    if d >= 1 and d & (d - 1) == 0:
        return d.bit_length() - 1
    return None


# --- explicit MUB collections -----------------------------------------------

@dataclass(frozen=True)
class MubCollection:
    dim: int
    pairs: tuple[BasisPair, ...]
    label: str = ""
    worst_deviation: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        pairs = tuple(self.pairs)
        if any(p.dim != self.dim for p in pairs):
            raise DimensionError("all pairs of a collection must share its dimension")
        worst = 0.0
        for p, q in combinations(pairs, 2):
            ok, dev = check_mutually_unbiased(p.system1, q.system1)
            worst = max(worst, dev)
            if not ok:
                raise ConstructionError(
                    f"{self.label}: bases {p.system1.label!r} and {q.system1.label!r} are not "
                    f"mutually unbiased (deviation {dev:.3g})"
                )
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "worst_deviation", worst)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def bases(self) -> list[Basis]:
        return [p.system1 for p in self.pairs]


def _w3(k: int) -> complex:
    return omega(3) ** (k % 3)


def _d3_rows(exponents) -> np.ndarray:
    # entries are powers of w, each row renormalized to 1/sqrt(3)
    return np.array([[_w3(e) for e in row] for row in exponents]) / np.sqrt(3)


# exponents of w for each ket, as printed (the printed 1/3 prefactor is replaced by 1/sqrt(3))
D3_TRANSCRIBED = {
    "F3_a": [[0, 0, 0], [0, 1, 2], [0, 2, 1]],
    "F3_b": [[0, 1, 1], [0, 2, 0], [0, 0, 2]],
    "F3_c": [[0, 2, 2], [0, 1, 0], [0, 0, 1]],
}

# printed system-2 partners of F3_b and F3_c
D3_PARTNERS_TRANSCRIBED = {
    "F3_b": [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
    "F3_c": [[2, 0, 0], [0, 0, 2], [0, 2, 0]],
}


def d3_transcribed_partner(name: str) -> Basis:
    return Basis(_d3_rows(D3_PARTNERS_TRANSCRIBED[name]), f"{name}'")


def mub_collection_d3() -> MubCollection:
    """Computational basis plus F3_a, F3_b, F3_c, each with its conjugate partner."""
    pairs = [partner_pair(computational_basis(3))]
    for name, rows in D3_TRANSCRIBED.items():
        pairs.append(partner_pair(Basis(_d3_rows(rows), name)))
    return MubCollection(3, pairs, "d3")


_i = 1j
D4_TRANSCRIBED = {
    "F4_a": [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, -1, 1], [1, -1, 1, -1]],
    "F4_b": [[1, -1, -_i, -_i], [1, -1, _i, _i], [1, 1, _i, -_i], [1, 1, -_i, _i]],
    "F4_c": [[1, -_i, -_i, -1], [1, -_i, _i, 1], [1, _i, _i, -1], [1, _i, -_i, 1]],
    "F4_d": [[1, -_i, 1, -_i], [1, -_i, 1, _i], [1, _i, 1, -_i], [1, _i, -1, _i]],
}

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# the five maximal commuting classes of two-qubit Paulis (two generators each);
# their joint eigenbases are the complete MUB set of GF(4)
PAULI_CLASSES = (("ZI", "IZ"), ("XI", "IX"), ("YI", "IY"), ("XY", "YZ"), ("XZ", "YX"))


def _pauli(word: str) -> np.ndarray:
    return tensor_product(*[_PAULI[c] for c in word])


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = []
    for v in vectors:
        lead = v[np.argmax(np.abs(v) > 1e-9)]
        out.append(v * abs(lead) / lead)
    return np.array(out)


def pauli_class_basis(generators: tuple[str, str], label: str) -> Basis:
    """Joint eigenbasis of two commuting two-qubit Paulis.

    ``P + 2Q`` has the non-degenerate spectrum {3, 1, -1, -3}; kets are ordered
    by decreasing eigenvalue, each with its first nonzero entry real positive.
    """
    h = _pauli(generators[0]) + 2 * _pauli(generators[1])
    evals, evecs = np.linalg.eigh(h)
    order = np.argsort(-evals)
    vecs = evecs[:, order].T
    # eigh is exact only to round-off; snap entries to the ideal {0, +-1/2, +-i/2}
    vecs = np.round(_fix_phases(vecs) * 2, 12) / 2
    return Basis(vecs, label)


def _diagonal_in(basis_rows: np.ndarray, generators: tuple[str, str], tol: float = 1e-9) -> bool:
    for g in generators:
        m = basis_rows.conj() @ _pauli(g) @ basis_rows.T
        if np.max(np.abs(m - np.diag(np.diag(m)))) > tol:
            return False
    return True


@dataclass(frozen=True)
class BlockReport:
    name: str
    orthonormal: bool
    defects: tuple  # (i, j, deviation) triples from orthonormality_defects
    unbiased_to: dict  # other block name -> worst deviation

    @property
    def offending_kets(self) -> list[int]:
        """Kets involved in the most Gram-matrix defects (the likely typos)."""
        if not self.defects:
            return []
        hits: dict[int, int] = {}
        for i, j, _ in self.defects:
            hits[i] = hits.get(i, 0) + 1
            if j != i:
                hits[j] = hits.get(j, 0) + 1
        top = max(hits.values())
        return sorted(k for k, c in hits.items() if c == top)


def validate_d4_transcription(tol: float = ORTHONORMAL_TOL) -> dict[str, BlockReport]:
    """Check every printed d=4 block for orthonormality and pairwise unbiasedness."""
    blocks = {"comp": np.eye(4, dtype=complex)}
    blocks.update({k: np.array(v, dtype=complex) / 2 for k, v in D4_TRANSCRIBED.items()})
    reports = {}
    for name, rows in blocks.items():
        defects = tuple(orthonormality_defects(rows, tol))
        unb = {}
        for other, orows in blocks.items():
            if other != name:
                ov = np.abs(rows.conj() @ orows.T) ** 2
                unb[other] = float(np.max(np.abs(ov - 0.25)))
        reports[name] = BlockReport(name, not defects, defects, unb)
    return reports


def mub_collection_d4(source: str = "transcribed") -> MubCollection:
    """Five-basis d=4 collection.

    ``source="transcribed"`` uses the printed F4 blocks as-is and raises
    :class:`ConstructionError` naming the first block and kets that fail.
    ``source="corrected"`` keeps every printed block that validates and
    replaces each failing one by the stabilizer eigenbasis of the Pauli class
    not used by any other block.
    """
    if source not in ("transcribed", "corrected"):
        raise ValueError(f"unknown d=4 source {source!r}")
    reports = validate_d4_transcription()
    if source == "transcribed":
        for name, rep in reports.items():
            if not rep.orthonormal:
                raise ConstructionError(
                    f"transcribed d=4 block {name} fails orthonormality; offending ket(s) "
                    f"{rep.offending_kets}: {_describe_defects(name, rep.defects)}"
                )
        pairs = [partner_pair(computational_basis(4))]
        pairs += [partner_pair(Basis(np.array(v) / 2, k)) for k, v in D4_TRANSCRIBED.items()]
        return MubCollection(4, pairs, "d4")

    good: dict[str, np.ndarray] = {"comp": np.eye(4, dtype=complex)}
    bad: list[str] = []
    for name, rows in D4_TRANSCRIBED.items():
        if reports[name].orthonormal:
            good[name] = np.array(rows, dtype=complex) / 2
        else:
            bad.append(name)
    used = set()
    for rows in good.values():
        for cls in PAULI_CLASSES:
            if _diagonal_in(rows, cls):
                used.add(cls)
    free = [c for c in PAULI_CLASSES if c not in used]
    if len(free) < len(bad):
        raise ConstructionError("cannot complete the d=4 collection: valid blocks are not stabilizer bases")
    pairs = []
    for name in ["comp", *D4_TRANSCRIBED]:
        if name in good:
            pairs.append(partner_pair(Basis(good[name], name)))
        else:
            fixed = pauli_class_basis(free.pop(0), f"{name}~")
            printed = np.array(D4_TRANSCRIBED[name], dtype=complex) / 2
            pairs.append(partner_pair(_align_to(fixed, printed)))
    return MubCollection(4, pairs, "d4-corrected")


def _align_to(basis: Basis, printed: np.ndarray) -> Basis:
    """Reorder kets so those matching a printed ket keep its position."""
    ov = np.abs(printed.conj() @ basis.vectors.T)
    order = [-1] * basis.dim
    remaining = list(range(basis.dim))
    for slot in range(basis.dim):
        hits = [k for k in remaining if abs(ov[slot, k] - 1.0) < 1e-9]
        if hits:
            order[slot] = hits[0]
            remaining.remove(hits[0])
    for slot in range(basis.dim):
        if order[slot] < 0:
            order[slot] = remaining.pop(0)
    return Basis(basis.vectors[order], basis.label)


# --- named pairs ---------------------------------------------------------------

def _pow2(d: int, name: str) -> int:
    n = log2_exact(d)
    if n is None or n < 1:
        raise DimensionError(f"pair {name!r} needs d = 2^n, got d={d}")
    return n


def named_pair(name: str, d: int) -> BasisPair:
    """Build a pair from a short name.

    ``comp``, ``fourier`` (Fourier with conjugate partner), ``sx``, ``sy``
    (powers of two only), and ``mubK`` for pair ``K`` of the d=3 or corrected
    d=4 collection.
    """
    name = name.strip().lower()
    if name == "comp":
        return partner_pair(computational_basis(d))
    if name == "fourier":
        return partner_pair(fourier_basis(d))
    if name == "sx":
        return partner_pair(sigma_x_basis(_pow2(d, name)))
    if name == "sy":
        return partner_pair(sigma_y_basis(_pow2(d, name)))
    if name.startswith("mub") and name[3:].isdigit():
        coll = mub_collection(d)
        k = int(name[3:])
        if k >= len(coll):
            raise DimensionError(f"d={d} collection has only {len(coll)} pairs")
        return coll.pairs[k]
    raise ValueError(f"unknown basis pair {name!r}")


def mub_collection(d: int) -> MubCollection:
    if d == 3:
        return mub_collection_d3()
    if d == 4:
        return mub_collection_d4("corrected")
    raise DimensionError(f"explicit MUB collections exist for d=3 and d=4 only, got d={d}")


def parse_pairs(names: str, d: int) -> list[BasisPair]:
    """Comma-separated pair names; ``mub`` expands to the full d=3/d=4 collection."""
    pairs: list[BasisPair] = []
    for token in names.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token == "mub":
            pairs.extend(mub_collection(d).pairs)
        else:
            pairs.append(named_pair(token, d))
    return pairs


def default_pairs(d: int) -> list[BasisPair]:
    """Computational plus sigma_x for powers of two, computational plus Fourier otherwise."""
    second = "sx" if log2_exact(d) else "fourier"
    return [named_pair("comp", d), named_pair(second, d)]


def default_pair_names(d: int) -> str:
    return "comp,sx" if log2_exact(d) else "comp,fourier"
