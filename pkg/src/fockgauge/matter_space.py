"""Fermionic matter on a single vertex.

One vertex carries dim(fundamental) fermionic modes.  Basis states are
occupation bitstrings in increasing binary order, with mode 0 stored in
the least significant bit; creation operators pick up the sign
(-1)^(number of occupied modes below the target) under this fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm, logm

from .group_core import GroupCatalogEntry


def _popcount_below(states: np.ndarray, mode: int) -> np.ndarray:
    masked = states & ((1 << mode) - 1)
    counts = np.zeros_like(states)
    while masked.any():
        counts += masked & 1
        masked >>= 1
    return counts


class VertexFock:
    """Occupation basis of one matter site, tagged with its sublattice parity."""

    def __init__(self, n_modes: int, parity: int = 0):
        if parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {parity}")
        self.n_modes = n_modes
        self.parity = parity
        self.dim = 1 << n_modes
        self.basis = np.arange(self.dim)

    def occupation(self, state: int) -> tuple[int, ...]:
        return tuple((state >> a) & 1 for a in range(self.n_modes))

    def occupied_modes(self, state: int) -> tuple[int, ...]:
        return tuple(a for a in range(self.n_modes) if (state >> a) & 1)

    @property
    def full_state(self) -> int:
        return self.dim - 1


@dataclass
class MatterOperator:
    space: VertexFock
    matrix: sp.csr_matrix

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)

    def __matmul__(self, other: "MatterOperator") -> "MatterOperator":
        return MatterOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "MatterOperator") -> "MatterOperator":
        return MatterOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "MatterOperator") -> "MatterOperator":
        return MatterOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "MatterOperator":
        return MatterOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def dagger(self) -> "MatterOperator":
        return MatterOperator(self.space, self.matrix.conj().T.tocsr())

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def annihilation_matrix(n_modes: int, mode: int) -> sp.csr_matrix:
    """psi_mode over 2^n_modes states, with the canonical sign string."""
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} out of range for {n_modes} modes")
    dim = 1 << n_modes
    states = np.arange(dim)
    occupied = states[(states >> mode) & 1 == 1]
    signs = 1.0 - 2.0 * (_popcount_below(occupied, mode) % 2)
    return sp.coo_matrix(
        (signs.astype(complex), (occupied ^ (1 << mode), occupied)),
        shape=(dim, dim)).tocsr()


def psi(space: VertexFock, mode: int) -> MatterOperator:
    return MatterOperator(space, annihilation_matrix(space.n_modes, mode))


def psi_dagger(space: VertexFock, mode: int) -> MatterOperator:
    return psi(space, mode).dagger()


def number_operator(space: VertexFock, mode: int = None) -> MatterOperator:
    """n_mode, or the total number operator when mode is None."""
    states = np.arange(space.dim)
    if mode is None:
        diag = np.zeros(space.dim)
        for a in range(space.n_modes):
            diag += (states >> a) & 1
    else:
        diag = ((states >> mode) & 1).astype(float)
    return MatterOperator(space, sp.diags(diag.astype(complex), format="csr"))


def bilinear(space: VertexFock, coeff: np.ndarray) -> MatterOperator:
    """sum_ab coeff[a, b] psi_a^dag psi_b."""
    coeff = np.asarray(coeff)
    total = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for a in range(space.n_modes):
        for b in range(space.n_modes):
            if coeff[a, b] != 0:
                total = total + coeff[a, b] * (
                    annihilation_matrix(space.n_modes, a).conj().T
                    @ annihilation_matrix(space.n_modes, b))
    return MatterOperator(space, total)


# ---------------------------------------------------------------------------
# gauge transformations on the matter
# ---------------------------------------------------------------------------

def _resolve_dmatrix(space: VertexFock, entry: GroupCatalogEntry, g) -> np.ndarray:
    ir = entry.fundamental_irrep
    if ir.dim != space.n_modes:
        raise ValueError(
            f"vertex has {space.n_modes} modes but the fundamental irrep "
            f"has dimension {ir.dim}")
    if entry.is_lie:
        return np.atleast_2d(ir.matrix_angle(g))
    return ir.matrix(int(g))


def theta_q(space: VertexFock, entry: GroupCatalogEntry, g) -> MatterOperator:
    """Gauge transformation on the vertex Fock space, staggering included.

    Built as the induced action on antisymmetrized states: the sector with
    k particles transforms with the k x k minors of D(g) (single particles
    as psi_a^dag -> psi_b^dag D_ba), which is exact and free of logarithm
    branch choices.  The whole operator is multiplied by det(g^-1)^parity.

    ``g`` is an element index (finite groups) or angle vector (Lie).
    """
    dmat = _resolve_dmatrix(space, entry, g)
    return theta_q_from_matrix(space, dmat)


def theta_q_from_matrix(space: VertexFock, dmat: np.ndarray) -> MatterOperator:
    dmat = np.asarray(dmat, dtype=complex)
    dim = space.dim
    out = np.zeros((dim, dim), dtype=complex)
    by_count: dict[int, list[int]] = {}
    for s in range(dim):
        by_count.setdefault(bin(s).count("1"), []).append(s)
    for states in by_count.values():
        for s_col in states:
            cols = space.occupied_modes(s_col)
            for s_row in states:
                rows = space.occupied_modes(s_row)
                if not rows:
                    out[s_row, s_col] = 1.0
                else:
                    out[s_row, s_col] = np.linalg.det(dmat[np.ix_(rows, cols)])
    det_phase = np.linalg.det(dmat).conj() ** space.parity
    return MatterOperator(space, sp.csr_matrix(out * det_phase))


def theta_q_exponential(space: VertexFock, entry: GroupCatalogEntry, g) -> MatterOperator:
    """Same transformation through exp(i psi^dag q psi) with q = -i log D(g).

    Kept as a cross-check of theta_q; the principal logarithm is ambiguous
    when D(g) has an eigenphase at pi, so prefer theta_q for production use.
    """
    dmat = _resolve_dmatrix(space, entry, g)
    q = -1j * logm(np.asarray(dmat, dtype=complex))
    exponent = bilinear(space, q).toarray()
    det_phase = np.linalg.det(dmat).conj() ** space.parity
    return MatterOperator(space, sp.csr_matrix(expm(1j * exponent) * det_phase))


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def charge_su2(space: VertexFock, entry: GroupCatalogEntry) -> list[MatterOperator]:
    """Non-Abelian charges Q_i = psi^dag (sigma_i / 2) psi of an SU(2) vertex."""
    if entry.lie_kind != "su2":
        raise ValueError("SU(2) charges require an SU(2) catalog entry")
    if space.n_modes != 2:
        raise ValueError("SU(2) fundamental matter needs exactly 2 modes")
    return [bilinear(space, s / 2.0) for s in PAULI]


def charge_u1(space: VertexFock) -> MatterOperator:
    """Staggered Abelian charge Q = psi^dag psi - (1 - (-1)^parity)/2."""
    shift = (1.0 - (-1.0) ** space.parity) / 2.0
    states = np.arange(space.dim)
    diag = np.zeros(space.dim)
    for a in range(space.n_modes):
        diag += (states >> a) & 1
    return MatterOperator(space, sp.diags((diag - shift).astype(complex), format="csr"))


def charges(space: VertexFock, entry: GroupCatalogEntry) -> list[MatterOperator]:
    """The charges entering the Gauss law generators for a Lie catalog."""
    if entry.lie_kind == "su2":
        return charge_su2(space, entry)
    if entry.lie_kind == "u1":
        return [charge_u1(space)]
    raise ValueError("generator-form charges exist only for Lie catalogs")
