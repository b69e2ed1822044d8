"""Single-link Hilbert space and link-local operators.

A link carries one particle in one of the representation states |j m n>
(canonical ordering from group_core), or equivalently, for finite groups,
one of the group element states |g>.  The two bases are related by the
generalized Fourier transform, and every operator here can be built in
either basis and converted through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .clebsch_gordan import cg, decompose
from .group_core import GroupCatalogEntry, fourier_matrix, rep_basis_order

SPARSE_DROP_TOL = 1e-14

REP = "rep"
GROUP = "group"


class BasisMismatchError(ValueError):
    """Operators in different bases were combined."""


def _drop_tiny(mat: sp.spmatrix, tol: float = SPARSE_DROP_TOL) -> sp.csr_matrix:
    mat = sp.csr_matrix(mat)
    mat.data[np.abs(mat.data) <= tol] = 0.0
    mat.eliminate_zeros()
    return mat


class LinkSpace:
    """Hilbert space of one link: |j m n> states, plus |g> for finite groups."""

    def __init__(self, catalog: GroupCatalogEntry):
        self.catalog = catalog
        self.rep_basis = rep_basis_order(catalog)
        self.dim = len(self.rep_basis)
        if catalog.is_lie:
            self.group_basis = None
            self.fourier = None
        else:
            self.group_basis = list(range(catalog.spec.order))
            self.fourier = fourier_matrix(catalog)
        self._block_start = {}
        offset = 0
        for ir in catalog.irreps:
            self._block_start[ir.label] = offset
            offset += ir.dim ** 2
        self.vacuum_index = self.rep_basis.index((catalog.trivial_label(), 0, 0))

    def block_slice(self, label: str) -> slice:
        start = self._block_start[label]
        return slice(start, start + self.catalog.irrep(label).dim ** 2)

    def rep_index(self, label: str, m: int, n: int) -> int:
        return self._block_start[label] + m * self.catalog.irrep(label).dim + n


@dataclass
class LinkOperator:
    """Sparse operator on one link, tagged with the basis it lives in."""

    space: LinkSpace
    basis_tag: str
    matrix: sp.csr_matrix

    def __post_init__(self):
        self.matrix = _drop_tiny(self.matrix)

    def _compatible(self, other: "LinkOperator"):
        if self.space is not other.space:
            raise BasisMismatchError("operators live on different link spaces")
        if self.basis_tag != other.basis_tag:
            raise BasisMismatchError(
                f"cannot combine {self.basis_tag!r} with {other.basis_tag!r} operators")

    def __matmul__(self, other: "LinkOperator") -> "LinkOperator":
        self._compatible(other)
        return LinkOperator(self.space, self.basis_tag, self.matrix @ other.matrix)

    def __add__(self, other: "LinkOperator") -> "LinkOperator":
        self._compatible(other)
        return LinkOperator(self.space, self.basis_tag, self.matrix + other.matrix)

    def __sub__(self, other: "LinkOperator") -> "LinkOperator":
        self._compatible(other)
        return LinkOperator(self.space, self.basis_tag, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "LinkOperator":
        return LinkOperator(self.space, self.basis_tag, self.matrix * scalar)

    __rmul__ = __mul__

    def dagger(self) -> "LinkOperator":
        return LinkOperator(self.space, self.basis_tag,
                            self.matrix.conj().T.tocsr())

    def to_basis(self, basis_tag: str) -> "LinkOperator":
        """Convert between bases through the Fourier unitary (finite groups)."""
        if basis_tag == self.basis_tag:
            return self
        f = self.space.fourier
        if f is None:
            raise BasisMismatchError("Lie link spaces only have the rep basis")
        dense = self.matrix.toarray()
        if basis_tag == GROUP:
            converted = f @ dense @ f.conj().T
        elif basis_tag == REP:
            converted = f.conj().T @ dense @ f
        else:
            raise ValueError(f"unknown basis tag {basis_tag!r}")
        return LinkOperator(self.space, basis_tag, sp.csr_matrix(converted))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def identity_operator(space: LinkSpace, basis_tag: str = REP) -> LinkOperator:
    return LinkOperator(space, basis_tag, sp.identity(space.dim, dtype=complex, format="csr"))


# ---------------------------------------------------------------------------
# transformation operators
# ---------------------------------------------------------------------------

def _element_matrices(space: LinkSpace, g) -> dict[str, np.ndarray]:
    """D^j(g) per irrep, for a finite element index or a Lie angle vector."""
    if space.catalog.is_lie:
        return {ir.label: np.atleast_2d(ir.matrix_angle(g))
                for ir in space.catalog.irreps}
    return {ir.label: ir.matrix(int(g)) for ir in space.catalog.irreps}


def theta_left(space: LinkSpace, g) -> LinkOperator:
    """Left transformation in the rep basis: D^{j*}(g) on the m index, blockwise.

    ``g`` is an element index for finite groups, or the angle vector of
    exp(i alpha . L) for Lie catalogs.
    """
    blocks = [np.kron(d.conj(), np.eye(d.shape[0]))
              for d in _element_matrices(space, g).values()]
    return LinkOperator(space, REP, sp.block_diag(blocks, format="csr"))


def theta_right(space: LinkSpace, g) -> LinkOperator:
    """Right transformation in the rep basis: D^j(g) on the n index, blockwise."""
    blocks = [np.kron(np.eye(d.shape[0]), d)
              for d in _element_matrices(space, g).values()]
    return LinkOperator(space, REP, sp.block_diag(blocks, format="csr"))


def theta_group_basis(space: LinkSpace, g: int, side: str) -> LinkOperator:
    """Translation permutations on |h>: left sends h -> g h, right h -> h g^-1."""
    if space.catalog.is_lie:
        raise BasisMismatchError("group element basis requires a finite group")
    spec = space.catalog.spec
    h = np.arange(spec.order)
    if side == "L":
        target = spec.mul[g, h]
    elif side == "R":
        target = spec.mul[h, spec.inv[g]]
    else:
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    mat = sp.coo_matrix((np.ones(spec.order), (target, h)),
                        shape=(spec.order, spec.order), dtype=complex)
    return LinkOperator(space, GROUP, mat.tocsr())


# ---------------------------------------------------------------------------
# the connection operator U^j
# ---------------------------------------------------------------------------

@dataclass
class UOperator:
    """Matrix of operators U^j_{mn}, plus the coupling channels a truncation lost."""

    space: LinkSpace
    j: str
    basis_tag: str
    entries: list[list[LinkOperator]]
    dropped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def entry(self, m: int, n: int) -> LinkOperator:
        return self.entries[m][n]

    def dagger_entry(self, m: int, n: int) -> LinkOperator:
        """(U^dag)_{mn} = (U_{nm})^dag."""
        return self.entries[n][m].dagger()

    def to_basis(self, basis_tag: str) -> "UOperator":
        if basis_tag == self.basis_tag:
            return self
        return UOperator(
            space=self.space, j=self.j, basis_tag=basis_tag,
            entries=[[op.to_basis(basis_tag) for op in row] for row in self.entries],
            dropped=list(self.dropped))


def u_matrix(space: LinkSpace, j: Optional[str] = None, basis_tag: str = REP) -> UOperator:
    """Build the connection U^j as a dim(j) x dim(j) matrix of link operators.

    Rep basis: <K N N'|U_{mm'}|J M M'> = sqrt(dim J/dim K) <JMjm|KN><KN'|JM'jm'>*
    summed over the coupling channels available in the catalog; channels
    outside a Lie truncation are skipped and recorded in ``dropped``.
    Group basis (finite): <g|U_{mn}|h> = D^j_{mn}(g) delta_{gh}.
    """
    catalog = space.catalog
    j = catalog.fundamental if j is None else j
    dim_j = catalog.irrep(j).dim
    if basis_tag == GROUP:
        if catalog.is_lie:
            raise BasisMismatchError("group element basis requires a finite group")
        mats = catalog.irrep(j).matrices
        entries = [[LinkOperator(space, GROUP, sp.diags(mats[:, m, n], format="csr"))
                    for n in range(dim_j)] for m in range(dim_j)]
        return UOperator(space=space, j=j, basis_tag=GROUP, entries=entries)
    if basis_tag != REP:
        raise ValueError(f"unknown basis tag {basis_tag!r}")

    dense = [[np.zeros((space.dim, space.dim), dtype=complex)
              for _ in range(dim_j)] for _ in range(dim_j)]
    dropped = []
    for ir_J in catalog.irreps:
        dec = decompose(catalog, ir_J.label, j)
        dropped.extend((ir_J.label, k) for k in dec.dropped)
        for k_label, _mult in dec.terms:
            tensor = cg(catalog, ir_J.label, j, k_label)
            dim_K = catalog.irrep(k_label).dim
            factor = np.sqrt(ir_J.dim / dim_K)
            rows = space.block_slice(k_label)
            cols = space.block_slice(ir_J.label)
            for m in range(dim_j):
                x_m = tensor.coeffs[:, m, :]        # (dim J, dim K)
                for mp in range(dim_j):
                    x_mp = tensor.coeffs[:, mp, :]
                    block = factor * np.kron(x_m.T, x_mp.conj().T)
                    dense[m][mp][rows, cols] += block
    entries = [[LinkOperator(space, REP, sp.csr_matrix(dense[m][n]))
                for n in range(dim_j)] for m in range(dim_j)]
    return UOperator(space=space, j=j, basis_tag=REP, entries=entries,
                     dropped=dropped)


# ---------------------------------------------------------------------------
# projectors, generators, diagnostics
# ---------------------------------------------------------------------------

def projector_rep(space: LinkSpace, j: str) -> LinkOperator:
    """Diagonal projector onto all |j m n> of one representation (rep basis)."""
    diag = np.zeros(space.dim)
    diag[space.block_slice(j)] = 1.0
    return LinkOperator(space, REP, sp.diags(diag.astype(complex), format="csr"))


def projector_class(space: LinkSpace, c: int) -> LinkOperator:
    """Diagonal projector onto |g> with g in conjugacy class c (group basis)."""
    if space.catalog.is_lie:
        raise BasisMismatchError("class projectors require a finite group")
    spec = space.catalog.spec
    diag = (spec.class_of == c).astype(complex)
    return LinkOperator(space, GROUP, sp.diags(diag, format="csr"))


def generators(space: LinkSpace) -> tuple[list[LinkOperator], list[LinkOperator]]:
    """Left and right electric generators for a Lie catalog.

    L_a acts blockwise as -T_a^T on the m index, R_a as +T_a on the n
    index; both vanish on the trivial representation block.
    """
    catalog = space.catalog
    if not catalog.is_lie:
        raise BasisMismatchError("generators are defined for Lie catalogs only")
    n_comp = catalog.n_generator_components
    left, right = [], []
    for a in range(n_comp):
        l_blocks, r_blocks = [], []
        for ir in catalog.irreps:
            t = ir.generators[a]
            eye = np.eye(ir.dim)
            l_blocks.append(np.kron(-t.T, eye))
            r_blocks.append(np.kron(eye, t))
        left.append(LinkOperator(space, REP, sp.block_diag(l_blocks, format="csr")))
        right.append(LinkOperator(space, REP, sp.block_diag(r_blocks, format="csr")))
    return left, right


def trace_diagnostic(space: LinkSpace, j: Optional[str] = None,
                     basis_tag: str = REP) -> LinkOperator:
    """The operator Tr(U^{j dag} U^j) = sum_{m,n} U_{mn}^dag U_{mn}.

    Equal to dim(j) times the identity when U is unitary (finite groups with
    a complete irrep set); a truncated SU(2) catalog shows a defect on the
    top-representation block, with weight (2 j_max + 2)/(2 j_max + 1) for
    j = 1/2.
    """
    u = u_matrix(space, j, basis_tag)
    total = None
    for m in range(u.dim):
        for n in range(u.dim):
            term = u.entry(m, n).dagger() @ u.entry(m, n)
            total = term if total is None else total + term
    return total
