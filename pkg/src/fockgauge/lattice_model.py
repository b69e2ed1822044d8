"""Global Hilbert space, Hamiltonian assembly, Gauss law and physical sectors.

Global basis ordering: one fermionic Fock factor holding every matter mode
(vertex-major, mode-minor, mode 0 in the least significant bit), followed
by one factor per link in link-index order.  Factor 0 is the most
significant digit of the mixed-radix global index.

Plaquette orientation: the plaquette anchored at vertex (x, y) multiplies
U on the bottom x-link, then U on the right y-link, then U-dagger on the
top x-link, then U-dagger on the left y-link (counterclockwise circulation).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .group_core import GroupCatalogEntry, character_table
from .link_space import (
    GROUP,
    REP,
    BasisMismatchError,
    LinkOperator,
    LinkSpace,
    UOperator,
    generators as link_generators,
    projector_rep,
    theta_group_basis,
    theta_left,
    theta_right,
    u_matrix,
)
from .matter_space import (
    VertexFock,
    annihilation_matrix,
    charges as matter_charges,
    theta_q_from_matrix,
)

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Link:
    index: int
    origin: int
    target: int
    direction: int      # 0 = x, 1 = y


@dataclass(frozen=True)
class Plaquette:
    index: int
    links: tuple[int, int, int, int]    # bottom, right, top, left


class LatticeSpec:
    """Square lattice geometry: vertices, oriented links, plaquettes."""

    def __init__(self, lx: int, ly: int,
                 boundary: Union[str, Sequence[str]] = "open",
                 include_matter: bool = True):
        if lx < 1 or ly < 1:
            raise ValueError("lattice extents must be positive")
        if isinstance(boundary, str):
            boundary = (boundary, boundary)
        bx, by = boundary
        for b in (bx, by):
            if b not in ("open", "periodic"):
                raise ValueError(f"boundary must be open or periodic, got {b!r}")
        self.lx, self.ly = lx, ly
        self.boundary = (bx, by)
        self.include_matter = include_matter

        self.n_vertices = lx * ly
        self.vertex_parity = np.array(
            [(x + y) % 2 for y in range(ly) for x in range(lx)], dtype=int)

        links: list[Link] = []
        self._link_at: dict[tuple[int, int], int] = {}
        for y in range(ly):
            for x in range(lx):
                v = self.vertex_index(x, y)
                for direction in (0, 1):
                    target = self.neighbor(x, y, direction)
                    if target is None:
                        continue
                    self._link_at[(v, direction)] = len(links)
                    links.append(Link(index=len(links), origin=v,
                                      target=target, direction=direction))
        self.links = links

        plaquettes: list[Plaquette] = []
        for y in range(ly):
            for x in range(lx):
                ids = self._plaquette_links(x, y)
                if ids is not None:
                    plaquettes.append(Plaquette(index=len(plaquettes), links=ids))
        self.plaquettes = plaquettes

    def vertex_index(self, x: int, y: int) -> int:
        return x % self.lx + self.lx * (y % self.ly)

    def vertex_xy(self, v: int) -> tuple[int, int]:
        return v % self.lx, v // self.lx

    def neighbor(self, x: int, y: int, direction: int) -> Optional[int]:
        bx, by = self.boundary
        if direction == 0:
            if x + 1 >= self.lx and bx == "open":
                return None
            return self.vertex_index(x + 1, y)
        if y + 1 >= self.ly and by == "open":
            return None
        return self.vertex_index(x, y + 1)

    def link_index(self, x: int, y: int, direction: int) -> Optional[int]:
        return self._link_at.get((self.vertex_index(x, y), direction))

    def _plaquette_links(self, x, y):
        bottom = self.link_index(x, y, 0)
        right = self.link_index(x + 1, y, 1)
        top = self.link_index(x, y + 1, 0)
        left = self.link_index(x, y, 1)
        if None in (bottom, right, top, left):
            return None
        return (bottom, right, top, left)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def links_at_vertex(self, v: int) -> list[tuple[Link, str]]:
        """Incident links with their role, 'out' (origin) or 'in' (target)."""
        out = []
        for link in self.links:
            if link.origin == v:
                out.append((link, "out"))
            if link.target == v:
                out.append((link, "in"))
        return out


@dataclass
class ModelParams:
    """Couplings of the Hamiltonian.

    ``epsilon`` is a single tunneling coefficient or one complex value per
    link; ``electric_weights`` maps irrep labels to real weights (defaults:
    j(j+1) for SU(2), p^2 for U(1), min(p, N-p)^2 for Z_N clock charges,
    otherwise they must be supplied).  ``terms`` selects Hamiltonian pieces
    out of {mass, tunneling, electric, magnetic}; None means every piece
    applicable to the model.  ``include_hc`` exists for fault injection in
    the verification suite: switching it off drops the Hermitian conjugate
    of the tunneling and plaquette sums.
    """

    mass: float = 0.0
    epsilon: Union[complex, Sequence[complex]] = 1.0
    coupling: float = 1.0
    electric_weights: Optional[dict[str, float]] = None
    magnetic_rep: Optional[str] = None
    staggered: bool = True
    terms: Optional[Sequence[str]] = None
    include_hc: bool = True


def default_electric_weights(entry: GroupCatalogEntry) -> Optional[dict[str, float]]:
    if entry.lie_kind in ("su2", "u1"):
        return {ir.label: float(ir.casimir) for ir in entry.irreps}
    labels = [ir.label for ir in entry.irreps]
    n = len(labels)
    is_clock = (not entry.is_lie
                and all(ir.dim == 1 for ir in entry.irreps)
                and sorted(labels) == sorted(str(p) for p in range(n)))
    if is_clock:
        return {str(p): float(min(p, n - p) ** 2) for p in range(n)}
    return None


class GlobalBasis:
    """Mixed-radix index over [fermion factor?] + link factors."""

    def __init__(self, factor_dims: Sequence[int], has_matter: bool,
                 n_vertices: int, modes_per_vertex: int):
        self.factor_dims = list(factor_dims)
        self.has_matter = has_matter
        self.n_vertices = n_vertices
        self.modes_per_vertex = modes_per_vertex
        self.n_fermion_modes = n_vertices * modes_per_vertex if has_matter else 0
        self.dim = int(np.prod([1] + self.factor_dims))
        strides = [1] * len(self.factor_dims)
        for i in range(len(self.factor_dims) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.factor_dims[i + 1]
        self.strides = strides

    @property
    def fermion_factor(self) -> int:
        if not self.has_matter:
            raise ValueError("model has no matter factor")
        return 0

    def link_factor(self, link_index: int) -> int:
        return (1 if self.has_matter else 0) + link_index

    def encode(self, digits: Sequence[int]) -> int:
        return int(sum(d * s for d, s in zip(digits, self.strides)))

    def decode(self, index: int) -> list[int]:
        return [(index // s) % d for s, d in zip(self.strides, self.factor_dims)]

    def digit_array(self, factor: int) -> np.ndarray:
        """The digit of every global index at one factor, vectorized."""
        idx = np.arange(self.dim)
        return (idx // self.strides[factor]) % self.factor_dims[factor]


@dataclass
class GlobalOperator:
    """Sparse complex operator over an explicitly enumerated global basis."""

    basis: GlobalBasis
    matrix: sp.csr_matrix

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix)
        mat.sum_duplicates()
        mat.eliminate_zeros()
        self.matrix = mat

    def _compatible(self, other: "GlobalOperator"):
        if self.basis is not other.basis:
            raise BasisMismatchError("operators live on different global bases")

    def __add__(self, other):
        self._compatible(other)
        return GlobalOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        self._compatible(other)
        return GlobalOperator(self.basis, self.matrix - other.matrix)

    def __matmul__(self, other):
        self._compatible(other)
        return GlobalOperator(self.basis, self.matrix @ other.matrix)

    def __mul__(self, scalar: complex):
        return GlobalOperator(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def dagger(self) -> "GlobalOperator":
        return GlobalOperator(self.basis, self.matrix.conj().T.tocsr())

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def hermiticity_residual(self) -> float:
        diff = (self.matrix - self.matrix.conj().T).tocoo()
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return self.hermiticity_residual() <= tol

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


class Model:
    """A gauge group on a lattice with parameters, ready for assembly."""

    def __init__(self, entry: GroupCatalogEntry, lattice: LatticeSpec,
                 params: ModelParams, basis_tag: str = REP):
        if basis_tag not in (REP, GROUP):
            raise ValueError(f"basis must be {REP!r} or {GROUP!r}")
        if basis_tag == GROUP and entry.is_lie:
            raise BasisMismatchError("Lie catalogs support only the rep basis")
        self.entry = entry
        self.lattice = lattice
        self.params = params
        self.basis_tag = basis_tag
        self.link_space = LinkSpace(entry)

        if lattice.include_matter:
            n_modes = entry.fundamental_irrep.dim
            self.vertex_spaces = [VertexFock(n_modes, int(p))
                                  for p in lattice.vertex_parity]
            if params.staggered:
                bx, by = lattice.boundary
                if (bx == "periodic" and lattice.lx % 2) or \
                   (by == "periodic" and lattice.ly % 2):
                    raise ValueError("staggered matter on a periodic direction "
                                     "requires an even extent")
            fermion_dim = [1 << (n_modes * lattice.n_vertices)]
        else:
            self.vertex_spaces = []
            fermion_dim = []
        self.global_basis = GlobalBasis(
            fermion_dim + [self.link_space.dim] * lattice.n_links,
            has_matter=lattice.include_matter,
            n_vertices=lattice.n_vertices,
            modes_per_vertex=(self.vertex_spaces[0].n_modes
                              if lattice.include_matter else 0))

        eps = params.epsilon
        if np.isscalar(eps):
            self.epsilon = np.full(lattice.n_links, complex(eps))
        else:
            eps = np.asarray(eps, dtype=complex)
            if eps.shape != (lattice.n_links,):
                raise ValueError(
                    f"epsilon must be a scalar or one value per link "
                    f"({lattice.n_links}), got shape {eps.shape}")
            self.epsilon = eps

        self.magnetic_rep = params.magnetic_rep or entry.fundamental
        if not entry.has_irrep(self.magnetic_rep):
            raise ValueError(f"magnetic representation {self.magnetic_rep!r} "
                             f"is not in the catalog")
        self._u_ops: dict[str, UOperator] = {}
        self._fermion_ops: dict[int, sp.csr_matrix] = {}

    # -- resolved pieces ----------------------------------------------------

    @property
    def terms(self) -> tuple[str, ...]:
        chosen = self.params.terms
        if chosen is None:
            chosen = []
            if self.lattice.include_matter:
                chosen += ["mass", "tunneling"]
            chosen += ["electric", "magnetic"]
        known = {"mass", "tunneling", "electric", "magnetic"}
        bad = set(chosen) - known
        if bad:
            raise ValueError(f"unknown Hamiltonian terms {sorted(bad)}")
        if not self.lattice.include_matter:
            for t in ("mass", "tunneling"):
                if t in chosen:
                    raise ValueError(f"term {t!r} requires matter")
        if ("electric" in chosen or "magnetic" in chosen) and \
                self.params.coupling == 0:
            raise ValueError("coupling must be nonzero for gauge field terms")
        return tuple(chosen)

    def u_op(self, label: str) -> UOperator:
        if label not in self._u_ops:
            self._u_ops[label] = u_matrix(self.link_space, label, self.basis_tag)
        return self._u_ops[label]

    @property
    def u_tunneling(self) -> UOperator:
        """Connection in the matter representation, used by the hopping term."""
        return self.u_op(self.entry.fundamental)

    @property
    def u_magnetic(self) -> UOperator:
        """Connection in the plaquette representation."""
        return self.u_op(self.magnetic_rep)

    def electric_weights(self) -> dict[str, float]:
        weights = self.params.electric_weights
        if weights is None:
            weights = default_electric_weights(self.entry)
        if weights is None:
            raise ValueError(
                "no default electric weights for this group; supply "
                "ModelParams.electric_weights or drop the electric term")
        missing = [ir.label for ir in self.entry.irreps if ir.label not in weights]
        if missing:
            raise ValueError(f"electric_weights missing irreps {missing}")
        return {k: float(v) for k, v in weights.items()}

    def mass_at(self, vertex: int) -> float:
        m = self.params.mass
        if self.params.staggered:
            return ((-1.0) ** int(self.lattice.vertex_parity[vertex])) * m
        return m

    # -- small operator caches ----------------------------------------------

    def fermion_annihilation(self, vertex: int, mode: int) -> sp.csr_matrix:
        """psi at a global mode, over the whole fermion factor (string signs included)."""
        gm = vertex * self.global_basis.modes_per_vertex + mode
        if gm not in self._fermion_ops:
            self._fermion_ops[gm] = annihilation_matrix(
                self.global_basis.n_fermion_modes, gm)
        return self._fermion_ops[gm]

    def link_theta(self, g, side: str) -> LinkOperator:
        if self.basis_tag == GROUP:
            return theta_group_basis(self.link_space, g, side)
        if side == "L":
            return theta_left(self.link_space, g)
        return theta_right(self.link_space, g)


def build_model(entry: GroupCatalogEntry, lattice: LatticeSpec,
                params: Optional[ModelParams] = None,
                basis: str = REP) -> Model:
    return Model(entry, lattice, params or ModelParams(), basis)


# ---------------------------------------------------------------------------
# operator embedding
# ---------------------------------------------------------------------------

def _embed_factors(basis: GlobalBasis,
                   ops: dict[int, list[sp.spmatrix]]) -> sp.csr_matrix:
    """Kronecker placement of per-factor operator products, identity elsewhere."""
    result = None
    pending_identity = 1
    for factor, dim in enumerate(basis.factor_dims):
        if factor in ops:
            block = ops[factor][0]
            for extra in ops[factor][1:]:
                block = block @ extra
            if pending_identity > 1:
                eye = sp.identity(pending_identity, dtype=complex, format="csr")
                result = eye if result is None else sp.kron(result, eye, format="csr")
                pending_identity = 1
            result = block if result is None else sp.kron(result, block, format="csr")
        else:
            pending_identity *= dim
    if pending_identity > 1:
        eye = sp.identity(pending_identity, dtype=complex, format="csr")
        result = eye if result is None else sp.kron(result, eye, format="csr")
    if result is None:
        result = sp.identity(basis.dim, dtype=complex, format="csr")
    return sp.csr_matrix(result)


def embed_link(model: Model, op: LinkOperator, link_index: int) -> GlobalOperator:
    """Place a link operator on one link factor, identity everywhere else."""
    if op.basis_tag != model.basis_tag:
        raise BasisMismatchError(
            f"operator is in the {op.basis_tag!r} basis but the model uses "
            f"{model.basis_tag!r}")
    if not 0 <= link_index < model.lattice.n_links:
        raise ValueError(f"link {link_index} out of range")
    factor = model.global_basis.link_factor(link_index)
    return GlobalOperator(model.global_basis,
                          _embed_factors(model.global_basis, {factor: [op.matrix]}))


def embed_vertex(model: Model, matrix: sp.spmatrix, vertex: int) -> GlobalOperator:
    """Embed a parity-even vertex Fock operator into the global fermion factor.

    Only valid for operators commuting with the vertex fermion parity
    (every gauge transformation and charge here does), so no string factors
    are needed across the other vertices.
    """
    gb = model.global_basis
    mm = gb.modes_per_vertex
    before = sp.identity(1 << (mm * vertex), dtype=complex, format="csr")
    after = sp.identity(1 << (mm * (gb.n_vertices - vertex - 1)),
                        dtype=complex, format="csr")
    mat = sp.kron(after, sp.kron(sp.csr_matrix(matrix), before), format="csr")
    return GlobalOperator(gb, _embed_factors(gb, {gb.fermion_factor: [mat]}))


def embed_fermion_bilinear(model: Model, vertex_a: int, vertex_b: int,
                           coeff: np.ndarray) -> GlobalOperator:
    """sum_ab coeff[a, b] psi^dag_(vertex_a, a) psi_(vertex_b, b), strings included."""
    gb = model.global_basis
    n_v = gb.n_vertices
    if not (0 <= vertex_a < n_v and 0 <= vertex_b < n_v):
        raise ValueError("vertex out of range")
    coeff = np.asarray(coeff, dtype=complex)
    total = None
    for a in range(gb.modes_per_vertex):
        for b in range(gb.modes_per_vertex):
            if coeff[a, b] == 0:
                continue
            term = coeff[a, b] * (
                model.fermion_annihilation(vertex_a, a).conj().T
                @ model.fermion_annihilation(vertex_b, b))
            total = term if total is None else total + term
    if total is None:
        total = sp.csr_matrix((gb.factor_dims[gb.fermion_factor],) * 2, dtype=complex)
    return GlobalOperator(gb, _embed_factors(gb, {gb.fermion_factor: [total]}))


# ---------------------------------------------------------------------------
# Hamiltonian assembly
# ---------------------------------------------------------------------------

def _mass_jobs(model: Model) -> list[Callable[[], sp.csr_matrix]]:
    gb = model.global_basis

    def job():
        states = np.arange(gb.factor_dims[gb.fermion_factor])
        diag = np.zeros(len(states))
        mm = gb.modes_per_vertex
        for v in range(gb.n_vertices):
            count = np.zeros(len(states))
            for a in range(mm):
                count += (states >> (v * mm + a)) & 1
            diag += model.mass_at(v) * count
        mat = sp.diags(diag.astype(complex), format="csr")
        return _embed_factors(gb, {gb.fermion_factor: [mat]})

    return [job]


def _tunneling_jobs(model: Model) -> list[Callable[[], sp.csr_matrix]]:
    gb = model.global_basis
    u = model.u_tunneling
    dim_j = u.dim

    def one_link(link: Link):
        def job():
            total = None
            for a in range(dim_j):
                for b in range(dim_j):
                    ferm = (model.fermion_annihilation(link.origin, a).conj().T
                            @ model.fermion_annihilation(link.target, b))
                    piece = _embed_factors(gb, {
                        gb.fermion_factor: [ferm],
                        gb.link_factor(link.index): [u.entry(a, b).matrix],
                    })
                    total = piece if total is None else total + piece
            total = model.epsilon[link.index] * total
            if model.params.include_hc:
                total = total + total.conj().T
            return total
        return job

    return [one_link(link) for link in model.lattice.links]


def _electric_jobs(model: Model) -> list[Callable[[], sp.csr_matrix]]:
    gb = model.global_basis
    weights = model.electric_weights()
    g2 = model.params.coupling ** 2

    def link_operator() -> sp.csr_matrix:
        op = None
        for label, w in weights.items():
            if not model.entry.has_irrep(label):
                continue
            proj = projector_rep(model.link_space, label)
            if model.basis_tag == GROUP:
                proj = proj.to_basis(GROUP)
            term = (g2 / 2.0 * w) * proj
            op = term if op is None else op + term
        return op.matrix

    link_op = link_operator()

    def one_link(index: int):
        def job():
            return _embed_factors(gb, {gb.link_factor(index): [link_op]})
        return job

    return [one_link(link.index) for link in model.lattice.links]


def _plaquette_trace_matrix(model: Model, plaq: Plaquette) -> sp.csr_matrix:
    """Tr(U_1 U_2 U_3^dag U_4^dag) around one plaquette, in the model basis."""
    gb = model.global_basis
    l1, l2, l3, l4 = plaq.links
    if model.basis_tag == GROUP:
        spec = model.entry.spec
        table = character_table(model.entry)
        chi = table.chi[model.entry.irrep_index(model.magnetic_rep)]
        d1 = gb.digit_array(gb.link_factor(l1))
        d2 = gb.digit_array(gb.link_factor(l2))
        d3 = gb.digit_array(gb.link_factor(l3))
        d4 = gb.digit_array(gb.link_factor(l4))
        hol = spec.mul[spec.mul[d1, d2], spec.mul[spec.inv[d3], spec.inv[d4]]]
        return sp.diags(chi[spec.class_of[hol]].astype(complex), format="csr")
    u = model.u_magnetic
    dim_j = u.dim
    total = None
    for a in range(dim_j):
        for b in range(dim_j):
            for c in range(dim_j):
                for d in range(dim_j):
                    ops: dict[int, list[sp.spmatrix]] = {}
                    for link_idx, mat in (
                            (l1, u.entry(a, b).matrix),
                            (l2, u.entry(b, c).matrix),
                            (l3, u.dagger_entry(c, d).matrix),
                            (l4, u.dagger_entry(d, a).matrix)):
                        ops.setdefault(gb.link_factor(link_idx), []).append(mat)
                    piece = _embed_factors(gb, ops)
                    total = piece if total is None else total + piece
    return total


def plaquette_trace(model: Model, plaquette_index: int) -> GlobalOperator:
    """The (in general non-Hermitian) Wilson plaquette operator Tr W."""
    plaq = model.lattice.plaquettes[plaquette_index]
    return GlobalOperator(model.global_basis, _plaquette_trace_matrix(model, plaq))


def _magnetic_jobs(model: Model) -> list[Callable[[], sp.csr_matrix]]:
    pref = -1.0 / (2.0 * model.params.coupling ** 2)

    def one_plaquette(plaq: Plaquette):
        def job():
            total = pref * _plaquette_trace_matrix(model, plaq)
            if model.params.include_hc:
                total = total + total.conj().T
            return total
        return job

    return [one_plaquette(p) for p in model.lattice.plaquettes]


_TERM_BUILDERS = {
    "mass": _mass_jobs,
    "tunneling": _tunneling_jobs,
    "electric": _electric_jobs,
    "magnetic": _magnetic_jobs,
}


def _run_jobs(jobs, threads: int) -> list[sp.csr_matrix]:
    if threads <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]   # fixed merge order


def _merge(basis: GlobalBasis, mats: list[sp.csr_matrix]) -> sp.csr_matrix:
    """Single sorted coordinate merge so the result is thread-count independent."""
    if not mats:
        return sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    rows = np.concatenate([m.tocoo().row for m in mats])
    cols = np.concatenate([m.tocoo().col for m in mats])
    data = np.concatenate([m.tocoo().data.astype(complex) for m in mats])
    merged = sp.coo_matrix((data, (rows, cols)), shape=(basis.dim, basis.dim))
    merged.sum_duplicates()
    out = merged.tocsr()
    out.sort_indices()
    return out


def hamiltonian_terms(model: Model, threads: int = 1,
                      names: Optional[Sequence[str]] = None) -> dict[str, GlobalOperator]:
    """Each enabled Hamiltonian piece as its own global operator."""
    out = {}
    for name in (model.terms if names is None else names):
        jobs = _TERM_BUILDERS[name](model)
        mats = _run_jobs(jobs, threads)
        out[name] = GlobalOperator(model.global_basis, _merge(model.global_basis, mats))
    return out


def build_hamiltonian(model: Model, threads: int = 1) -> GlobalOperator:
    """Assemble the full Hamiltonian of the model's enabled terms."""
    terms = hamiltonian_terms(model, threads=threads)
    return GlobalOperator(model.global_basis,
                          _merge(model.global_basis,
                                 [t.matrix for t in terms.values()]))


# ---------------------------------------------------------------------------
# Gauss law
# ---------------------------------------------------------------------------

def gauss_operator(model: Model, vertex: int, g) -> GlobalOperator:
    """Gauge transformation at one vertex: Theta^L on outgoing links,
    Theta^R on ingoing links, and the matter transformation on the vertex.

    ``g`` is an element index for finite groups or an angle vector for Lie
    catalogs.  The three kinds of factors act on disjoint parts of the
    global space, so their ordering is immaterial.
    """
    if not 0 <= vertex < model.lattice.n_vertices:
        raise ValueError(f"vertex {vertex} out of range")
    gb = model.global_basis
    ops: dict[int, list[sp.spmatrix]] = {}
    for link, role in model.lattice.links_at_vertex(vertex):
        side = "L" if role == "out" else "R"
        theta = model.link_theta(g, side)
        ops.setdefault(gb.link_factor(link.index), []).append(theta.matrix)
    if model.lattice.include_matter:
        space = model.vertex_spaces[vertex]
        ir = model.entry.fundamental_irrep
        dmat = (np.atleast_2d(ir.matrix_angle(g)) if model.entry.is_lie
                else ir.matrix(int(g)))
        tq = theta_q_from_matrix(space, dmat).matrix
        mm = gb.modes_per_vertex
        before = sp.identity(1 << (mm * vertex), dtype=complex, format="csr")
        after = sp.identity(1 << (mm * (gb.n_vertices - vertex - 1)),
                            dtype=complex, format="csr")
        ops[gb.fermion_factor] = [sp.kron(after, sp.kron(tq, before), format="csr")]
    return GlobalOperator(gb, _embed_factors(gb, ops))


def gauss_generators(model: Model, vertex: int) -> list[GlobalOperator]:
    """Hermitian Gauss generators G_a = sum_in R_a + sum_out L_a + Q_a (Lie)."""
    if not model.entry.is_lie:
        raise ValueError("generator form of the Gauss law requires a Lie catalog; "
                         "use gauss_operator / physical_projector for finite groups")
    gb = model.global_basis
    left, right = link_generators(model.link_space)
    out = []
    for a in range(model.entry.n_generator_components):
        mats = []
        for link, role in model.lattice.links_at_vertex(vertex):
            op = left[a] if role == "out" else right[a]
            mats.append(_embed_factors(
                gb, {gb.link_factor(link.index): [op.matrix]}))
        if model.lattice.include_matter:
            q = matter_charges(model.vertex_spaces[vertex], model.entry)[a]
            mats.append(embed_vertex(model, q.matrix, vertex).matrix)
        out.append(GlobalOperator(gb, _merge(gb, mats)))
    return out


def gauss_casimir(model: Model) -> GlobalOperator:
    """sum over vertices and components of G_a^2; physical states are its nullspace."""
    gb = model.global_basis
    total = None
    for v in range(model.lattice.n_vertices):
        for g_a in gauss_generators(model, v):
            sq = g_a.matrix @ g_a.matrix
            total = sq if total is None else total + sq
    return GlobalOperator(gb, total)


def physical_projector(model: Model,
                       sector: Optional[dict[int, str]] = None) -> GlobalOperator:
    """Projector onto a Gauss-law sector (finite groups).

    P is the product over vertices of the character-weighted group averages
    (dim(s)/|G|) sum_g chi_s(g)* Theta_{g, vertex}; the default sector is
    the trivial irrep everywhere (no static charges).  For Lie catalogs use
    gauss_casimir / physical_basis instead.
    """
    if model.entry.is_lie:
        raise ValueError("character projector needs a finite group; for Lie "
                         "catalogs filter the nullspace of gauss_casimir")
    sector = sector or {}
    trivial = model.entry.trivial_label()
    total = None
    for v in range(model.lattice.n_vertices):
        p_v = vertex_sector_average(model, v, sector.get(v, trivial))
        total = p_v if total is None else total @ p_v
    return total


def vertex_sector_average(model: Model, vertex: int, sector_label: str) -> GlobalOperator:
    """(dim(s)/|G|) sum_g chi_s(g)* Theta_{g, vertex} for one vertex."""
    spec = model.entry.spec
    ir = model.entry.irrep(sector_label)
    chi = np.array([np.trace(ir.matrices[g]) for g in range(spec.order)])
    gb = model.global_basis
    mats = [(ir.dim / spec.order) * chi[g].conjugate()
            * gauss_operator(model, vertex, g).matrix
            for g in range(spec.order)]
    return GlobalOperator(gb, _merge(gb, mats))


def physical_basis(model: Model, tol: float = 1e-8,
                   sector: Optional[dict[int, str]] = None) -> np.ndarray:
    """Dense orthonormal columns spanning the physical sector (desk scale).

    Finite groups: eigenvectors of the sector projector with eigenvalue 1.
    Lie catalogs: null eigenvectors of the Gauss Casimir.
    """
    dim = model.global_basis.dim
    if dim > 4096:
        raise ValueError(f"dense sector basis limited to dim 4096, got {dim}")
    if model.entry.is_lie:
        casimir = gauss_casimir(model).toarray()
        vals, vecs = np.linalg.eigh(casimir)
        return vecs[:, np.abs(vals) <= tol]
    proj = physical_projector(model, sector).toarray()
    vals, vecs = np.linalg.eigh((proj + proj.conj().T) / 2.0)
    return vecs[:, np.abs(vals - 1.0) <= tol]


def vacuum_state(model: Model) -> np.ndarray:
    """Strong-coupling vacuum: trivial rep on every link, Dirac sea fermions.

    In the group element basis the trivial link state is the uniform
    superposition over group elements.
    """
    gb = model.global_basis
    factors = []
    if model.lattice.include_matter:
        ferm = np.zeros(gb.factor_dims[gb.fermion_factor])
        index = 0
        mm = gb.modes_per_vertex
        for v in range(gb.n_vertices):
            if model.lattice.vertex_parity[v] == 1:
                for a in range(mm):
                    index |= 1 << (v * mm + a)
        ferm[index] = 1.0
        factors.append(ferm)
    link_dim = model.link_space.dim
    if model.basis_tag == GROUP:
        link_vec = np.full(link_dim, 1.0 / np.sqrt(link_dim))
    else:
        link_vec = np.zeros(link_dim)
        link_vec[model.link_space.vacuum_index] = 1.0
    factors.extend([link_vec] * model.lattice.n_links)
    state = np.ones(1)
    for f in factors:
        state = np.kron(state, f)
    return state.astype(complex)
