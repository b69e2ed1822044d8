"""Machine-checkable identity suite for a configured model.

Runs the algebraic invariants of every layer (group data, transformation
operators, connection operators, matter operators, assembled Hamiltonian)
against the concrete model and reports one residual per identity.  Used by
the command line ``verify`` task; the unit tests exercise the same
identities module by module.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .clebsch_gordan import cg, decompose, verify_cg
from .group_core import CheckResult, ValidationReport, validate
from .lattice_model import (
    GROUP,
    REP,
    Model,
    gauss_generators,
    gauss_operator,
    hamiltonian_terms,
    physical_projector,
    vacuum_state,
)
from .link_space import generators as link_generators, projector_rep
from .matter_space import VertexFock, annihilation_matrix, theta_q

GAUSS_PROBES = 20
COVARIANCE_SAMPLES = 20
BASIS_AGREEMENT_MAX_DIM = 4096
PROJECTOR_MAX_DIM = 4096

TIGHT = 1e-12
LOOSE = 1e-10


def _mabs(mat) -> float:
    if sp.issparse(mat):
        mat = mat.tocoo()
        return float(np.abs(mat.data).max()) if mat.nnz else 0.0
    arr = np.asarray(mat)
    return float(np.abs(arr).max()) if arr.size else 0.0


def verify_model(model: Model, seed: int = 0) -> ValidationReport:
    report = validate(model.entry)
    for check in report.checks:
        check.name = f"group.{check.name}"
    _check_theta(model, report, seed)
    _check_u(model, report, seed)
    _check_cg(model, report)
    if model.lattice.include_matter:
        _check_matter(model, report)
    _check_hamiltonian(model, report, seed)
    return report


# ---------------------------------------------------------------------------

def _sample_elements(model: Model, seed: int, count: int):
    """Group elements to probe with: all of them (finite) or random angles (Lie)."""
    if not model.entry.is_lie:
        return list(range(model.entry.spec.order))
    rng = np.random.default_rng(seed)
    n = model.entry.n_generator_components
    return [rng.uniform(-np.pi, np.pi, n) for _ in range(COVARIANCE_SAMPLES)]


def _check_theta(model: Model, report: ValidationReport, seed: int):
    space = model.link_space
    entry = model.entry
    from .link_space import theta_left, theta_right, theta_group_basis

    elements = _sample_elements(model, seed, COVARIANCE_SAMPLES)
    unit = 0.0
    lr_comm = 0.0
    thetas = [(theta_left(space, g), theta_right(space, g)) for g in elements]
    eye = np.eye(space.dim)
    for tl, tr in thetas:
        unit = max(unit, _mabs(tl.matrix @ tl.matrix.conj().T - eye))
        unit = max(unit, _mabs(tr.matrix @ tr.matrix.conj().T - eye))
        for tl2, tr2 in thetas:
            lr_comm = max(lr_comm, _mabs(tl.matrix @ tr2.matrix
                                         - tr2.matrix @ tl.matrix))
    report.add("theta.unitary", unit, TIGHT)
    report.add("theta.left_right_commute", lr_comm, TIGHT)

    if entry.is_lie:
        left, right = link_generators(space)
        l2 = sum((x @ x).matrix for x in left)
        r2 = sum((x @ x).matrix for x in right)
        report.add("theta.casimir_left_equals_right", _mabs(l2 - r2), TIGHT)
        return

    spec = entry.spec
    law = 0.0
    fourier_res = 0.0
    for g in range(spec.order):
        tlg, trg = thetas[g]
        for h in range(spec.order):
            tlh, trh = thetas[h]
            gh = spec.mul[g, h]
            law = max(law, _mabs(tlg.matrix @ tlh.matrix - thetas[gh][0].matrix))
            law = max(law, _mabs(trg.matrix @ trh.matrix - thetas[gh][1].matrix))
        for side, rep_op in (("L", tlg), ("R", trg)):
            perm = theta_group_basis(space, g, side)
            fourier_res = max(fourier_res, _mabs(
                rep_op.to_basis(GROUP).matrix - perm.matrix))
    report.add("theta.group_law", law, TIGHT)
    report.add("theta.fourier_to_translations", fourier_res, TIGHT)


def _check_u(model: Model, report: ValidationReport, seed: int):
    space = model.link_space
    entry = model.entry
    from .link_space import theta_left, theta_right, trace_diagnostic, u_matrix

    u = u_matrix(space, model.magnetic_rep, REP)
    dim_j = u.dim
    dmats = entry.irrep(model.magnetic_rep)
    elements = _sample_elements(model, seed + 1, COVARIANCE_SAMPLES)

    cov = 0.0
    for g in elements:
        if entry.is_lie:
            d = np.atleast_2d(dmats.matrix_angle(g))
        else:
            d = dmats.matrix(int(g))
        tl = theta_left(space, g).matrix
        tr = theta_right(space, g).matrix
        d_inv = d.conj().T
        for m in range(dim_j):
            for n in range(dim_j):
                lhs_r = tr @ u.entry(m, n).matrix @ tr.conj().T
                rhs_r = sum(u.entry(m, k).matrix * d[k, n] for k in range(dim_j))
                cov = max(cov, _mabs(lhs_r - rhs_r))
                lhs_l = tl @ u.entry(m, n).matrix @ tl.conj().T
                rhs_l = sum(d_inv[m, k] * u.entry(k, n).matrix for k in range(dim_j))
                cov = max(cov, _mabs(lhs_l - rhs_l))
    report.add("u.covariance", cov, TIGHT)

    if entry.is_lie:
        left, right = link_generators(space)
        t_mats = dmats.generators
        comm = 0.0
        for i, (l_i, r_i) in enumerate(zip(left, right)):
            for m in range(dim_j):
                for n in range(dim_j):
                    lhs = l_i.matrix @ u.entry(m, n).matrix \
                        - u.entry(m, n).matrix @ l_i.matrix
                    rhs = -sum(t_mats[i][m, k] * u.entry(k, n).matrix
                               for k in range(dim_j))
                    comm = max(comm, _mabs(lhs - rhs))
                    lhs = r_i.matrix @ u.entry(m, n).matrix \
                        - u.entry(m, n).matrix @ r_i.matrix
                    rhs = sum(u.entry(m, k).matrix * t_mats[i][k, n]
                              for k in range(dim_j))
                    comm = max(comm, _mabs(lhs - rhs))
        report.add("u.generator_commutators", comm, TIGHT)
        if entry.lie_kind == "su2" and model.magnetic_rep == "1/2":
            td = trace_diagnostic(space, "1/2")
            top = entry.irreps[-1].label
            f_def = (2 * float(entry.cutoff) + 2) / (2 * float(entry.cutoff) + 1)
            expect = 2 * np.eye(space.dim) - f_def * projector_rep(space, top).toarray()
            report.add("u.trace_defect_closed_form", _mabs(td.toarray() - expect), TIGHT)
        return

    unitarity = 0.0
    eye = np.eye(space.dim)
    for m in range(dim_j):
        for n in range(dim_j):
            acc = sum((u.entry(m, k) @ u.entry(n, k).dagger()).matrix
                      for k in range(dim_j))
            expect = eye if m == n else 0.0 * eye
            unitarity = max(unitarity, _mabs(acc - expect))
    report.add("u.unitarity", unitarity, TIGHT)

    u_grp = u_matrix(space, model.magnetic_rep, GROUP)
    agree = 0.0
    for m in range(dim_j):
        for n in range(dim_j):
            agree = max(agree, _mabs(u.entry(m, n).to_basis(GROUP).matrix
                                     - u_grp.entry(m, n).matrix))
    report.add("u.rep_group_basis_agreement", agree, TIGHT)


def _check_cg(model: Model, report: ValidationReport):
    entry = model.entry
    fund = model.magnetic_rep
    intertwiner = 0.0
    completeness = 0.0
    for ir in entry.irreps:
        dec = decompose(entry, ir.label, fund)
        stacks = []
        for k_label, _ in dec.terms:
            tensor = cg(entry, ir.label, fund, k_label)
            intertwiner = max(intertwiner, verify_cg(entry, tensor))
            stacks.append(tensor.matrix())
        if not dec.dropped and stacks:
            square = np.hstack(stacks)
            completeness = max(completeness, _mabs(
                square.conj().T @ square - np.eye(square.shape[1])))
    report.add("cg.intertwiner", intertwiner, LOOSE)
    report.add("cg.completeness", completeness, LOOSE)


def _check_matter(model: Model, report: ValidationReport):
    entry = model.entry
    space = VertexFock(entry.fundamental_irrep.dim, 0)
    n = space.n_modes

    acar = 0.0
    ops = [annihilation_matrix(n, a).toarray() for a in range(n)]
    for a in range(n):
        for b in range(n):
            anti = ops[a] @ ops[b] + ops[b] @ ops[a]
            acar = max(acar, _mabs(anti))
            anti_mixed = ops[a] @ ops[b].conj().T + ops[b].conj().T @ ops[a]
            expect = np.eye(space.dim) if a == b else 0.0
            acar = max(acar, _mabs(anti_mixed - expect))
    report.add("matter.anticommutation", acar, 0.0)

    elements = _sample_elements(model, 0, COVARIANCE_SAMPLES)
    for parity in (0, 1):
        vf = VertexFock(n, parity)
        thetas = [theta_q(vf, entry, g).toarray() for g in elements]
        law = unit = prop2 = covariance = 0.0
        full = vf.full_state
        for i, g in enumerate(elements):
            d = (np.atleast_2d(entry.fundamental_irrep.matrix_angle(g))
                 if entry.is_lie else entry.fundamental_irrep.matrix(int(g)))
            det = np.linalg.det(d)
            unit = max(unit, _mabs(thetas[i] @ thetas[i].conj().T - np.eye(vf.dim)))
            expect_ev = det * det.conjugate() ** parity
            prop2 = max(prop2, abs(thetas[i][full, full] - expect_ev))
            for a in range(n):
                lhs = thetas[i] @ ops[a].conj().T @ thetas[i].conj().T
                rhs = sum(ops[b].conj().T * d[b, a] for b in range(n))
                covariance = max(covariance, _mabs(lhs - rhs))
        if not entry.is_lie:
            spec = entry.spec
            for g in range(spec.order):
                for h in range(spec.order):
                    law = max(law, _mabs(thetas[g] @ thetas[h]
                                         - thetas[spec.mul[g, h]]))
            report.add(f"matter.theta_group_law_parity{parity}", law, TIGHT)
        report.add(f"matter.theta_unitary_parity{parity}", unit, TIGHT)
        report.add(f"matter.full_state_determinant_parity{parity}", prop2, TIGHT)
        report.add(f"matter.covariance_parity{parity}", covariance, TIGHT)


def _check_hamiltonian(model: Model, report: ValidationReport, seed: int):
    terms = {}
    for name in model.terms:
        try:
            terms.update(hamiltonian_terms(model, names=(name,)))
        except ValueError as exc:
            # a term that cannot be assembled is a failed check, not a crash
            report.checks.append(CheckResult(
                f"model.term_build_{name} ({exc})", float("inf"), LOOSE))
    if not terms:
        return
    herm = max(t.hermiticity_residual() for t in terms.values())
    report.add("model.terms_hermitian", herm, TIGHT)

    rng = np.random.default_rng(seed + 17)
    dim = model.global_basis.dim
    probes = []
    for _ in range(GAUSS_PROBES):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        probes.append(v / np.linalg.norm(v))

    if model.entry.is_lie:
        symmetry_ops = [g.matrix for v in range(model.lattice.n_vertices)
                        for g in gauss_generators(model, v)]
    else:
        symmetry_ops = [gauss_operator(model, v, g).matrix
                        for v in range(model.lattice.n_vertices)
                        for g in range(model.entry.spec.order)]
    for name, term in terms.items():
        worst = 0.0
        t_probes = [term.matrix @ p for p in probes]
        for s_op in symmetry_ops:
            for p, tp in zip(probes, t_probes):
                r = s_op @ tp - term.matrix @ (s_op @ p)
                worst = max(worst, float(np.linalg.norm(r)))
        report.add(f"model.gauss_commutes_with_{name}", worst, LOOSE)

    vac = vacuum_state(model)
    if model.entry.is_lie:
        from .lattice_model import gauss_casimir
        cas = gauss_casimir(model)
        report.add("model.vacuum_gauss_neutral",
                   float(np.linalg.norm(cas.matrix @ vac)), LOOSE)
    else:
        from .lattice_model import vertex_sector_average
        trivial = model.entry.trivial_label()
        worst = 0.0
        for v in range(model.lattice.n_vertices):
            p_v = vertex_sector_average(model, v, trivial)
            worst = max(worst, float(np.linalg.norm(p_v.matrix @ vac - vac)))
        report.add("model.vacuum_gauss_invariant", worst, LOOSE)
        if dim <= PROJECTOR_MAX_DIM:
            proj = physical_projector(model)
            report.add("model.projector_idempotent",
                       _mabs((proj @ proj - proj).matrix), LOOSE)

    if not model.entry.is_lie and dim <= BASIS_AGREEMENT_MAX_DIM:
        report.add("model.rep_group_hamiltonian_agreement",
                   _basis_agreement_residual(model, tuple(terms)), LOOSE)


def _basis_agreement_residual(model: Model, names) -> float:
    """Assemble H in both link bases and compare through the Fourier unitary."""
    other_tag = GROUP if model.basis_tag == REP else REP
    mirror = Model(model.entry, model.lattice, model.params, other_tag)
    h_here = _merge_terms(model, names)
    h_there = _merge_terms(mirror, names)
    f_link = sp.csr_matrix(model.link_space.fourier)
    gb = model.global_basis
    blocks = []
    if model.lattice.include_matter:
        blocks.append(sp.identity(gb.factor_dims[gb.fermion_factor],
                                  dtype=complex, format="csr"))
    blocks.extend([f_link] * model.lattice.n_links)
    f_global = blocks[0]
    for b in blocks[1:]:
        f_global = sp.kron(f_global, b, format="csr")
    # rep_op = F^dag group_op F
    if model.basis_tag == REP:
        converted = f_global.conj().T @ h_there @ f_global
    else:
        converted = f_global @ h_there @ f_global.conj().T
    return _mabs(converted - h_here)


def _merge_terms(model: Model, names) -> sp.csr_matrix:
    terms = hamiltonian_terms(model, names=names)
    total = None
    for t in terms.values():
        total = t.matrix if total is None else total + t.matrix
    return total
