import json

import numpy as np
import pytest

from fockgauge.group_core import (
    GroupFileError,
    build_builtin,
    character_table,
    dump_group_file,
    fourier_matrix,
    great_orthogonality_residual,
    load_group_file,
    parse_j_label,
    rep_basis_order,
    validate,
)


def test_d3_structure():
    d3 = build_builtin("D3")
    assert d3.spec.order == 6
    assert [ir.dim for ir in d3.irreps] == [1, 1, 2]
    assert d3.dim_sum() == 6
    assert d3.spec.n_classes == 3
    assert sorted(len(d3.spec.class_members(c)) for c in range(3)) == [1, 2, 3]
    assert validate(d3).passed


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_zn_validates(n):
    entry = build_builtin("Z_N", N=n)
    report = validate(entry)
    assert report.passed, str(report.first_failure())
    assert entry.dim_sum() == n
    assert entry.spec.n_classes == n          # Abelian: singleton classes


def test_z2_character_table():
    table = character_table(build_builtin("Z_2"))
    assert np.allclose(table.chi, [[1, 1], [1, -1]])


def test_d3_characters():
    table = character_table(build_builtin("D3"))
    assert np.allclose(table.row("2"), [2, -1, 0], atol=1e-14)
    assert np.allclose(table.row("I"), [1, 1, 1])       # trivial: all ones
    # row orthogonality: sum_C |C| chi_j chi_j'^* = |G| delta
    gram = (table.chi * table.class_sizes) @ table.chi.conj().T
    assert np.allclose(gram, 6 * np.eye(3), atol=1e-12)


def test_character_constant_on_classes():
    d3 = build_builtin("D3")
    for ir in d3.irreps:
        traces = np.einsum("gii->g", ir.matrices)
        for c in range(d3.spec.n_classes):
            members = d3.spec.class_members(c)
            assert np.ptp(traces[members].real) < 1e-12
            assert np.ptp(traces[members].imag) < 1e-12


def test_fourier_z2_exact():
    f = fourier_matrix(build_builtin("Z_2"))
    assert np.allclose(f, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)


def test_fourier_z3_is_dft():
    f = fourier_matrix(build_builtin("Z_3"))
    w = np.exp(2j * np.pi / 3)
    dft = np.array([[w ** (p * k) for p in range(3)] for k in range(3)]) / np.sqrt(3)
    assert np.abs(f - dft).max() < 1e-14


def test_fourier_d3_unitary():
    f = fourier_matrix(build_builtin("D3"))
    assert np.abs(f.conj().T @ f - np.eye(6)).max() < 1e-14


def test_fourier_and_orthogonality_fail_together():
    # the Fourier unitarity residual is the orthogonality theorem restated:
    # perturbing one irrep matrix must break both
    d3 = build_builtin("D3")
    assert great_orthogonality_residual(d3) < 1e-12
    d3.irreps[2].matrices[1, 0, 0] += 1e-3
    f = fourier_matrix(d3)
    unitarity = np.abs(f.conj().T @ f - np.eye(6)).max()
    orthogonality = great_orthogonality_residual(d3)
    assert unitarity > 1e-5 and orthogonality > 1e-5


def test_regular_representation_character():
    for entry in (build_builtin("D3"), build_builtin("Z_5")):
        table = character_table(entry)
        dims = np.array([ir.dim for ir in entry.irreps])
        reg = dims @ table.chi
        id_class = entry.spec.class_of[entry.spec.identity]
        for c in range(entry.spec.n_classes):
            expected = entry.spec.order if c == id_class else 0.0
            assert abs(reg[c] - expected) < 1e-12


def test_rep_basis_order_is_row_major():
    d3 = build_builtin("D3")
    order = rep_basis_order(d3)
    assert order[:3] == [("I", 0, 0), ("p", 0, 0), ("2", 0, 0)]
    assert order[3:] == [("2", 0, 1), ("2", 1, 0), ("2", 1, 1)]


def test_su2_trunc_basics():
    su2 = build_builtin("SU2_trunc", j_max="1/2")
    assert [ir.label for ir in su2.irreps] == ["0", "1/2"]
    assert su2.dim_sum() == 5
    assert validate(su2).passed
    assert build_builtin("SU2_trunc", j_max=1).dim_sum() == 14


def test_su2_generator_algebra():
    su2 = build_builtin("SU2_trunc", j_max="3/2")
    eps = {(0, 1): 2, (1, 2): 0, (2, 0): 1}
    for ir in su2.irreps:
        t = ir.generators
        for (a, b), c in eps.items():
            comm = t[a] @ t[b] - t[b] @ t[a]
            assert np.abs(comm - 1j * t[c]).max() < 1e-12
        total = sum(x @ x for x in t)
        assert np.abs(total - ir.casimir * np.eye(ir.dim)).max() < 1e-12
        assert float(parse_j_label(ir.label)) * (float(parse_j_label(ir.label)) + 1) \
            == pytest.approx(ir.casimir)


def test_u1_trunc_basics():
    u1 = build_builtin("U1_trunc", P=2)
    assert [ir.label for ir in u1.irreps] == ["-2", "-1", "0", "1", "2"]
    assert validate(u1).passed
    for ir in u1.irreps:
        assert ir.generators[0][0, 0] == float(ir.label)


def test_builtin_parameter_errors():
    with pytest.raises(ValueError):
        build_builtin("Z_N", N=1)
    with pytest.raises(ValueError):
        build_builtin("U1_trunc", P=0)
    with pytest.raises(ValueError):
        build_builtin("SU2_trunc", j_max="1/3")
    with pytest.raises(ValueError):
        build_builtin("Q8")


def test_validate_reports_perturbed_irrep():
    d3 = build_builtin("D3")
    d3.irreps[2].matrices[1, 0, 0] += 1e-3
    report = validate(d3)
    assert not report.passed
    by_name = {c.name: c for c in report.checks}
    assert not by_name["irreps.homomorphism"].passed
    assert by_name["irreps.homomorphism"].residual == pytest.approx(1e-3, rel=5.0)


def test_validate_reports_bad_multiplication_table(tmp_path):
    z4 = build_builtin("Z_4")
    path = tmp_path / "z4.json"
    dump_group_file(z4, path)
    doc = json.loads(path.read_text())
    doc["mul"][1], doc["mul"][2] = doc["mul"][2], doc["mul"][1]   # break one row
    path.write_text(json.dumps(doc))
    loaded = load_group_file(path)
    report = validate(loaded)
    assert not report.passed
    assert report.first_failure().name == "mul.latin_square"


def test_group_file_roundtrip(tmp_path):
    d3 = build_builtin("D3")
    path = tmp_path / "d3.json"
    dump_group_file(d3, path)
    loaded = load_group_file(path)
    assert validate(loaded).passed
    assert np.array_equal(loaded.spec.mul, d3.spec.mul)
    for a, b in zip(loaded.irreps, d3.irreps):
        assert a.label == b.label
        assert np.abs(a.matrices - b.matrices).max() < 1e-15
    assert np.abs(fourier_matrix(loaded) - fourier_matrix(d3)).max() < 1e-15


def test_group_file_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("not json {")
    with pytest.raises(GroupFileError):
        load_group_file(path)
    path.write_text(json.dumps({"name": "x", "order": 2, "mul": [0, 1, 1]}))
    with pytest.raises(GroupFileError):
        load_group_file(path)
    doc = {"name": "x", "order": 2, "mul": [0, 1, 1, 0], "fundamental": "a",
           "irreps": [{"label": "a", "dim": 1,
                       "matrices": [[[[1.0, 0.0]]], [[[1.0]]]]}]}
    path.write_text(json.dumps(doc))
    with pytest.raises(GroupFileError):
        load_group_file(path)


def test_large_group_random_associativity():
    # above the exhaustive limit the check samples seeded triples
    entry = build_builtin("Z_N", N=96)
    report = validate(entry)
    assert report.passed


def test_fourier_requires_complete_irreps():
    d3 = build_builtin("D3")
    d3.irreps = d3.irreps[:2]
    with pytest.raises(ValueError):
        fourier_matrix(d3)
