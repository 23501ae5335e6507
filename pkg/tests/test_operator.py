import json

import numpy as np
import pytest

from wco import catalog
from wco.errors import PreconditionError
from wco.operator import (
    adjoint_kernel_check,
    apply_operator,
    assemble_matrix,
    export_matrix_csv,
    export_matrix_json,
    matrix_apply,
)
from wco.series import ExtractionConfig, TaylorSeries
from wco.spaces import SpaceParams

ONE = catalog.polynomial([1.0])
EX1_PSI = catalog.psi_power(2.5)
EX1_PHI = catalog.mobius_self_map(0.5)
P_HALF = SpaceParams(0.5)


def test_dilation_gives_diagonal_matrix():
    for alpha in (-0.5, 0.0, 0.5):
        m = assemble_matrix(ONE, catalog.affine(0, 0.5), SpaceParams(alpha), 8)
        want = np.diag(0.5 ** np.arange(8.0))
        assert np.max(np.abs(m.entries - want)) <= 1e-13


def test_identity_symbol_gives_identity_matrix():
    m = assemble_matrix(ONE, catalog.identity(), P_HALF, 8)
    assert np.max(np.abs(m.entries - np.eye(8))) <= 1e-13


def test_ex1_matrix_triangular_with_geometric_diagonal():
    m = assemble_matrix(EX1_PSI, EX1_PHI, P_HALF, 64)
    upper = np.triu(m.entries, 1)
    for k in range(64):
        assert np.max(np.abs(upper[:, k])) <= m.col_errors[k]
    assert np.max(np.abs(np.diag(m.entries) - 0.5 ** np.arange(64.0))) <= 1e-10


def test_diagonal_law_for_origin_fixing_symbols():
    # phi(0)=0 forces entries (k,k) = psi(0) * phi'(0)^k
    psi = catalog.polynomial([2.0, 1.0])
    phi = catalog.affine(0, 0.7)
    m = assemble_matrix(psi, phi, SpaceParams(-0.25), 24)
    want = 2.0 * 0.7 ** np.arange(24.0)
    assert np.max(np.abs(np.diag(m.entries) - want)) <= 1e-11


def test_assemble_requires_self_map():
    with pytest.raises(PreconditionError):
        assemble_matrix(ONE, catalog.psi_power(2.5), P_HALF, 8)


def test_assemble_rejects_zero_weight():
    with pytest.raises(PreconditionError, match="zero operator"):
        assemble_matrix(catalog.polynomial([0.0]), EX1_PHI, P_HALF, 8)


def test_assemble_warns_on_slow_tails():
    cfg = ExtractionConfig(sample_count=512, tail_tolerance=1e-18)
    m = assemble_matrix(EX1_PSI, EX1_PHI, P_HALF, 64, cfg)
    assert m.warnings  # power weight has polynomial coefficient decay
    assert m.sample_radius == 0.9  # schedule exhausted


def test_apply_operator_examples():
    out, _ = apply_operator(ONE, catalog.affine(0, 0.5), TaylorSeries([0, 0, 1]), P_HALF, 8)
    want = np.zeros(8)
    want[2] = 0.25
    assert np.max(np.abs(out.coeffs - want)) <= 1e-13

    out, _ = apply_operator(
        catalog.polynomial([0, 0, 1]), catalog.identity(), TaylorSeries([1.0]), P_HALF, 8
    )
    want = np.zeros(8)
    want[2] = 1.0
    assert np.max(np.abs(out.coeffs - want)) <= 1e-13


def test_apply_matches_matrix_route_on_ex1():
    f = TaylorSeries([1.0, 1.0])
    direct, est = apply_operator(EX1_PSI, EX1_PHI, f, P_HALF, 64)
    m = assemble_matrix(EX1_PSI, EX1_PHI, P_HALF, 64)
    via_matrix = matrix_apply(m, f)
    assert np.max(np.abs(direct.coeffs - via_matrix.coeffs)) <= 1e-9


def test_apply_matches_matrix_route_on_random_polynomials():
    rng = np.random.default_rng(11)
    n = 32
    m = assemble_matrix(EX1_PSI, EX1_PHI, P_HALF, n)
    for _ in range(20):
        deg = int(rng.integers(0, n // 4))
        coeffs = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        f = TaylorSeries(coeffs)
        direct, est = apply_operator(EX1_PSI, EX1_PHI, f, P_HALF, n)
        via = matrix_apply(m, f)
        budget = (
            est
            + float(np.sum(m.col_errors[: deg + 1] * np.abs(coeffs)))
            + 1e-10 * (1 + np.max(np.abs(coeffs)))
        )
        assert np.max(np.abs(direct.coeffs - via.coeffs)) <= budget


def test_adjoint_kernel_identity_trivial_point():
    rep = adjoint_kernel_check(ONE, catalog.affine(0, 0.5), P_HALF, 0.0, 32)
    assert rep.residual <= 1e-12


def test_adjoint_kernel_identity_interior_point():
    rep = adjoint_kernel_check(ONE, catalog.affine(0, 0.5), P_HALF, 0.5, 256)
    assert rep.residual <= 1e-8


def test_adjoint_kernel_identity_ex1_deep():
    rep = adjoint_kernel_check(EX1_PSI, EX1_PHI, P_HALF, 0.7, 512)
    assert rep.residual <= 1e-6
    assert rep.kernel_tail_z >= 0 and rep.kernel_tail_phi_z >= 0


def test_adjoint_kernel_rejects_outer_points():
    with pytest.raises(PreconditionError):
        adjoint_kernel_check(ONE, EX1_PHI, P_HALF, 0.85, 16)


def test_matrix_exports_are_deterministic(tmp_path):
    m = assemble_matrix(EX1_PSI, EX1_PHI, P_HALF, 12)
    c1, c2 = tmp_path / "m1.csv", tmp_path / "m2.csv"
    j1, j2 = tmp_path / "m1.json", tmp_path / "m2.json"
    export_matrix_csv(m, c1)
    export_matrix_csv(m, c2)
    export_matrix_json(m, j1)
    export_matrix_json(m, j2)
    assert c1.read_bytes() == c2.read_bytes()
    assert j1.read_bytes() == j2.read_bytes()
    header = json.loads(c1.read_text().splitlines()[0][2:])
    assert header["alpha"] == 0.5 and header["N"] == 12
    assert header["psi"] == EX1_PSI.label and header["phi"] == EX1_PHI.label
    assert len(header["col_errors"]) == 12
    doc = json.loads(j1.read_text())
    assert len(doc["entries"]) == 144
    got = doc["entries"][1 * 12 + 0]  # row-major (j=1, k=0)
    assert abs(complex(got[0], got[1]) - m.entries[1, 0]) <= 1e-15


def test_csv_rows_cover_all_entries(tmp_path):
    m = assemble_matrix(ONE, catalog.affine(0, 0.5), P_HALF, 5)
    path = tmp_path / "m.csv"
    export_matrix_csv(m, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "j,k,re,im"
    assert len(lines) == 2 + 25
