import numpy as np
import pytest

from hviheat.assembly import (
    AssemblyError,
    ProblemData,
    VertexClass,
    assemble_boundary_mass,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    build_dof_map,
    estimate_coercivity,
    v_norm,
)
from hviheat.mesh import Mesh, generate_unit_square_mesh


def test_two_triangle_stiffness_hand_assembled():
    # diag 1 everywhere, the two diagonal pairs uncoupled, square edges -1/2
    A = assemble_stiffness(generate_unit_square_mesh(1)).toarray()
    expected = np.array(
        [
            [1.0, -0.5, -0.5, 0.0],
            [-0.5, 1.0, 0.0, -0.5],
            [-0.5, 0.0, 1.0, -0.5],
            [0.0, -0.5, -0.5, 1.0],
        ]
    )
    assert np.allclose(A, expected, atol=1e-14)


def test_stiffness_annihilates_constants():
    A = assemble_stiffness(generate_unit_square_mesh(5))
    assert np.max(np.abs(A @ np.ones(A.shape[0]))) <= 1e-10


def test_affine_field_energy_exact():
    m = generate_unit_square_mesh(8)
    A = assemble_stiffness(m)
    u = m.vertices[:, 0]
    assert abs(u @ (A @ u) - 1.0) <= 1e-12


def test_galerkin_symmetry_on_random_vectors():
    m = generate_unit_square_mesh(6)
    A = assemble_stiffness(m)
    rng = np.random.default_rng(7)
    for _ in range(5):
        u = rng.standard_normal(m.num_vertices)
        v = rng.standard_normal(m.num_vertices)
        lhs, rhs = u @ (A @ v), v @ (A @ u)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_degenerate_triangle_reported_with_index():
    m = generate_unit_square_mesh(1)
    vertices = m.vertices.copy()
    vertices[3] = vertices[0]  # collapses triangle 0 and 1
    with pytest.raises(AssemblyError, match="triangle 0"):
        assemble_stiffness(Mesh(vertices, m.triangles, m.boundary_edges, m.boundary_tags))


def test_load_zero_data():
    m = generate_unit_square_mesh(3)
    f = assemble_load(m, ProblemData.make(m))
    assert np.all(f == 0.0)


def test_load_constant_energy_sums_to_area():
    m = generate_unit_square_mesh(4)
    f = assemble_load(m, ProblemData.make(m, g=1.0))
    assert abs(f.sum() - 1.0) <= 1e-12


def test_load_unit_flux_sums_to_minus_gamma2_length():
    m = generate_unit_square_mesh(2)
    f = assemble_load(m, ProblemData.make(m, q=1.0))
    assert abs(f.sum() + 2.0) <= 1e-12


def test_load_additive_in_data():
    m = generate_unit_square_mesh(3)
    rng = np.random.default_rng(11)
    g1, g2 = rng.standard_normal(m.num_vertices), rng.standard_normal(m.num_vertices)
    q1, q2 = rng.standard_normal(6), rng.standard_normal(6)  # one constant per G2 edge
    f12 = assemble_load(m, ProblemData.make(m, g=g1 + g2, q=q1 + q2))
    f1 = assemble_load(m, ProblemData.make(m, g=g1, q=q1))
    f2 = assemble_load(m, ProblemData.make(m, g=g2, q=q2))
    assert np.allclose(f1 + f2, f12, atol=1e-12)


def test_flux_on_non_gamma2_edge_rejected():
    m = generate_unit_square_mesh(2)
    g1_edge = next(i for i, t in enumerate(m.boundary_tags) if t.value == "G1")
    with pytest.raises(ValueError, match="G2 only"):
        ProblemData.make(m, q={g1_edge: 1.0})


def test_boundary_mass_single_edge_closed_form():
    weights, consistent = assemble_boundary_mass(generate_unit_square_mesh(1))
    # the G3 boundary is the single unit edge between vertices 1 and 3
    block = consistent.toarray()[np.ix_([1, 3], [1, 3])]
    assert np.allclose(block, [[1 / 3, 1 / 6], [1 / 6, 1 / 3]], atol=1e-15)
    assert weights[1] == pytest.approx(0.5, abs=1e-15)
    assert weights[3] == pytest.approx(0.5, abs=1e-15)


def test_boundary_mass_total_weight():
    weights, _ = assemble_boundary_mass(generate_unit_square_mesh(4))
    assert abs(weights.sum() - 1.0) <= 1e-12
    assert np.all(weights[weights > 0] > 0)


def test_dof_map_counts_n2():
    m = generate_unit_square_mesh(2)
    v0 = build_dof_map(m, "V0")
    k0 = build_dof_map(m, "K0")
    assert len(v0.fixed_indices) == 3
    assert len(k0.fixed_indices) == 6
    assert v0.num_free + len(v0.fixed_indices) == m.num_vertices
    assert np.count_nonzero(v0.vertex_class == VertexClass.GAMMA3) == 3


def test_dof_map_rejects_unknown_space():
    with pytest.raises(ValueError):
        build_dof_map(generate_unit_square_mesh(2), "H1")


def test_problem_data_validation():
    m = generate_unit_square_mesh(2)
    with pytest.raises(ValueError, match="alpha"):
        ProblemData.make(m, alpha=-1.0)
    d = ProblemData.make(m, g=0.5, q=-1.0, b=-2.0, alpha=1.0)
    violations = d.sign_violations()
    assert len(violations) == 3


class TestCoercivity:
    def test_constants_in_expected_ranges(self):
        est = estimate_coercivity(generate_unit_square_mesh(4))
        assert 0.0 < est.m_a < 1.0
        assert est.gamma_norm > 0.0

    def test_mesh_stability(self):
        e4 = estimate_coercivity(generate_unit_square_mesh(4))
        e8 = estimate_coercivity(generate_unit_square_mesh(8))
        assert abs(e4.m_a - e8.m_a) <= 0.1 * e8.m_a
        assert abs(e4.gamma_norm - e8.gamma_norm) <= 0.1 * e8.gamma_norm

    def test_trace_norm_is_one_on_unit_square(self):
        # the affine field x attains the trace bound exactly on this geometry
        est = estimate_coercivity(generate_unit_square_mesh(6))
        assert abs(est.gamma_norm - 1.0) <= 1e-6

    def test_discrete_coercivity_on_random_fields(self):
        m = generate_unit_square_mesh(5)
        est = estimate_coercivity(m)
        A = assemble_stiffness(m)
        M = assemble_mass(m)
        free = build_dof_map(m, "V0").free_indices
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = np.zeros(m.num_vertices)
            v[free] = rng.standard_normal(len(free))
            energy = v @ (A @ v)
            full = energy + v @ (M @ v)
            assert energy >= est.m_a * full - 1e-10

    def test_trace_bound_on_random_fields(self):
        m = generate_unit_square_mesh(5)
        est = estimate_coercivity(m)
        _, mg3 = assemble_boundary_mass(m)
        A = assemble_stiffness(m)
        free = build_dof_map(m, "V0").free_indices
        rng = np.random.default_rng(4)
        for _ in range(20):
            v = np.zeros(m.num_vertices)
            v[free] = rng.standard_normal(len(free))
            trace_sq = v @ (mg3 @ v)
            assert trace_sq <= est.gamma_norm**2 * (v @ (A @ v)) * (1.0 + 1e-6)

    def test_product_bound(self):
        est = estimate_coercivity(generate_unit_square_mesh(4))
        assert est.gamma_norm**2 * est.m_a <= 1.0 + 1e-10

    def test_iteration_cap_reports_last_estimate(self):
        from hviheat.assembly import ConvergenceError

        with pytest.raises(ConvergenceError) as err:
            estimate_coercivity(generate_unit_square_mesh(4), max_iters=2)
        assert np.isfinite(err.value.last_estimate)


def test_export_coo_roundtrip():
    from hviheat.assembly import export_coo
    import scipy.sparse as sp

    A = assemble_stiffness(generate_unit_square_mesh(1))
    text = export_coo(A)
    rows, cols, vals = zip(*(line.split() for line in text.splitlines()))
    rebuilt = sp.coo_matrix(
        (np.array(vals, dtype=float), (np.array(rows, int), np.array(cols, int))),
        shape=A.shape,
    )
    assert np.array_equal(rebuilt.toarray(), A.toarray())
    assert export_coo(A) == text  # deterministic


def test_v_norm_matches_quadratic_form():
    m = generate_unit_square_mesh(4)
    A, M = assemble_stiffness(m), assemble_mass(m)
    v = m.vertices[:, 0] * m.vertices[:, 1]
    expected = np.sqrt(v @ (A @ v) + v @ (M @ v))
    assert v_norm(A, M, v) == pytest.approx(expected, rel=1e-15)
