import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hviheat.mesh import (
    BoundaryTag,
    Mesh,
    MeshFormatError,
    generate_unit_square_mesh,
    load_mesh,
    save_mesh,
    validate_mesh,
)


def tag_counts(mesh):
    return {tag: sum(1 for t in mesh.boundary_tags if t == tag) for tag in BoundaryTag}


def test_smallest_mesh():
    m = generate_unit_square_mesh(1)
    assert m.num_vertices == 4
    assert m.num_triangles == 2
    assert m.num_boundary_edges == 4
    counts = tag_counts(m)
    assert counts[BoundaryTag.GAMMA1] == 1
    assert counts[BoundaryTag.GAMMA2] == 2
    assert counts[BoundaryTag.GAMMA3] == 1


def test_counts_n2():
    m = generate_unit_square_mesh(2)
    assert m.num_vertices == 9
    assert m.num_triangles == 8
    assert m.num_boundary_edges == 8


def test_total_area_n4():
    m = generate_unit_square_mesh(4)
    assert abs(m.triangle_areas().sum() - 1.0) <= 1e-12


def test_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        generate_unit_square_mesh(0)


@settings(max_examples=8, deadline=None)
@given(st.integers(min_value=1, max_value=8))
def test_structured_mesh_invariants(n):
    m = generate_unit_square_mesh(n)
    assert m.num_vertices == (n + 1) ** 2
    assert m.num_triangles == 2 * n * n
    assert m.num_boundary_edges == 4 * n
    counts = tag_counts(m)
    assert counts[BoundaryTag.GAMMA1] == n
    assert counts[BoundaryTag.GAMMA2] == 2 * n
    assert counts[BoundaryTag.GAMMA3] == n
    assert abs(m.triangle_areas().sum() - 1.0) <= 1e-12
    assert validate_mesh(m) == []


def test_gamma_vertex_classification():
    m = generate_unit_square_mesh(2)
    # the x=0 column is Dirichlet; the x=1 column belongs to the exchange side
    assert sorted(m.gamma1_vertices().tolist()) == [0, 3, 6]
    assert sorted(m.gamma3_vertices().tolist()) == [2, 5, 8]


def test_validate_clean():
    assert validate_mesh(generate_unit_square_mesh(3)) == []


def test_validate_flipped_triangle():
    m = generate_unit_square_mesh(2)
    tris = m.triangles.copy()
    tris[3] = tris[3][::-1]
    bad = Mesh(m.vertices, tris, m.boundary_edges, m.boundary_tags)
    report = validate_mesh(bad)
    assert any("triangle 3" in msg for msg in report)


def test_validate_missing_gamma3():
    m = generate_unit_square_mesh(2)
    tags = tuple(
        BoundaryTag.GAMMA2 if t == BoundaryTag.GAMMA3 else t for t in m.boundary_tags
    )
    report = validate_mesh(Mesh(m.vertices, m.triangles, m.boundary_edges, tags))
    assert any("G3 empty" in msg for msg in report)


def test_validate_conflicting_corner():
    m = generate_unit_square_mesh(1)
    # retag the bottom edge (vertices 0-1) as G3: vertex 0 is also on the G1 edge
    tags = list(m.boundary_tags)
    tags[0] = BoundaryTag.GAMMA3
    report = validate_mesh(Mesh(m.vertices, m.triangles, m.boundary_edges, tuple(tags)))
    assert any("vertex 0" in msg for msg in report)
    # declaring the vertex as an interface silences that violation
    ok = Mesh(
        m.vertices, m.triangles, m.boundary_edges, tuple(tags), interface_vertices=(0,)
    )
    assert not any("vertex 0" in msg for msg in validate_mesh(ok))


def test_validate_out_of_range_triangle():
    m = generate_unit_square_mesh(1)
    tris = m.triangles.copy()
    tris[1, 2] = 99
    report = validate_mesh(Mesh(m.vertices, tris, m.boundary_edges, m.boundary_tags))
    assert any("triangle 1" in msg and "99" in msg for msg in report)


def test_validate_undeclared_boundary_edge():
    m = generate_unit_square_mesh(1)
    report = validate_mesh(
        Mesh(m.vertices, m.triangles, m.boundary_edges[:-1], m.boundary_tags[:-1])
    )
    assert any("carries no tag" in msg for msg in report)


def test_roundtrip_identity():
    m = generate_unit_square_mesh(2)
    assert load_mesh(save_mesh(m)) == m


def test_roundtrip_irrational_coordinates():
    m = generate_unit_square_mesh(2)
    vertices = m.vertices + np.pi / 700.0  # exercises full-precision formatting
    shifted = Mesh(vertices, m.triangles, m.boundary_edges, m.boundary_tags)
    assert load_mesh(save_mesh(shifted)) == shifted


def test_load_reports_out_of_range_vertex_line():
    text = "\n".join(
        [
            "meshfmt 1",
            "vertices 3",
            "0 0",
            "1 0",
            "0 1",
            "triangles 1",
            "0 1 7",
            "boundary 3",
            "0 1 G2",
            "1 2 G3",
            "2 0 G1",
        ]
    )
    with pytest.raises(MeshFormatError) as err:
        load_mesh(text)
    assert err.value.line == 7
    assert "out of range" in str(err.value)


def test_load_requires_boundary_section():
    text = "\n".join(["meshfmt 1", "vertices 3", "0 0", "1 0", "0 1", "triangles 1", "0 1 2"])
    with pytest.raises(MeshFormatError, match="boundary tags required"):
        load_mesh(text)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("meshfmt 2\n", "meshfmt 1"),
        ("meshfmt 1\nvertices 1\n0 0 0\n", "two coordinates"),
        (
            "meshfmt 1\nvertices 2\n0 0\n1 0\ntriangles 0\nboundary 1\n0 1 G9\n",
            "unknown boundary tag",
        ),
        (
            "meshfmt 1\nvertices 2\n0 0\n1 0\ntriangles 0\nboundary 0\nstray\n",
            "trailing content",
        ),
    ],
)
def test_load_rejects_malformed_text(text, fragment):
    with pytest.raises(MeshFormatError, match=fragment):
        load_mesh(text)


def test_comments_and_blank_lines_ignored():
    m = generate_unit_square_mesh(1)
    text = "# header comment\n\n" + save_mesh(m).replace(
        "vertices 4", "vertices 4   # vertex table"
    )
    assert load_mesh(text) == m
