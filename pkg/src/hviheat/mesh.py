"""Triangulated 2D domains with a three-part boundary decomposition.

The boundary of every mesh is split into three tagged portions:

* ``G1`` -- homogeneous Dirichlet portion (temperature fixed at zero),
* ``G2`` -- prescribed-flux portion,
* ``G3`` -- heat-exchange portion carrying the Robin coefficient or the
  multivalued subdifferential law.

Each portion must be nonempty (it must have positive length).  Meshes are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "BoundaryTag",
    "Mesh",
    "MeshFormatError",
    "generate_unit_square_mesh",
    "validate_mesh",
    "load_mesh",
    "save_mesh",
]


class BoundaryTag(Enum):
    """Tag of a boundary edge; values match the mesh text format."""

    GAMMA1 = "G1"
    GAMMA2 = "G2"
    GAMMA3 = "G3"


_TAG_BY_NAME = {t.value: t for t in BoundaryTag}


class MeshFormatError(ValueError):
    """Mesh text could not be parsed.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Mesh:
    """A straight-edged triangulation with tagged boundary edges.

    Attributes
    ----------
    vertices : (nv, 2) float array
        Vertex coordinates (dimensionless).
    triangles : (nt, 3) int array
        Vertex indices per triangle, counterclockwise.
    boundary_edges : (ne, 2) int array
        Endpoint indices of each boundary edge.
    boundary_tags : tuple of BoundaryTag, length ne
        Tag of each boundary edge.
    interface_vertices : tuple of int
        Vertices declared as legitimate meeting points of the G1 and G3
        portions.  On such vertices the Dirichlet-dominant rule applies.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: tuple[BoundaryTag, ...]
    interface_vertices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64))
        object.__setattr__(self, "boundary_edges", np.asarray(self.boundary_edges, dtype=np.int64))
        object.__setattr__(self, "boundary_tags", tuple(self.boundary_tags))

    # -- basic counts -----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_boundary_edges(self) -> int:
        return self.boundary_edges.shape[0]

    # -- derived geometry -------------------------------------------------

    def triangle_areas(self) -> np.ndarray:
        """Signed areas; positive for the stored counterclockwise orientation."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        """Boundary edges carrying ``tag`` as an (n, 2) index array."""
        mask = [t == tag for t in self.boundary_tags]
        return self.boundary_edges[np.asarray(mask, dtype=bool)]

    def edge_lengths(self, edges: np.ndarray) -> np.ndarray:
        d = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def boundary_length(self, tag: BoundaryTag) -> float:
        edges = self.edges_with_tag(tag)
        return float(self.edge_lengths(edges).sum()) if len(edges) else 0.0

    def vertices_incident_to(self, tag: BoundaryTag) -> np.ndarray:
        """Sorted vertex indices touched by at least one edge of ``tag``."""
        edges = self.edges_with_tag(tag)
        return np.unique(edges) if len(edges) else np.empty(0, dtype=np.int64)

    def gamma1_vertices(self) -> np.ndarray:
        """Vertices of the Dirichlet portion (dominant at corners)."""
        return self.vertices_incident_to(BoundaryTag.GAMMA1)

    def gamma3_vertices(self) -> np.ndarray:
        """G3 vertices under the Dirichlet-dominant corner rule.

        A vertex incident to any G1 edge counts as a G1 vertex; of the
        remaining vertices, those incident to a G3 edge are G3 vertices.
        Essential conditions must win at corners for conforming P1 spaces.
        """
        g3 = self.vertices_incident_to(BoundaryTag.GAMMA3)
        g1 = set(self.gamma1_vertices().tolist())
        return np.asarray([v for v in g3.tolist() if v not in g1], dtype=np.int64)

    # -- structural equality ------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary_edges, other.boundary_edges)
            and self.boundary_tags == other.boundary_tags
            and self.interface_vertices == other.interface_vertices
        )


def generate_unit_square_mesh(n: int) -> Mesh:
    """Structured triangulation of the unit square with n x n cells.

    Vertices are laid out row-major, vertex ``j*(n+1)+i`` at ``(i/n, j/n)``.
    Each cell is split along the diagonal from its lower-left to its
    upper-right corner, which keeps the triangulation deterministic for
    byte-stable regression outputs.  Tags: G1 on ``x=0``, G3 on ``x=1``,
    G2 on ``y=0`` and ``y=1``.

    Raises
    ------
    ValueError
        If ``n < 1``.
    """
    if n < 1:
        raise ValueError(f"mesh subdivision must be a positive integer, got {n}")

    side = np.arange(n + 1, dtype=float) / n
    xs, ys = np.meshgrid(side, side)  # row-major: y varies along axis 0
    vertices = np.column_stack([xs.ravel(), ys.ravel()])

    def vid(i: int, j: int) -> int:
        return j * (n + 1) + i

    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    k = 0
    for j in range(n):
        for i in range(n):
            v00 = vid(i, j)
            v10 = vid(i + 1, j)
            v01 = vid(i, j + 1)
            v11 = vid(i + 1, j + 1)
            triangles[k] = (v00, v10, v11)
            triangles[k + 1] = (v00, v11, v01)
            k += 2

    edges = []
    tags: list[BoundaryTag] = []
    for i in range(n):  # bottom y=0 and top y=1 carry the flux tag
        edges.append((vid(i, 0), vid(i + 1, 0)))
        tags.append(BoundaryTag.GAMMA2)
    for i in range(n):
        edges.append((vid(i, n), vid(i + 1, n)))
        tags.append(BoundaryTag.GAMMA2)
    for j in range(n):  # left x=0: Dirichlet
        edges.append((vid(0, j), vid(0, j + 1)))
        tags.append(BoundaryTag.GAMMA1)
    for j in range(n):  # right x=1: exchange boundary
        edges.append((vid(n, j), vid(n, j + 1)))
        tags.append(BoundaryTag.GAMMA3)

    return Mesh(
        vertices=vertices,
        triangles=np.asarray(triangles),
        boundary_edges=np.asarray(edges, dtype=np.int64),
        boundary_tags=tuple(tags),
    )


def _triangulation_boundary(mesh: Mesh) -> set[tuple[int, int]]:
    """Edges belonging to exactly one triangle, as sorted vertex pairs."""
    count: dict[tuple[int, int], int] = {}
    for tri in mesh.triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(min(a, b)), int(max(a, b)))
            count[key] = count.get(key, 0) + 1
    return {e for e, c in count.items() if c == 1}


def validate_mesh(mesh: Mesh) -> list[str]:
    """Check all mesh invariants; returns one message per violation.

    An empty report means the mesh is valid.  This never raises: it is a
    diagnostic, each message names the offending entity.
    """
    report: list[str] = []
    nv = mesh.num_vertices

    if np.any(mesh.triangles < 0) or np.any(mesh.triangles >= nv):
        for t, tri in enumerate(mesh.triangles):
            bad = [int(v) for v in tri if v < 0 or v >= nv]
            if bad:
                report.append(f"triangle {t} references out-of-range vertex {bad[0]}")
        return report  # geometry checks below would be meaningless

    if np.any(mesh.boundary_edges < 0) or np.any(mesh.boundary_edges >= nv):
        for e, (a, b) in enumerate(mesh.boundary_edges):
            if a < 0 or a >= nv or b < 0 or b >= nv:
                report.append(f"boundary edge {e} references an out-of-range vertex")
        return report

    areas = mesh.triangle_areas()
    for t in np.nonzero(areas <= 0.0)[0]:
        report.append(f"triangle {int(t)} has non-positive signed area {areas[t]:.3e}")

    declared = [
        (int(min(a, b)), int(max(a, b))) for a, b in mesh.boundary_edges
    ]
    declared_set = set(declared)
    if len(declared) != len(declared_set):
        seen: set[tuple[int, int]] = set()
        for e in declared:
            if e in seen:
                report.append(f"boundary edge {e} declared more than once")
            seen.add(e)
    topo = _triangulation_boundary(mesh)
    for e in sorted(topo - declared_set):
        report.append(f"topological boundary edge {e} carries no tag")
    for e in sorted(declared_set - topo):
        report.append(f"declared boundary edge {e} is not on the boundary")

    for tag in BoundaryTag:
        if not any(t == tag for t in mesh.boundary_tags):
            report.append(
                f"{tag.value} empty: every boundary portion must have positive measure"
            )

    g1 = set(mesh.vertices_incident_to(BoundaryTag.GAMMA1).tolist())
    g3 = set(mesh.vertices_incident_to(BoundaryTag.GAMMA3).tolist())
    allowed = set(mesh.interface_vertices)
    for v in sorted((g1 & g3) - allowed):
        report.append(
            f"vertex {v} carries both G1 and G3 tags but is not a declared interface vertex"
        )

    return report


def save_mesh(mesh: Mesh) -> str:
    """Serialize a mesh to the line-oriented text format.

    The format round-trips exactly: coordinates are written with 17
    significant digits, so ``load_mesh(save_mesh(m)) == m``.
    """
    lines = ["meshfmt 1"]
    lines.append(f"vertices {mesh.num_vertices}")
    for x, y in mesh.vertices:
        lines.append(f"{x:.17g} {y:.17g}")
    lines.append(f"triangles {mesh.num_triangles}")
    for i, j, k in mesh.triangles:
        lines.append(f"{i} {j} {k}")
    lines.append(f"boundary {mesh.num_boundary_edges}")
    for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        lines.append(f"{i} {j} {tag.value}")
    return "\n".join(lines) + "\n"


def load_mesh(text: str) -> Mesh:
    """Parse the mesh text format; raises MeshFormatError with a line number."""
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            rows.append((lineno, content.split()))

    pos = 0

    def next_row(what: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(rows):
            last = rows[-1][0] if rows else None
            raise MeshFormatError(f"unexpected end of file, expected {what}", last)
        row = rows[pos]
        pos += 1
        return row

    lineno, fields = next_row("header 'meshfmt 1'")
    if fields != ["meshfmt", "1"]:
        raise MeshFormatError("expected header 'meshfmt 1'", lineno)

    def section(name: str) -> int:
        if name == "boundary" and pos >= len(rows):
            raise MeshFormatError("boundary tags required", rows[-1][0] if rows else None)
        lineno, fields = next_row(f"section '{name} N'")
        if len(fields) != 2 or fields[0] != name:
            if name == "boundary":
                raise MeshFormatError("boundary tags required", lineno)
            raise MeshFormatError(f"expected section '{name} N'", lineno)
        try:
            count = int(fields[1])
        except ValueError:
            raise MeshFormatError(f"bad {name} count {fields[1]!r}", lineno) from None
        if count < 0:
            raise MeshFormatError(f"negative {name} count", lineno)
        return count

    nv = section("vertices")
    vertices = np.empty((nv, 2), dtype=float)
    for r in range(nv):
        lineno, fields = next_row("vertex coordinates 'x y'")
        if len(fields) != 2:
            raise MeshFormatError("expected two coordinates 'x y'", lineno)
        try:
            vertices[r] = (float(fields[0]), float(fields[1]))
        except ValueError:
            raise MeshFormatError(f"bad coordinate in {fields!r}", lineno) from None

    nt = section("triangles")
    triangles = np.empty((nt, 3), dtype=np.int64)
    for r in range(nt):
        lineno, fields = next_row("triangle indices 'i j k'")
        if len(fields) != 3:
            raise MeshFormatError("expected three vertex indices 'i j k'", lineno)
        try:
            tri = [int(f) for f in fields]
        except ValueError:
            raise MeshFormatError(f"bad vertex index in {fields!r}", lineno) from None
        for v in tri:
            if v < 0 or v >= nv:
                raise MeshFormatError(
                    f"triangle references vertex index {v} out of range [0, {nv})", lineno
                )
        triangles[r] = tri

    ne = section("boundary")
    edges = np.empty((ne, 2), dtype=np.int64)
    tags: list[BoundaryTag] = []
    for r in range(ne):
        lineno, fields = next_row("boundary edge 'i j TAG'")
        if len(fields) != 3:
            raise MeshFormatError("expected boundary edge 'i j TAG'", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise MeshFormatError(f"bad vertex index in {fields!r}", lineno) from None
        for v in (a, b):
            if v < 0 or v >= nv:
                raise MeshFormatError(
                    f"boundary edge references vertex index {v} out of range [0, {nv})",
                    lineno,
                )
        tag = _TAG_BY_NAME.get(fields[2])
        if tag is None:
            raise MeshFormatError(
                f"unknown boundary tag {fields[2]!r}, expected one of G1, G2, G3", lineno
            )
        edges[r] = (a, b)
        tags.append(tag)

    if pos != len(rows):
        raise MeshFormatError("trailing content after boundary section", rows[pos][0])

    return Mesh(vertices=vertices, triangles=triangles, boundary_edges=edges, boundary_tags=tuple(tags))
