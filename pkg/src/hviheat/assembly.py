"""P1 finite-element assembly over tagged triangulations.

Builds the sparse operators of the mixed problem

    -div(grad u) = g in the domain,   u = 0 on G1,
    -du/dn = q on G2,                 exchange law on G3,

namely the stiffness matrix ``a(u,v) = integral grad(u).grad(v)``, the domain
mass matrix, the load vector ``L(v) = integral g v - integral_{G2} q v``, and
the G3 edge mass (consistent matrix and lumped weights).  All quadrature is
exact for P1 fields, so no quadrature error enters downstream tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import BoundaryTag, Mesh, validate_mesh

__all__ = [
    "ProblemData",
    "AssembledSystem",
    "CoercivityEstimates",
    "DofMap",
    "VertexClass",
    "AssemblyError",
    "ConvergenceError",
    "assemble_stiffness",
    "assemble_mass",
    "assemble_load",
    "assemble_boundary_mass",
    "build_dof_map",
    "assemble_system",
    "estimate_coercivity",
    "export_coo",
    "v_norm",
    "v0_seminorm",
]

ScalarField = float | np.ndarray | Callable[[np.ndarray, np.ndarray], np.ndarray]


class AssemblyError(ValueError):
    """Raised for inputs the assembler cannot integrate (e.g. degenerate cells)."""


class ConvergenceError(RuntimeError):
    """An iteration hit its cap; ``last_estimate`` holds the final iterate."""

    def __init__(self, message: str, last_estimate: float):
        super().__init__(f"{message} (last estimate {last_estimate:.6e})")
        self.last_estimate = last_estimate


def _nodal_values(mesh: Mesh, spec: ScalarField) -> np.ndarray:
    """Evaluate a constant / array / callable(x, y) to one value per vertex."""
    nv = mesh.num_vertices
    if callable(spec):
        out = np.asarray(spec(mesh.vertices[:, 0], mesh.vertices[:, 1]), dtype=float)
        return np.broadcast_to(out, (nv,)).astype(float)
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        return np.full(nv, float(arr))
    if arr.shape != (nv,):
        raise ValueError(f"nodal field has shape {arr.shape}, expected ({nv},)")
    return arr.copy()


@dataclass(frozen=True)
class ProblemData:
    """Internal energy, boundary flux, exchange datum, and coefficient.

    ``g`` is stored nodally; ``q`` as endpoint values per G2 edge (a constant
    per edge becomes an equal pair); ``b`` is a constant or a nodal array.
    ``alpha`` is the positive exchange coefficient on G3.
    """

    g: np.ndarray
    q: np.ndarray
    b: float | np.ndarray
    alpha: float

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not np.all(np.isfinite(self.g)):
            raise ValueError("g contains non-finite values")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("q contains non-finite values")
        if not np.all(np.isfinite(np.asarray(self.b, dtype=float))):
            raise ValueError("b contains non-finite values")

    @classmethod
    def make(
        cls,
        mesh: Mesh,
        g: ScalarField = 0.0,
        q: ScalarField | Mapping[int, float] = 0.0,
        b: ScalarField = 0.0,
        alpha: float = 1.0,
    ) -> "ProblemData":
        """Normalize user-facing field specs against a mesh.

        ``q`` may also be a mapping from boundary-edge index to a constant
        flux; indices of edges not tagged G2 are rejected.
        """
        g_nodal = _nodal_values(mesh, g)

        g2_edges = mesh.edges_with_tag(BoundaryTag.GAMMA2)
        if isinstance(q, Mapping):
            g2_index = {
                e: k
                for k, e in enumerate(
                    i for i, t in enumerate(mesh.boundary_tags) if t == BoundaryTag.GAMMA2
                )
            }
            q_pairs = np.zeros((len(g2_edges), 2))
            for edge_idx, value in q.items():
                if edge_idx not in g2_index:
                    tag = mesh.boundary_tags[edge_idx].value if 0 <= edge_idx < len(mesh.boundary_tags) else "?"
                    raise ValueError(
                        f"flux supplied on boundary edge {edge_idx} tagged {tag}; q lives on G2 only"
                    )
                q_pairs[g2_index[edge_idx], :] = float(value)
        elif callable(q):
            ends = mesh.vertices[g2_edges]  # (ne, 2, 2)
            q_pairs = np.asarray(q(ends[:, :, 0], ends[:, :, 1]), dtype=float)
            q_pairs = np.broadcast_to(q_pairs, (len(g2_edges), 2)).astype(float)
        else:
            arr = np.asarray(q, dtype=float)
            if arr.ndim == 0:
                q_pairs = np.full((len(g2_edges), 2), float(arr))
            elif arr.shape == (len(g2_edges),):  # one constant per G2 edge
                q_pairs = np.repeat(arr[:, None], 2, axis=1)
            elif arr.shape == (len(g2_edges), 2):
                q_pairs = arr.copy()
            elif arr.shape == (mesh.num_vertices,):  # nodal flux, traced on G2
                q_pairs = arr[g2_edges]
            else:
                raise ValueError(f"cannot interpret q with shape {arr.shape}")

        if callable(b):
            b_val: float | np.ndarray = _nodal_values(mesh, b)
        else:
            b_arr = np.asarray(b, dtype=float)
            b_val = float(b_arr) if b_arr.ndim == 0 else _nodal_values(mesh, b_arr)

        return cls(g=g_nodal, q=q_pairs, b=b_val, alpha=float(alpha))

    def b_nodal(self, mesh: Mesh) -> np.ndarray:
        """The exchange datum as a full nodal vector (constant broadcast)."""
        if np.ndim(self.b) == 0:
            return np.full(mesh.num_vertices, float(self.b))
        return np.asarray(self.b, dtype=float)

    def sign_violations(self) -> list[str]:
        """Violations of the comparison-theory sign conditions.

        The comparison and monotonicity experiments require g <= 0 in the
        domain, q >= 0 on G2, and b >= 0.
        """
        out = []
        if np.any(self.g > 0.0):
            out.append(f"g must be <= 0 everywhere (max {float(self.g.max()):.3e})")
        if self.q.size and np.any(self.q < 0.0):
            out.append(f"q must be >= 0 on G2 (min {float(self.q.min()):.3e})")
        if np.any(np.asarray(self.b) < 0.0):
            out.append("b must be >= 0")
        return out


class VertexClass(IntEnum):
    """Geometric classification under the Dirichlet-dominant corner rule."""

    FREE = 0
    GAMMA1 = 1
    GAMMA3 = 2


@dataclass(frozen=True)
class DofMap:
    """Constraint map realizing one of the conforming subspaces.

    ``V0`` fixes the G1 vertices at zero; ``K0`` additionally fixes the G3
    vertices.  ``vertex_class`` records the geometric class of every vertex
    regardless of space.
    """

    space: str
    vertex_class: np.ndarray
    fixed: np.ndarray

    @property
    def free_indices(self) -> np.ndarray:
        return np.nonzero(~self.fixed)[0]

    @property
    def fixed_indices(self) -> np.ndarray:
        return np.nonzero(self.fixed)[0]

    @property
    def num_free(self) -> int:
        return int(np.count_nonzero(~self.fixed))


def build_dof_map(mesh: Mesh, space: str = "V0") -> DofMap:
    """Classify vertices for the space ``V0`` (zero on G1) or ``K0`` (zero on G1 and G3)."""
    if space not in ("V0", "K0"):
        raise ValueError(f"unknown space {space!r}, expected 'V0' or 'K0'")
    classes = np.full(mesh.num_vertices, VertexClass.FREE, dtype=np.int64)
    classes[mesh.gamma3_vertices()] = VertexClass.GAMMA3
    classes[mesh.gamma1_vertices()] = VertexClass.GAMMA1
    if space == "V0":
        fixed = classes == VertexClass.GAMMA1
    else:
        fixed = classes != VertexClass.FREE
    return DofMap(space=space, vertex_class=classes, fixed=fixed)


def _require_valid(mesh: Mesh) -> None:
    report = validate_mesh(mesh)
    if report:
        raise AssemblyError("invalid mesh: " + "; ".join(report[:4]))


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Stiffness matrix of the Dirichlet form, by exact P1 gradient quadrature.

    The matrix is symmetric and annihilates constants; a degenerate triangle
    aborts the assembly with its index.
    """
    p = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
    # Edge opposite to local vertex i: coefficients of the P1 gradient.
    bcoef = np.stack(
        [p[:, 1, 1] - p[:, 2, 1], p[:, 2, 1] - p[:, 0, 1], p[:, 0, 1] - p[:, 1, 1]], axis=1
    )
    ccoef = np.stack(
        [p[:, 2, 0] - p[:, 1, 0], p[:, 0, 0] - p[:, 2, 0], p[:, 1, 0] - p[:, 0, 0]], axis=1
    )
    area = mesh.triangle_areas()
    bad = np.nonzero(area <= 1e-300)[0]
    if len(bad):
        raise AssemblyError(f"triangle {int(bad[0])} is degenerate (area {area[bad[0]]:.3e})")

    local = (
        bcoef[:, :, None] * bcoef[:, None, :] + ccoef[:, :, None] * ccoef[:, None, :]
    ) / (4.0 * area)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    nv = mesh.num_vertices
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """Consistent P1 domain mass matrix (local block area/12 * [[2,1,1],...])."""
    area = mesh.triangle_areas()
    if np.any(area <= 0):
        raise AssemblyError(f"triangle {int(np.argmax(area <= 0))} is degenerate")
    base = (np.ones((3, 3)) + np.eye(3)) / 12.0
    local = area[:, None, None] * base[None, :, :]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    nv = mesh.num_vertices
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()


def assemble_load(mesh: Mesh, data: ProblemData) -> np.ndarray:
    """Load vector: domain term minus the G2 flux term.

    ``f_v = integral g phi_v dx - integral_{G2} q phi_v ds`` with exact P1
    mass quadrature; the flux enters with a minus sign.
    """
    f = assemble_mass(mesh) @ data.g
    g2_edges = mesh.edges_with_tag(BoundaryTag.GAMMA2)
    if len(g2_edges):
        lengths = mesh.edge_lengths(g2_edges)
        qa, qb = data.q[:, 0], data.q[:, 1]
        np.add.at(f, g2_edges[:, 0], -lengths * (2.0 * qa + qb) / 6.0)
        np.add.at(f, g2_edges[:, 1], -lengths * (qa + 2.0 * qb) / 6.0)
    return f


def assemble_boundary_mass(mesh: Mesh) -> tuple[np.ndarray, sp.csr_matrix]:
    """Lumped weights and consistent edge mass matrix of the G3 portion.

    The consistent matrix sums the 1D P1 edge blocks ``len/6 * [[2,1],[1,2]]``
    over G3 edges; the lumped weights are its row sums, so they add up to the
    length of G3.
    """
    g3_edges = mesh.edges_with_tag(BoundaryTag.GAMMA3)
    if not len(g3_edges):
        raise AssemblyError("mesh has no G3 edges; the exchange boundary is required")
    lengths = mesh.edge_lengths(g3_edges)
    nv = mesh.num_vertices

    rows = np.concatenate([g3_edges[:, 0], g3_edges[:, 0], g3_edges[:, 1], g3_edges[:, 1]])
    cols = np.concatenate([g3_edges[:, 0], g3_edges[:, 1], g3_edges[:, 0], g3_edges[:, 1]])
    vals = np.concatenate([lengths / 3.0, lengths / 6.0, lengths / 6.0, lengths / 3.0])
    consistent = sp.coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()

    weights = np.zeros(nv)
    np.add.at(weights, g3_edges[:, 0], lengths / 2.0)
    np.add.at(weights, g3_edges[:, 1], lengths / 2.0)
    return weights, consistent


@dataclass(frozen=True)
class AssembledSystem:
    """Everything a solver needs, assembled once over the full vertex set."""

    mesh: Mesh
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    load: np.ndarray
    gamma3_weights: np.ndarray
    gamma3_mass: sp.csr_matrix
    dof_map: DofMap
    data: ProblemData

    @property
    def gamma3_nodes(self) -> np.ndarray:
        return np.nonzero(self.dof_map.vertex_class == VertexClass.GAMMA3)[0]


def assemble_system(mesh: Mesh, data: ProblemData) -> AssembledSystem:
    """Assemble stiffness, mass, load, G3 mass, and the V0 constraint map."""
    _require_valid(mesh)
    weights, consistent = assemble_boundary_mass(mesh)
    return AssembledSystem(
        mesh=mesh,
        stiffness=assemble_stiffness(mesh),
        mass=assemble_mass(mesh),
        load=assemble_load(mesh, data),
        gamma3_weights=weights,
        gamma3_mass=consistent,
        dof_map=build_dof_map(mesh, "V0"),
        data=data,
    )


def export_coo(matrix: sp.spmatrix) -> str:
    """Coordinate-format text dump, one ``row col value`` triple per line.

    Entries are sorted by row then column so the output is deterministic;
    intended for debugging, not as an interchange format.
    """
    coo = sp.coo_matrix(matrix)
    coo.sum_duplicates()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}" for k in order
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def v_norm(stiffness: sp.spmatrix, mass: sp.spmatrix, v: np.ndarray) -> float:
    """Full discrete norm: sqrt(v'(A+M)v)."""
    return float(np.sqrt(max(v @ (stiffness @ v) + v @ (mass @ v), 0.0)))


def v0_seminorm(stiffness: sp.spmatrix, v: np.ndarray) -> float:
    """Energy seminorm: sqrt(v'Av)."""
    return float(np.sqrt(max(v @ (stiffness @ v), 0.0)))


@dataclass(frozen=True)
class CoercivityEstimates:
    """Sharp discrete constants of the coercivity and trace inequalities.

    ``m_a`` satisfies a(v,v) >= m_a (a(v,v) + |v|^2) on the V0 subspace and
    lies in (0, 1); ``gamma_norm`` is the smallest constant with
    ``|v|_{L2(G3)}^2 <= gamma_norm^2 a(v,v)`` there.
    """

    m_a: float
    gamma_norm: float
    iterations_m_a: int = 0
    iterations_gamma: int = 0

    def smallness_margin(self, alpha: float, m_j: float) -> float:
        """Positive when the uniqueness condition m_a > alpha m_j |gamma|^2 holds."""
        return self.m_a - alpha * m_j * self.gamma_norm**2


def estimate_coercivity(
    mesh: Mesh, tol: float = 1e-8, max_iters: int = 100_000
) -> CoercivityEstimates:
    """Sharp discrete coercivity constant and trace-operator norm on V0.

    ``m_a`` is the smallest generalized eigenvalue of (A, A+M) over the V0
    degrees of freedom; ``gamma_norm**2`` the largest of (M_G3, A).  Both are
    obtained by inverse/power iteration with the stiffness factorized once,
    stopping when the Rayleigh quotient is stable to ``tol`` relative.
    """
    _require_valid(mesh)
    dof = build_dof_map(mesh, "V0")
    free = dof.free_indices
    A = assemble_stiffness(mesh).tocsc()[free][:, free]
    M = assemble_mass(mesh).tocsr()[free][:, free]
    _, Mg3_full = assemble_boundary_mass(mesh)
    Mg3 = Mg3_full.tocsr()[free][:, free]

    lu = spla.splu(A.tocsc())
    start = np.ones(len(free))

    def largest(apply_b, what):
        v = start / np.linalg.norm(start)
        lam = 0.0
        for it in range(1, max_iters + 1):
            w = lu.solve(apply_b(v))
            norm = np.linalg.norm(w)
            if norm == 0.0:
                raise ConvergenceError(f"{what}: iterate collapsed to zero", lam)
            v = w / norm
            lam_new = float(v @ apply_b(v)) / float(v @ (A @ v))
            if it > 1 and abs(lam_new - lam) <= tol * abs(lam_new):
                return lam_new, it
            lam = lam_new
        raise ConvergenceError(f"{what}: power iteration hit the cap of {max_iters}", lam)

    # m_a: smallest eigenvalue of (A, A+M) is 1/largest of (A+M, A).
    mu, it_ma = largest(lambda v: A @ v + M @ v, "coercivity constant")
    lam_g, it_g = largest(lambda v: Mg3 @ v, "trace norm")

    m_a = 1.0 / mu
    gamma_norm = float(np.sqrt(max(lam_g, 0.0)))
    if not (0.0 < m_a <= 1.0):
        raise ConvergenceError("coercivity constant left (0, 1]", m_a)
    if gamma_norm <= 0.0:
        raise ConvergenceError("trace norm must be positive", gamma_norm)
    return CoercivityEstimates(
        m_a=m_a, gamma_norm=gamma_norm, iterations_m_a=it_ma, iterations_gamma=it_g
    )
