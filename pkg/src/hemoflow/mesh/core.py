"""Face-addressed unstructured finite-volume mesh.

A mesh is a set of cells bounded by planar polygonal faces. Each face
stores its vertex loop, an owner cell and (for internal faces) a neighbor
cell. All geometric quantities (face area vectors, centroids, cell volumes
and centroids) are derived from the vertex coordinates, which guarantees
exact Gauss closure of every cell.

2D meshes use two-vertex faces (edges) with an implied unit depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidArgumentError

PATCH_KINDS = ("inlet", "outlet", "wall")

# Mesh generation refuses meshes beyond this face non-orthogonality.
NON_ORTHOGONALITY_CAP_DEG = 70.0


@dataclass
class Patch:
    """A named set of boundary faces with a physical kind."""

    name: str
    kind: str
    face_ids: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PATCH_KINDS:
            raise InvalidArgumentError(f"unknown patch kind {self.kind!r}")
        self.face_ids = np.asarray(self.face_ids, dtype=np.int64)


@dataclass
class QualityReport:
    avg_non_orthogonality: float  # deg
    max_non_orthogonality: float  # deg
    avg_skewness: float
    max_skewness: float
    cell_count: int
    h_min: float
    h_max: float

    def __str__(self):
        return (
            f"cells={self.cell_count}  "
            f"non-orthogonality avg/max = "
            f"{self.avg_non_orthogonality:.2f}/{self.max_non_orthogonality:.2f} deg  "
            f"skewness avg/max = {self.avg_skewness:.3f}/{self.max_skewness:.3f}  "
            f"h = [{self.h_min:.3e}, {self.h_max:.3e}] m"
        )


class Mesh:
    """Immutable unstructured FV mesh.

    Parameters
    ----------
    dim : 2 or 3
    points : (n_points, dim) vertex coordinates [m]
    face_nodes : list of vertex-id tuples, one loop per face
    owner, neighbor : per-face cell ids; neighbor == -1 on boundary faces
    patches : list of Patch covering every boundary face exactly once
    """

    def __init__(self, dim, points, face_nodes, owner, neighbor, patches):
        if dim not in (2, 3):
            raise InvalidArgumentError("dim must be 2 or 3")
        self.dim = int(dim)
        self.points = np.asarray(points, dtype=float)
        if self.points.shape[1] != dim:
            raise InvalidArgumentError("points shape does not match dim")
        self.face_nodes = [tuple(int(v) for v in f) for f in face_nodes]
        self.owner = np.asarray(owner, dtype=np.int64).copy()
        self.neighbor = np.asarray(neighbor, dtype=np.int64).copy()
        self.patches = {p.name: p for p in patches}
        if len(self.patches) != len(patches):
            raise InvalidArgumentError("duplicate patch names")

        self.n_faces = len(self.face_nodes)
        self.n_cells = int(max(self.owner.max(), self.neighbor.max()) + 1)
        self._compute_geometry()
        self._validate()
        self._fv = None

    # -- geometry ---------------------------------------------------------

    def _raw_face_geometry(self):
        """Area vector and centroid of every face from its vertex loop."""
        nf = self.n_faces
        area = np.zeros((nf, self.dim))
        centroid = np.zeros((nf, self.dim))
        pts = self.points
        if self.dim == 2:
            for i, (a, b) in enumerate(self.face_nodes):
                e = pts[b] - pts[a]
                area[i] = (e[1], -e[0])  # unit depth
                centroid[i] = 0.5 * (pts[a] + pts[b])
        else:
            for i, loop in enumerate(self.face_nodes):
                v = pts[list(loop)]
                m = v.mean(axis=0)
                a_sum = np.zeros(3)
                c_sum = np.zeros(3)
                w_sum = 0.0
                for j in range(len(loop)):
                    p1 = v[j] - m
                    p2 = v[(j + 1) % len(loop)] - m
                    a_t = 0.5 * np.cross(p1, p2)
                    w = np.linalg.norm(a_t)
                    a_sum += a_t
                    c_sum += w * (m + v[j] + v[(j + 1) % len(loop)]) / 3.0
                    w_sum += w
                area[i] = a_sum
                centroid[i] = c_sum / w_sum if w_sum > 0 else m
        return area, centroid

    def _compute_geometry(self):
        area, fc = self._raw_face_geometry()

        # Approximate cell centers to fix face orientation (owner -> out).
        approx = np.zeros((self.n_cells, self.dim))
        cnt = np.zeros(self.n_cells)
        for i in range(self.n_faces):
            approx[self.owner[i]] += fc[i]
            cnt[self.owner[i]] += 1
            if self.neighbor[i] >= 0:
                approx[self.neighbor[i]] += fc[i]
                cnt[self.neighbor[i]] += 1
        approx /= cnt[:, None]

        for i in range(self.n_faces):
            if self.neighbor[i] >= 0:
                want = approx[self.neighbor[i]] - approx[self.owner[i]]
            else:
                want = fc[i] - approx[self.owner[i]]
            if np.dot(area[i], want) < 0.0:
                self.face_nodes[i] = tuple(reversed(self.face_nodes[i]))
                area[i] = -area[i]

        self.face_area = area
        self.face_centroid = fc
        self.face_area_mag = np.linalg.norm(area, axis=1)

        # Exact volumes and centroids by simplex decomposition about the
        # approximate cell center (any interior reference point works).
        vol = np.zeros(self.n_cells)
        cmom = np.zeros((self.n_cells, self.dim))
        pts = self.points
        for i in range(self.n_faces):
            cells = [(self.owner[i], 1.0)]
            if self.neighbor[i] >= 0:
                cells.append((self.neighbor[i], -1.0))
            loop = self.face_nodes[i]
            for cid, sgn in cells:
                x0 = approx[cid]
                if self.dim == 2:
                    a, b = loop
                    va, vb = pts[a] - x0, pts[b] - x0
                    v = sgn * 0.5 * (va[0] * vb[1] - va[1] * vb[0])
                    c = x0 + (va + vb) / 3.0
                    vol[cid] += v
                    cmom[cid] += v * c
                else:
                    m = fc[i]
                    for j in range(len(loop)):
                        p1 = pts[loop[j]]
                        p2 = pts[loop[(j + 1) % len(loop)]]
                        v = sgn * np.dot(np.cross(p1 - x0, p2 - x0), m - x0) / 6.0
                        c = 0.25 * (x0 + p1 + p2 + m)
                        vol[cid] += v
                        cmom[cid] += v * c
        self.cell_volume = vol
        with np.errstate(invalid="ignore"):
            self.cell_centroid = cmom / vol[:, None]

    def _validate(self):
        if np.any(self.cell_volume <= 0.0):
            bad = int(np.argmin(self.cell_volume))
            raise InvalidArgumentError(
                f"non-positive cell volume at cell {bad}: {self.cell_volume[bad]:.3e}"
            )
        # Gauss closure, relative to cell surface area
        closure = np.zeros((self.n_cells, self.dim))
        surf = np.zeros(self.n_cells)
        for i in range(self.n_faces):
            closure[self.owner[i]] += self.face_area[i]
            surf[self.owner[i]] += self.face_area_mag[i]
            if self.neighbor[i] >= 0:
                closure[self.neighbor[i]] -= self.face_area[i]
                surf[self.neighbor[i]] += self.face_area_mag[i]
        rel = np.linalg.norm(closure, axis=1) / surf
        if np.max(rel) > 1e-12:
            raise InvalidArgumentError(
                f"cell {int(np.argmax(rel))} violates Gauss closure ({np.max(rel):.2e})"
            )
        # Patch partition
        boundary = np.flatnonzero(self.neighbor < 0)
        claimed = np.concatenate([p.face_ids for p in self.patches.values()]) \
            if self.patches else np.array([], dtype=np.int64)
        if sorted(claimed.tolist()) != sorted(boundary.tolist()):
            raise InvalidArgumentError("patches do not partition the boundary faces")

    # -- derived connectivity (cached) -------------------------------------

    @property
    def fv(self):
        """Face-based quantities used by the discretization (cached)."""
        if self._fv is None:
            self._fv = _FvGeometry(self)
        return self._fv

    @property
    def internal_faces(self):
        return self.fv.internal

    @property
    def boundary_faces(self):
        return self.fv.boundary

    def patch_of_face(self):
        """Map boundary face id -> patch name."""
        out = {}
        for p in self.patches.values():
            for f in p.face_ids:
                out[int(f)] = p.name
        return out

    def total_volume(self):
        return float(self.cell_volume.sum())


class _FvGeometry:
    """Precomputed per-face data for the FV operators."""

    def __init__(self, mesh: Mesh):
        self.internal = np.flatnonzero(mesh.neighbor >= 0)
        self.boundary = np.flatnonzero(mesh.neighbor < 0)

        o = mesh.owner[self.internal]
        n = mesh.neighbor[self.internal]
        self.i_owner, self.i_neigh = o, n
        d = mesh.cell_centroid[n] - mesh.cell_centroid[o]
        self.d = d
        self.d_mag = np.linalg.norm(d, axis=1)
        A = mesh.face_area[self.internal]
        AdotD = np.einsum("ij,ij->i", A, d)
        if np.any(AdotD <= 0.0):
            raise InvalidArgumentError("internal face with non-positive A.d")
        self.orth_coeff = np.einsum("ij,ij->i", A, A) / AdotD  # |A|^2/(A.d)
        # over-relaxed decomposition A = E + T with E parallel to d,
        # |E| = |A|^2/(A.d) so the orthogonal flux uses orth_coeff directly
        self.E = d * self.orth_coeff[:, None]
        self.T = A - self.E

        # linear interpolation weight of the owner value at the face
        dhat = d / self.d_mag[:, None]
        t = np.einsum(
            "ij,ij->i", mesh.face_centroid[self.internal] - mesh.cell_centroid[o], dhat
        ) / self.d_mag
        self.w_owner = np.clip(1.0 - t, 0.05, 0.95)

        # boundary faces
        bo = mesh.owner[self.boundary]
        self.b_owner = bo
        db = mesh.face_centroid[self.boundary] - mesh.cell_centroid[bo]
        Ab = mesh.face_area[self.boundary]
        nb = Ab / np.linalg.norm(Ab, axis=1)[:, None]
        self.b_normal = nb
        self.b_delta = np.einsum("ij,ij->i", db, nb)  # wall-normal distance
        AbdotDb = np.einsum("ij,ij->i", Ab, db)
        if np.any(AbdotDb <= 0.0):
            raise InvalidArgumentError("boundary face with non-positive A.d")
        self.b_orth_coeff = np.einsum("ij,ij->i", Ab, Ab) / AbdotDb
        self.b_E = db / AbdotDb[:, None] * np.einsum("ij,ij->i", Ab, Ab)[:, None]
        self.b_T = Ab - self.b_E
        # position of each boundary face inside the boundary ordering
        self.b_index = {int(f): i for i, f in enumerate(self.boundary)}


def mesh_quality(mesh: Mesh) -> QualityReport:
    """Non-orthogonality and skewness statistics of a mesh.

    Non-orthogonality of an internal face is the angle between the
    owner-to-neighbor vector and the face area vector. Skewness is the
    distance from the face centroid to the intersection of the
    owner-neighbor line with the face plane, normalized by the
    centroid distance.
    """
    g = mesh.fv
    if len(g.internal) == 0:
        angles = np.zeros(0)
        skew = np.zeros(0)
    else:
        A = mesh.face_area[g.internal]
        cosang = np.einsum("ij,ij->i", A, g.d) / (
            np.linalg.norm(A, axis=1) * g.d_mag
        )
        angles = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        # intersection of the P-N line with the face plane
        n = A / np.linalg.norm(A, axis=1)[:, None]
        xp = mesh.cell_centroid[g.i_owner]
        xf = mesh.face_centroid[g.internal]
        t = np.einsum("ij,ij->i", xf - xp, n) / np.einsum("ij,ij->i", g.d, n)
        xi = xp + t[:, None] * g.d
        skew = np.linalg.norm(xf - xi, axis=1) / g.d_mag

    h = mesh.cell_volume ** (1.0 / mesh.dim)
    return QualityReport(
        avg_non_orthogonality=float(angles.mean()) if angles.size else 0.0,
        max_non_orthogonality=float(angles.max()) if angles.size else 0.0,
        avg_skewness=float(skew.mean()) if skew.size else 0.0,
        max_skewness=float(skew.max()) if skew.size else 0.0,
        cell_count=mesh.n_cells,
        h_min=float(h.min()),
        h_max=float(h.max()),
    )
