"""Mesh persistence: a plain-text native format and VTK legacy export.

Native format (version 1), whitespace separated::

    hemoflow-mesh 1
    DIM <2|3>
    POINTS <n>
    x y [z]          # one line per point, %.17g (lossless round-trip)
    FACES <n>
    nv v0 ... v(nv-1) owner neighbor
    PATCHES <n>
    <name> <kind> <nfaces> [<meta json, one line>]
    f0 f1 ...

Geometry is recomputed from the points on load, so write -> read is
lossless by construction.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import SchemaError
from .core import Mesh, Patch

_MAGIC = "hemoflow-mesh"
_VERSION = 1


def write_mesh(mesh: Mesh, path):
    with open(path, "w") as fh:
        fh.write(f"{_MAGIC} {_VERSION}\n")
        fh.write(f"DIM {mesh.dim}\n")
        fh.write(f"POINTS {len(mesh.points)}\n")
        for p in mesh.points:
            fh.write(" ".join(f"{c:.17g}" for c in p) + "\n")
        fh.write(f"FACES {mesh.n_faces}\n")
        for i, loop in enumerate(mesh.face_nodes):
            fh.write(f"{len(loop)} " + " ".join(map(str, loop)) +
                     f" {mesh.owner[i]} {mesh.neighbor[i]}\n")
        fh.write(f"PATCHES {len(mesh.patches)}\n")
        for p in mesh.patches.values():
            fh.write(f"{p.name} {p.kind} {len(p.face_ids)} {json.dumps(p.meta)}\n")
            fh.write(" ".join(map(str, p.face_ids.tolist())) + "\n")


def read_mesh(path) -> Mesh:
    with open(path) as fh:
        lines = iter(fh.read().splitlines())
    try:
        head = next(lines).split()
        if head[0] != _MAGIC or int(head[1]) != _VERSION:
            raise SchemaError(f"not a {_MAGIC} v{_VERSION} file: {path}")
        tok = next(lines).split()
        if tok[0] != "DIM":
            raise SchemaError("expected DIM section")
        dim = int(tok[1])
        tok = next(lines).split()
        if tok[0] != "POINTS":
            raise SchemaError("expected POINTS section")
        npts = int(tok[1])
        pts = np.array([[float(c) for c in next(lines).split()] for _ in range(npts)])
        tok = next(lines).split()
        if tok[0] != "FACES":
            raise SchemaError("expected FACES section")
        nf = int(tok[1])
        face_nodes, owner, neighbor = [], [], []
        for _ in range(nf):
            nums = [int(t) for t in next(lines).split()]
            nv = nums[0]
            if len(nums) != nv + 3:
                raise SchemaError("malformed FACES line")
            face_nodes.append(tuple(nums[1:1 + nv]))
            owner.append(nums[1 + nv])
            neighbor.append(nums[2 + nv])
        tok = next(lines).split()
        if tok[0] != "PATCHES":
            raise SchemaError("expected PATCHES section")
        patches = []
        for _ in range(int(tok[1])):
            parts = next(lines).split(None, 3)
            name, kind, cnt = parts[0], parts[1], int(parts[2])
            meta = json.loads(parts[3]) if len(parts) > 3 else {}
            ids = [int(t) for t in next(lines).split()]
            if len(ids) != cnt:
                raise SchemaError(f"patch {name}: face count mismatch")
            patches.append(Patch(name, kind, np.array(ids, dtype=np.int64), meta=meta))
    except StopIteration:
        raise SchemaError(f"truncated mesh file: {path}")
    return Mesh(dim, pts, face_nodes, owner, neighbor, patches)


def _cell_faces(mesh):
    out = [[] for _ in range(mesh.n_cells)]
    for i in range(mesh.n_faces):
        out[mesh.owner[i]].append(i)
        if mesh.neighbor[i] >= 0:
            out[mesh.neighbor[i]].append(i)
    return out


def _polygon_loop(mesh, faces):
    """Order the 2-vertex faces of a 2D cell into a closed vertex loop."""
    edges = {f: mesh.face_nodes[f] for f in faces}
    adj = {}
    for a, b in edges.values():
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = next(iter(adj))
    loop = [start]
    prev = None
    while True:
        nxts = [v for v in adj[loop[-1]] if v != prev]
        prev = loop[-1]
        loop.append(nxts[0])
        if loop[-1] == start:
            return loop[:-1]


def write_vtk(mesh: Mesh, path, cell_data=None):
    """VTK legacy unstructured-grid export.

    2D cells become VTK_POLYGON; 3D cells are written as VTK_POLYHEDRON
    face streams. ``cell_data`` maps field name -> (n_cells,) or
    (n_cells, dim) array.
    """
    cell_data = cell_data or {}
    cf = _cell_faces(mesh)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("hemoflow mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {len(mesh.points)} double\n")
        for p in mesh.points:
            coords = list(p) + [0.0] * (3 - mesh.dim)
            fh.write(" ".join(f"{c:.12g}" for c in coords) + "\n")

        conns, types = [], []
        for c in range(mesh.n_cells):
            if mesh.dim == 2:
                loop = _polygon_loop(mesh, cf[c])
                conns.append([len(loop)] + loop)
                types.append(7)  # VTK_POLYGON
            else:
                stream = [len(cf[c])]
                for f in cf[c]:
                    loop = mesh.face_nodes[f]
                    stream.append(len(loop))
                    stream.extend(loop)
                conns.append([len(stream)] + stream)
                types.append(42)  # VTK_POLYHEDRON
        total = sum(len(c) for c in conns)
        fh.write(f"CELLS {mesh.n_cells} {total}\n")
        for c in conns:
            fh.write(" ".join(map(str, c)) + "\n")
        fh.write(f"CELL_TYPES {mesh.n_cells}\n")
        for t in types:
            fh.write(f"{t}\n")

        if cell_data:
            fh.write(f"CELL_DATA {mesh.n_cells}\n")
            for name, arr in cell_data.items():
                arr = np.asarray(arr, dtype=float)
                if arr.ndim == 1:
                    fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                    for v in arr:
                        fh.write(f"{v:.12g}\n")
                else:
                    fh.write(f"VECTORS {name} double\n")
                    for row in arr:
                        vec = list(row) + [0.0] * (3 - arr.shape[1])
                        fh.write(" ".join(f"{v:.12g}" for v in vec) + "\n")
