from .core import Mesh, Patch, QualityReport, mesh_quality, NON_ORTHOGONALITY_CAP_DEG
from .generators import (
    generate_box_mesh,
    generate_channel_mesh,
    generate_pipe_mesh,
    generate_bifurcation_mesh,
)
from .meshio import read_mesh, write_mesh, write_vtk

__all__ = [
    "Mesh", "Patch", "QualityReport", "mesh_quality",
    "NON_ORTHOGONALITY_CAP_DEG",
    "generate_box_mesh", "generate_channel_mesh",
    "generate_pipe_mesh", "generate_bifurcation_mesh",
    "read_mesh", "write_mesh", "write_vtk",
]
