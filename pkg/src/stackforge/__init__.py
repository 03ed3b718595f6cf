"""stackforge: turn one-parameter families of 2D regions into 3D-printable
solids by rasterizing frame stacks, assembling them into a voxel volume,
and extracting a watertight surface mesh."""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]
