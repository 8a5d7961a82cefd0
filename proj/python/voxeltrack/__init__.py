"""Multi-view multi-person 3D pose tracking over a voxel volume."""

try:
    from ._voxeltrack import *  # noqa: F401,F403
    from ._voxeltrack import __doc__ as _core_doc  # noqa: F401
except ImportError:  # running against a bare build tree on sys.path
    from _voxeltrack import *  # noqa: F401,F403
