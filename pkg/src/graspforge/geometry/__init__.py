from .hull import DegenerateHullError, convex_hull
from .mesh import (
    DegenerateTriangleError,
    MeshError,
    NotWatertightError,
    ObjParseError,
    TriMesh,
    center_of_mass,
    format_obj,
    load_mesh,
    parse_obj,
    save_mesh,
)
from .primitives import box, centered_box, cylinder, icosphere, unit_cube
from .sampling import SurfaceSample, make_rng, sample_surface, sample_surface_arrays
from .sdf import closest_points, inside, signed_distance, signed_distance_bruteforce

__all__ = [
    "TriMesh", "SurfaceSample", "MeshError", "ObjParseError", "DegenerateTriangleError",
    "NotWatertightError", "DegenerateHullError", "load_mesh", "parse_obj", "format_obj",
    "save_mesh", "convex_hull", "signed_distance", "signed_distance_bruteforce",
    "closest_points", "inside", "sample_surface", "sample_surface_arrays", "make_rng",
    "center_of_mass", "box", "centered_box", "unit_cube", "icosphere", "cylinder",
]
