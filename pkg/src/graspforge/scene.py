"""World scene: posed object meshes resting above an optional table plane."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import TriMesh, signed_distance


@dataclass(frozen=True, eq=False)
class Scene:
    """Meshes in world coordinates keyed by object id, plus the half-space z >= table_height."""

    objects: dict = field(default_factory=dict)
    table_height: float = None

    def sphere_clearance(self, centers, radii, exclude=()) -> np.ndarray:
        """Per-sphere min of SDF(center) - radius over the table and non-excluded meshes."""
        c = np.atleast_2d(np.asarray(centers, float))
        r = np.asarray(radii, float).reshape(-1)
        out = np.full(len(c), np.inf)
        if len(c) == 0:
            return out
        if self.table_height is not None:
            out = np.minimum(out, c[:, 2] - self.table_height - r)
        for oid, mesh in self.objects.items():
            if oid in exclude:
                continue
            out = np.minimum(out, signed_distance(mesh, c) - r)
        return out

    def collision_free(self, centers, radii, exclude=()) -> bool:
        return bool(np.all(self.sphere_clearance(centers, radii, exclude) >= 0.0))

    def with_object(self, oid: str, mesh: TriMesh) -> "Scene":
        objs = dict(self.objects)
        objs[oid] = mesh
        return Scene(objs, self.table_height)
