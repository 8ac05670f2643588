"""Rigid-body pose and extruded-footprint object models.

Micro-objects are described by a 2D footprint of unit cells (SU-8 layout
style: equal squares, 4-connected) extruded to a fixed thickness.  For the
field/force model the extruded solid is tiled into equal cubic elements,
each represented by its center, volume and an equivalent-sphere radius.
The body frame origin sits at the footprint reference point (area centroid
by default) at mid-thickness; the body z axis is the extrusion axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

__all__ = [
    "Pose",
    "ShapeSpec",
    "ObjectModel",
    "build_object",
    "builtin_shape",
    "wrap_angle",
    "rotate_pose",
]

# Default SU-8 layer geometry (m).  In-plane cell side equals the layer
# thickness, so a single cell is a cube.
DEFAULT_CELL_SIZE = 50e-6
DEFAULT_THICKNESS = 50e-6

_ORTHO_TOL = 1e-10


def _check_rotation(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {R.shape}")
    err = np.abs(R.T @ R - np.eye(3)).max()
    if err > _ORTHO_TOL:
        raise ValueError(f"rotation not orthonormal (|R'R - I| = {err:.2e})")
    if np.linalg.det(R) < 0.0:
        raise ValueError("rotation has negative determinant (reflection)")
    return R


@dataclass
class Pose:
    """Rigid transform from body frame to world frame: x_w = R @ x_b + p."""

    p: np.ndarray  # position (3,), m
    R: np.ndarray  # rotation matrix (3,3)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float).reshape(3)
        self.R = _check_rotation(self.R)

    @classmethod
    def from_xyz_yaw(cls, x: float, y: float, z: float, yaw: float = 0.0) -> "Pose":
        return cls(np.array([x, y, z]), Rotation.from_euler("z", yaw).as_matrix())

    @property
    def yaw(self) -> float:
        """In-plane orientation in (-pi, pi] (ZYX convention)."""
        phi = float(np.arctan2(self.R[1, 0], self.R[0, 0]))
        if phi <= -np.pi:
            phi = np.pi
        return phi

    def to_world(self, x_body: np.ndarray) -> np.ndarray:
        x_body = np.asarray(x_body, dtype=float)
        return x_body @ self.R.T + self.p

    def copy(self) -> "Pose":
        return Pose(self.p.copy(), self.R.copy())


@dataclass(frozen=True)
class ShapeSpec:
    """Footprint layout: unit cells on an integer grid, extruded in z.

    ``cells`` are (ix, iy) grid indices of occupied squares; the set must be
    4-connected.  ``symmetry_order`` is the in-plane rotational symmetry
    (2 for the S/Z shape, 1 for the T shape) used when wrapping yaw errors.
    ``reference_point`` is the body-frame origin in footprint coordinates;
    None selects the footprint area centroid.
    """

    name: str
    cells: tuple[tuple[int, int], ...]
    cell_size: float = DEFAULT_CELL_SIZE
    thickness: float = DEFAULT_THICKNESS
    symmetry_order: int = 1
    reference_point: tuple[float, float] | None = None

    def __post_init__(self):
        cells = tuple((int(ix), int(iy)) for ix, iy in self.cells)
        object.__setattr__(self, "cells", cells)
        if len(cells) == 0:
            raise ValueError("shape needs at least one cell")
        if len(set(cells)) != len(cells):
            raise ValueError("duplicate cells in footprint")
        if self.cell_size <= 0 or self.thickness <= 0:
            raise ValueError("cell_size and thickness must be positive")
        if self.symmetry_order < 1:
            raise ValueError("symmetry_order must be >= 1")
        self._check_connected(cells)

    @staticmethod
    def _check_connected(cells: tuple[tuple[int, int], ...]) -> None:
        todo = {cells[0]}
        seen: set[tuple[int, int]] = set()
        cellset = set(cells)
        while todo:
            c = todo.pop()
            seen.add(c)
            x, y = c
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in cellset and nb not in seen:
                    todo.add(nb)
        if seen != cellset:
            raise ValueError("footprint cells are not 4-connected")

    def centroid(self) -> np.ndarray:
        """Footprint area centroid in footprint coordinates (m)."""
        centers = np.array([(ix + 0.5, iy + 0.5) for ix, iy in self.cells])
        return centers.mean(axis=0) * self.cell_size

    def origin(self) -> np.ndarray:
        if self.reference_point is not None:
            return np.asarray(self.reference_point, dtype=float)
        return self.centroid()

    def footprint_polygons(self) -> list[np.ndarray]:
        """Cell corner rectangles relative to the body origin, (4,2) each."""
        ox, oy = self.origin()
        s = self.cell_size
        out = []
        for ix, iy in self.cells:
            x0, y0 = ix * s - ox, iy * s - oy
            out.append(
                np.array([[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]])
            )
        return out


# Footprints from the reference micro-object set: an S/Z tetromino (2-fold
# rotational symmetry) and a T tetromino (no rotational symmetry).
_BUILTIN_CELLS = {
    "SZ": ((0, 0), (1, 0), (1, 1), (2, 1)),
    "T": ((0, 0), (1, 0), (2, 0), (1, 1)),
}
_BUILTIN_SYMMETRY = {"SZ": 2, "T": 1}


def builtin_shape(
    name: str,
    cell_size: float = DEFAULT_CELL_SIZE,
    thickness: float = DEFAULT_THICKNESS,
) -> ShapeSpec:
    key = name.upper()
    if key not in _BUILTIN_CELLS:
        raise KeyError(f"unknown shape {name!r}; have {sorted(_BUILTIN_CELLS)}")
    return ShapeSpec(
        name=key,
        cells=_BUILTIN_CELLS[key],
        cell_size=cell_size,
        thickness=thickness,
        symmetry_order=_BUILTIN_SYMMETRY[key],
    )


@dataclass(frozen=True)
class ObjectModel:
    """Volumetric element tiling of an extruded footprint.

    ``centers`` are element centers in the body frame (m), ``volumes`` the
    element volumes (m^3) and ``radii`` equivalent-sphere radii used by the
    hydrodynamic model.  The volume-weighted mean of ``centers`` coincides
    with the body origin when the reference point is the area centroid.
    """

    shape: ShapeSpec
    centers: np.ndarray  # (m, 3)
    volumes: np.ndarray  # (m,)
    radii: np.ndarray  # (m,)
    total_volume: float

    def __post_init__(self):
        vol = float(self.volumes.sum())
        if abs(vol - self.total_volume) > 1e-9 * self.total_volume:
            raise ValueError("element volumes do not sum to the total volume")

    @property
    def n_elements(self) -> int:
        return len(self.volumes)

    def world_centers(self, pose: Pose) -> np.ndarray:
        return pose.to_world(self.centers)


def build_object(shape: ShapeSpec, elements_per_cell: int = 1) -> ObjectModel:
    """Tile the extruded footprint into equal cubic elements.

    ``elements_per_cell`` must be 1 or a perfect cube k^3; each cell is then
    split into k x k x k sub-cubes.  Element radius is the equal-volume
    sphere radius (3 v / 4 pi)^(1/3).
    """
    k = round(elements_per_cell ** (1.0 / 3.0))
    if k**3 != elements_per_cell or elements_per_cell < 1:
        raise ValueError("elements_per_cell must be a perfect cube (1, 8, 27, ...)")
    s = shape.cell_size
    sub = s / k
    # sub-cube center offsets within one cell, 1D
    offs = (np.arange(k) + 0.5) * sub
    ox, oy = shape.origin()
    centers = []
    for ix, iy in shape.cells:
        x0, y0 = ix * s, iy * s
        for ax in offs:
            for ay in offs:
                for az in offs:
                    centers.append((x0 + ax - ox, y0 + ay - oy, az - shape.thickness / 2.0))
    centers = np.array(centers, dtype=float)
    v = sub * sub * shape.thickness / k
    volumes = np.full(len(centers), v)
    radii = np.full(len(centers), (3.0 * v / (4.0 * np.pi)) ** (1.0 / 3.0))
    total = s * s * shape.thickness * len(shape.cells)
    return ObjectModel(
        shape=shape,
        centers=centers,
        volumes=volumes,
        radii=radii,
        total_volume=total,
    )


def wrap_angle(target: float, current: float, symmetry_order: int = 1) -> float:
    """Signed smallest yaw difference target - current modulo the symmetry.

    For an object with n-fold in-plane rotational symmetry the orientations
    phi and phi + 2 pi / n are indistinguishable, so the error is wrapped
    into (-pi/n, pi/n].
    """
    if symmetry_order < 1:
        raise ValueError("symmetry_order must be >= 1")
    period = 2.0 * np.pi / symmetry_order
    d = (target - current) % period
    if d > period / 2.0:
        d -= period
    return float(d)


def rotate_pose(pose: Pose, axis_angle: np.ndarray) -> Pose:
    """Left-multiply the pose rotation by exp([axis_angle]_x)."""
    rv = np.asarray(axis_angle, dtype=float).reshape(3)
    dR = Rotation.from_rotvec(rv).as_matrix()
    return Pose(pose.p.copy(), dR @ pose.R)
