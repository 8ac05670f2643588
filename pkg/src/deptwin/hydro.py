"""Low-Reynolds hydrodynamic resistance of element-tiled micro-objects.

Creeping-flow drag is assembled by superposing Stokes drag of the
individual elements about the body origin (no hydrodynamic interaction
between elements -- a deliberately simple surrogate).  For an element of
equivalent radius a_k at body position r_k:

    K     = sum 6 pi a_k I                      (translation, m)
    C_O   = sum 6 pi a_k [r_k]_x                (coupling, m^2)
    Omega = sum 8 pi a_k^3 I + 6 pi a_k [r_k]_x' [r_k]_x   (rotation, m^3)

The grand resistance G = [[K, C_O'], [C_O, Omega]] maps mu * (v, omega) to
the applied wrench (F, T) needed to sustain that rigid-body motion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ObjectModel, Pose

__all__ = [
    "GRAVITY",
    "Wrench",
    "ResistanceSet",
    "resistance_tensors",
    "world_resistance",
    "sedimentation",
    "mobility_solve",
    "skew",
]

GRAVITY = 9.80665  # standard gravity (m/s^2)

_COND_LIMIT = 1e12


def skew(r: np.ndarray) -> np.ndarray:
    """Cross-product matrix [r]_x with [r]_x @ v = r x v."""
    x, y, z = r
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


@dataclass
class Wrench:
    """Force (N) and torque (N m) about the body origin, world axes."""

    F: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        self.F = np.asarray(self.F, dtype=float).reshape(3)
        self.T = np.asarray(self.T, dtype=float).reshape(3)

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.F + other.F, self.T + other.T)

    def __sub__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.F - other.F, self.T - other.T)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.F, self.T])


@dataclass
class ResistanceSet:
    """Viscosity-normalized resistance tensors about the body origin."""

    K: np.ndarray  # (3,3), m
    C: np.ndarray  # (3,3), m^2
    Omega: np.ndarray  # (3,3), m^3

    def grand(self) -> np.ndarray:
        G = np.zeros((6, 6))
        G[:3, :3] = self.K
        G[:3, 3:] = self.C.T
        G[3:, :3] = self.C
        G[3:, 3:] = self.Omega
        return G


def resistance_tensors(obj: ObjectModel) -> ResistanceSet:
    """Element-superposition resistance in the body frame."""
    a = obj.radii
    r = obj.centers
    K = 6.0 * np.pi * a.sum() * np.eye(3)
    C = np.zeros((3, 3))
    Om = 8.0 * np.pi * (a**3).sum() * np.eye(3)
    for ak, rk in zip(a, r):
        S = skew(rk)
        C += 6.0 * np.pi * ak * S
        Om += 6.0 * np.pi * ak * (S.T @ S)
    return ResistanceSet(K=K, C=C, Omega=Om)


def world_resistance(rs: ResistanceSet, pose: Pose) -> ResistanceSet:
    """Rotate body-frame resistance tensors into world axes."""
    R = pose.R
    return ResistanceSet(K=R @ rs.K @ R.T, C=R @ rs.C @ R.T, Omega=R @ rs.Omega @ R.T)


def sedimentation(obj: ObjectModel, rho_m: float, rho_o: float) -> Wrench:
    """Net gravity + buoyancy wrench; negative z for objects denser than
    the medium."""
    fz = (rho_m - rho_o) * obj.total_volume * GRAVITY
    return Wrench(np.array([0.0, 0.0, fz]), np.zeros(3))


def mobility_solve(rs_world: ResistanceSet, mu: float, wrench: Wrench):
    """Quasi-static rigid-body velocities from an applied wrench.

    Solves mu * G [v; omega] = [F; T]; returns (v, omega).
    """
    G = rs_world.grand()
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"grand resistance matrix ill-conditioned (cond {cond:.3e})"
        )
    sol = np.linalg.solve(mu * G, wrench.as_vector())
    return sol[:3], sol[3:]
