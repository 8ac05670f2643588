"""Proportional pose controller and reference-wrench synthesis.

The outer loop turns a pose error into rigid-body velocity references

    v     = k_v (r_ref - r_est),        |v_xy| <= v_max
    omega = k_w wrap(phi_ref - phi_est), |omega_z| <= omega_max

(planar control: v_z = 0, the levitation height is held open-loop) and
maps them through the hydrodynamic resistance to the wrench the actuation
must deliver:

    F_ref = mu K_w v + mu C_w' omega - F_sed
    T_ref = mu C_w v + mu Omega_w omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import wrap_angle
from .hydro import ResistanceSet, Wrench

__all__ = ["ControlGains", "TargetPose", "velocity_refs", "reference_wrench"]


@dataclass(frozen=True)
class ControlGains:
    """Proportional gains and saturation limits.

    The in-plane force term of the inversion metric grades direction
    only, so the translation gain and saturation have no bearing on
    which drive states get picked -- the delivered speed is whatever
    magnitude rides along with the direction-correct states.  The yaw
    channel is different: the torque reference magnitude sets the scale
    the torque-magnitude error is graded against, so omega_max is kept
    near the torque the drive can actually deliver (a few 1e-15 N m of
    z-torque against the rotational drag).  A saturated reference far
    above that flattens the magnitude term across all candidate states
    and the selection pressure dies.
    """

    k_v: float = 50.0  # position gain (1/s)
    k_omega: float = 10.0  # yaw gain (1/s)
    v_max: float = 500e-6  # in-plane speed saturation (m/s)
    omega_max: float = 0.10  # yaw rate saturation (rad/s)
    pos_deadband: float = 0.2e-6  # m
    # Yaw corrections only engage well clear of the measurement noise
    # floor (~5 mrad per frame): with a tight deadband the channel
    # flickers between "hold" and sub-resolution torque demands, and a
    # torque reference barely above zero grades the solver on the
    # direction of a vector that is mostly parasitic tilt.
    yaw_deadband: float = 6e-3  # rad

    def __post_init__(self):
        if self.k_v <= 0 or self.k_omega <= 0:
            raise ValueError("gains must be positive")
        if self.v_max <= 0 or self.omega_max <= 0:
            raise ValueError("saturation limits must be positive")
        if self.pos_deadband < 0 or self.yaw_deadband < 0:
            raise ValueError("deadbands must be nonnegative")


@dataclass(frozen=True)
class TargetPose:
    """In-plane target: position (m) and yaw (rad); z is open-loop."""

    x: float
    y: float
    yaw: float = 0.0

    def validate(self, manipulation_radius: float) -> None:
        r = float(np.hypot(self.x, self.y))
        if r > manipulation_radius:
            raise ValueError(
                f"target {r * 1e6:.1f} um from center exceeds the "
                f"{manipulation_radius * 1e6:.0f} um manipulation radius"
            )


def velocity_refs(
    est_xy: np.ndarray,
    est_yaw: float,
    target: TargetPose,
    gains: ControlGains,
    symmetry_order: int = 1,
):
    """Saturated proportional velocity references (v (3,), omega (3,))."""
    ex = target.x - float(est_xy[0])
    ey = target.y - float(est_xy[1])
    if math.hypot(ex, ey) < gains.pos_deadband:
        v = np.zeros(3)
    else:
        v = np.array([gains.k_v * ex, gains.k_v * ey, 0.0])
        speed = float(np.hypot(v[0], v[1]))
        if speed > gains.v_max:
            v *= gains.v_max / speed
    yerr = wrap_angle(target.yaw, est_yaw, symmetry_order)
    if abs(yerr) < gains.yaw_deadband:
        wz = 0.0
    else:
        wz = float(np.clip(gains.k_omega * yerr, -gains.omega_max,
                           gains.omega_max))
    return v, np.array([0.0, 0.0, wz])


def reference_wrench(
    v: np.ndarray,
    omega: np.ndarray,
    rs_world: ResistanceSet,
    mu: float,
    f_sed: Wrench,
) -> Wrench:
    """Wrench required to sustain (v, omega) against drag and gravity."""
    F = mu * (rs_world.K @ v + rs_world.C.T @ omega) - f_sed.F
    if not np.any(omega):
        # With the yaw channel at rest the only torque demand left is the
        # translation-coupling term, orders of magnitude below what the
        # phase grid can steer.  Commanding it anyway pulls the error
        # metric out of its parasitic-suppression branch and grades the
        # solver on the direction of an unresolvable micro-vector, so the
        # torque reference is zeroed outright.
        T = np.zeros(3)
    else:
        T = mu * (rs_world.C @ v + rs_world.Omega @ omega) - f_sed.T
    return Wrench(F, T)
