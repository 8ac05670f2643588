"""Geometry scan: maximize outward in-plane force support across the disc.

For each electrode-layout variant:
  1. bisect surface_offset so the plain quadrature drive at 38 V levitates
     the reference object exactly at z = 100 um,
  2. check the vertical force profile is monotone decreasing (no interior
     hump; basin below, roll-off above),
  3. at several radii sample random phase-lattice states at 50 V, keep the
     ones whose vertical force is exactly rescalable into the hover band
     with amplitude in [38, 60] V, rescale, and report the achievable
     force support: outward, inward, tangential, and yaw torque of both
     signs (99.5th percentile, not max, as a crude reachability discount).
"""
import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench_batch
from deptwin.hydro import sedimentation
from deptwin.simulator import quadrature_phases

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
m = MaterialProperties.water_su8()
OMEGA = 2 * math.pi * 300e3
f_sed = sedimentation(obj, m.rho_m, m.rho_o)
NEED = -float(f_sed.F[2])
AMP, AMP_LO, AMP_HI = 50.0, 38.0, 60.0
BAND = (AMP / AMP_HI) ** 2, (AMP / AMP_LO) ** 2  # rescalable Fz/NEED band
N_STATES = 24000
RADII = [0.0, 50e-6, 100e-6, 140e-6]


def hover_fz(basis, z=100e-6):
    pose = Pose.from_xyz_yaw(0.0, 0.0, z, 0.0)
    forms = assemble_forms(obj, pose, basis, m, OMEGA)
    u = quadrature_phases(4, 38.0).complex()
    w = eval_wrench_batch(forms, u[None, :])[0]
    return float(w[2])


def calibrate(make):
    lo, hi = 1.0e-6, 80e-6  # larger offset -> stronger field
    flo, fhi = hover_fz(make(lo)), hover_fz(make(hi))
    if not (flo < NEED < fhi):
        return None
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if hover_fz(make(mid)) < NEED:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def basin_profile(basis):
    zs = np.arange(40e-6, 165e-6, 20e-6)
    vals = [hover_fz(basis, z) / NEED for z in zs]
    mono = all(a > b for a, b in zip(vals, vals[1:]))
    return mono, vals


def support(basis, rng):
    """Per-radius force/torque support after exact vertical rescale."""
    rows = []
    for r in RADII:
        pose = Pose.from_xyz_yaw(r, 0.0, 100e-6, 0.0)
        forms = assemble_forms(obj, pose, basis, m, OMEGA)
        ph = rng.integers(0, 360, size=(N_STATES, 4))
        ph[:, 0] = 0
        U = AMP * np.exp(1j * np.deg2rad(ph))
        W = eval_wrench_batch(forms, U)  # (N, 6)
        fz = W[:, 2]
        keep = (fz > BAND[0] * NEED) & (fz < BAND[1] * NEED)
        if keep.sum() < 50:
            rows.append(None)
            continue
        Wk = W[keep]
        q2 = NEED / Wk[:, 2]
        Fx, Fy = Wk[:, 0] * q2, Wk[:, 1] * q2
        Tz = Wk[:, 5] * q2
        pc = lambda v: float(np.percentile(v, 99.5))
        rows.append(dict(
            out=pc(Fx), inw=pc(-Fx), tan=pc(np.abs(Fy)),
            tzp=pc(Tz), tzn=pc(-Tz), kept=int(keep.sum()),
        ))
    return rows


variants = []
for tip in (160e-6, 180e-6, 200e-6, 240e-6):
    for zsrc in (-25e-6, -45e-6, -65e-6):
        variants.append((tip, zsrc, 35.0, 3))
variants += [(200e-6, -45e-6, 15.0, 3), (200e-6, -45e-6, 35.0, 1),
             (180e-6, -25e-6, 15.0, 3), (160e-6, -25e-6, 35.0, 5)]

rng = np.random.default_rng(11)
print("tip(um) zsrc(um) arc nsrc  offset(um)  mono  "
      "outward support per radius (1e-10 N) @ r=0/50/100/140")
for tip, zsrc, arc, nsrc in variants:
    mk = lambda off: ElectrodeBasis.quadrupole(
        tip_radius=tip, z=zsrc, arc_half_angle_deg=arc,
        sources_per_electrode=nsrc, surface_offset=off)
    off = calibrate(mk)
    if off is None:
        print(f"{tip*1e6:5.0f} {zsrc*1e6:7.0f} {arc:4.0f} {nsrc:3d}   "
              "-- hover not calibratable --")
        continue
    basis = mk(off)
    mono, prof = basin_profile(basis)
    rows = support(basis, rng)
    outs = "  ".join(
        "----" if d is None else f"{d['out']*1e10:5.2f}" for d in rows)
    tzmin = min((min(d["tzp"], d["tzn"]) for d in rows if d), default=0)
    print(f"{tip*1e6:5.0f} {zsrc*1e6:7.0f} {arc:4.0f} {nsrc:3d} "
          f"{off*1e6:10.3f}  {str(mono):5s} {outs}   minTz {tzmin:.1e}"
          f"  basin {' '.join(f'{v:.2f}' for v in prof)}")
