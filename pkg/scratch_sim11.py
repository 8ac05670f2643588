import math
import numpy as np
from scipy.optimize import brentq
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis, FOUR_PI
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench
from deptwin.inverter import PhasorVector
from deptwin.hydro import sedimentation

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
fz_need = -sedimentation(obj, m.rho_m, m.rho_o).F[2]
quad = PhasorVector(np.array([0.0, 90.0, 180.0, 270.0]), 38.0)


def wedge_basis(half_arc_deg, n_src, surface_offset, tip_radius=200e-6):
    sources, weights, scales = [], [], []
    up = np.array([0.0, 0.0, surface_offset])
    for i in range(4):
        ang0 = 2.0 * np.pi * i / 4
        angs = ang0 + np.deg2rad(np.linspace(-half_arc_deg, half_arc_deg, n_src))
        pts = np.stack([tip_radius * np.cos(angs), tip_radius * np.sin(angs), np.zeros(n_src)], axis=1)
        w = np.ones(n_src)
        probe = pts + up
        d = np.linalg.norm(probe[:, None, :] - pts[None, :, :], axis=-1)
        pot = (w[None, :] / (FOUR_PI * d)).sum(axis=1)
        sources.append(pts)
        weights.append(w)
        scales.append(1.0 / pot.mean())
    return ElectrodeBasis(sources, weights, np.array(scales), clearance=5e-6)


def fz_quad(basis, z):
    pose = Pose.from_xyz_yaw(0.0, 0.0, z, 0.0)
    forms = assemble_forms(obj, pose, basis, m, om)
    return eval_wrench(forms, quad.complex()).F[2]


for half_arc, n_src in [(35, 3), (35, 5), (30, 3)]:
    # calibrate surface_offset so quadrature at 38 V balances sedimentation at z=100um
    def miss(off):
        return fz_quad(wedge_basis(half_arc, n_src, off), 100e-6) - fz_need

    off = brentq(miss, 1e-6, 60e-6, xtol=1e-9)
    basis = wedge_basis(half_arc, n_src, off)
    prof = {z: fz_quad(basis, z * 1e-6) for z in [40, 60, 80, 90, 100, 110, 120, 140, 160]}
    peak_z = max(prof, key=prof.get)
    print(f"arc +/-{half_arc} n={n_src}: offset={off*1e6:.3f} um; basin peak z={peak_z} "
          f"margin {100*(prof[peak_z]/fz_need-1):+.1f}%")
    print("   " + "  ".join(f"z{z}:{v/fz_need:.3f}" for z, v in prof.items()))
