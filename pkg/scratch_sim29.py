"""Pareto structure of z0T-reference states at the wp19 float ring.

For several float directions: enumerate the 45-degree grid (gauge-fixed,
8^3 = 512 states) and 20k random 1-degree states at 38 V, grade against
the zero-torque pull reference, and report whether near-optimal states
with negative parasitic Tz exist.
"""
import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import assemble_forms, MaterialProperties, eval_wrench
from deptwin.simulator import world_resistance
from deptwin.controller import TargetPose, reference_wrench
from deptwin.inverter import PhasorVector, error_vector, ErrorTolerances
from deptwin.hydro import resistance_tensors, sedimentation

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
rs_body = resistance_tensors(obj)
f_sed = sedimentation(obj, m.rho_m, m.rho_o)
tol = ErrorTolerances()

tgt = TargetPose(133.1e-6, -61.5e-6, 0.863)
rng = np.random.default_rng(7)

for ang in (0.0, 0.785, 1.57, 2.36, 3.14, 3.93, 4.71, 5.50):
    px = tgt.x + 12e-6 * math.cos(ang)
    py = tgt.y + 12e-6 * math.sin(ang)
    pose = Pose.from_xyz_yaw(px, py, 100e-6, tgt.yaw)
    rsw = world_resistance(rs_body, pose)
    # pull straight at the goal, spec-default gain, saturated
    v = np.array([tgt.x - px, tgt.y - py, 0.0]) * 50.0
    w_ref = reference_wrench(v, np.zeros(3), rsw, m.mu, f_sed)
    forms = assemble_forms(obj, pose, basis, m, om)

    rows = []
    grid = np.arange(0, 360, 45)
    for p1 in grid:
        for p2 in grid:
            for p3 in grid:
                u = PhasorVector((0, p1, p2, p3), 38.0)
                w = eval_wrench(forms, u.complex())
                e = error_vector(w.F, w.T, w_ref.F, w_ref.T, tol)
                rows.append((e.cost, w.T[2], w.F[0], w.F[1]))
    ph = rng.integers(0, 360, size=(20000, 3))
    for k in range(20000):
        u = PhasorVector((0, int(ph[k, 0]), int(ph[k, 1]), int(ph[k, 2])),
                         38.0)
        w = eval_wrench(forms, u.complex())
        e = error_vector(w.F, w.T, w_ref.F, w_ref.T, tol)
        rows.append((e.cost, w.T[2], w.F[0], w.F[1]))
    rows.sort(key=lambda r: r[0])
    best = rows[0][0]
    b = rows[0]
    line = (f"ang={ang:4.2f} best={best:5.2f} Tz@best={b[1]:+.2e} "
            f"pull@best={math.hypot(b[2], b[3])*1e10:4.1f} |")
    for prem in (1.0, 2.0, 3.0, 5.0):
        near = [r for r in rows if r[0] <= best + prem]
        lo = min(near, key=lambda r: abs(r[1]))
        neg = [r for r in near if r[1] < -3e-16]
        line += (f" +{prem:.0f}: min|Tz| {abs(lo[1]):.1e}"
                 f"(pull {math.hypot(lo[2], lo[3])*1e10:4.1f})"
                 f" neg {len(neg):3d} |")
    print(line)
