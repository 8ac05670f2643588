import math
import numpy as np
from dataclasses import replace
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench
from deptwin.hydro import resistance_tensors, world_resistance, sedimentation
from deptwin.controller import reference_wrench
from deptwin.inverter import PhasorVector, AnnealSchedule, ErrorTolerances, sa_solve
from deptwin.simulator import quadrature_phases

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
rs = resistance_tensors(obj)
f_sed = sedimentation(obj, m.rho_m, m.rho_o)
sched = AnnealSchedule()
tol = ErrorTolerances()

AMP = 50.0
V_CMD = 18e-6  # m/s commanded
rng = np.random.default_rng(11)

print(f"sa_solve cruise extraction at {AMP} V, v_cmd={V_CMD*1e6:.0f} um/s, 16 seeds x 4 dirs")
for r, ang in [(0, 0), (75, 20), (120, 40), (150, 10)]:
    th = math.radians(ang)
    pose = Pose.from_xyz_yaw(r * 1e-6 * math.cos(th), r * 1e-6 * math.sin(th), 100e-6, -0.55)
    forms = assemble_forms(obj, pose, basis, m, om)
    rsw = world_resistance(rs, pose)
    speed, misaim, tzs, fzerr, costs = [], [], [], [], []
    for d in np.deg2rad([0, 90, 180, 270]):
        v_ref = np.array([V_CMD * math.cos(d), V_CMD * math.sin(d), 0.0])
        w_ref = reference_wrench(v_ref, np.zeros(3), rsw, m.mu, f_sed)
        for _ in range(16):
            s = replace(sched, rng_seed=int(rng.integers(1 << 31)))
            res = sa_solve(forms, w_ref, quadrature_phases(4, AMP), s, tol)
            W = res.wrench
            # post-solve amplitude rescale: exact Fz match, clamped
            if W.F[2] > 0:
                q = min(max(math.sqrt(w_ref.F[2] / W.F[2]), 38.0 / AMP), 60.0 / AMP)
                from deptwin.hydro import Wrench
                W = Wrench(W.F * q * q, W.T * q * q)
            fxy = math.hypot(W.F[0], W.F[1])
            along = W.F[0] * math.cos(d) + W.F[1] * math.sin(d)
            speed.append(along / 8.492e-6 * 1e6)
            misaim.append(math.degrees(math.atan2(math.hypot(*(W.F[:2] - along * np.array([math.cos(d), math.sin(d)]))), along)) if fxy > 0 else 90)
            tzs.append(W.T[2])
            fzerr.append((W.F[2] - (-f_sed.F[2])) / (-f_sed.F[2]))
            costs.append(res.error.cost)
    speed = np.array(speed)
    print(
        f"r={r:3d}: v_along p10/p50/p90 = {np.percentile(speed,10):5.1f}/{np.percentile(speed,50):5.1f}/{np.percentile(speed,90):5.1f} um/s"
        f"  |Tz| p90={np.percentile(np.abs(tzs),90):.1e}  fz_err p90={np.percentile(np.abs(fzerr),90)*100:4.1f}%  cost p50={np.median(costs):.2f}"
    )
