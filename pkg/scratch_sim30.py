"""Reference-shape bench at the wp19 float ring.

Compares hold-tick reference policies by realized leak (Tz) and pull
(F projected on the goal direction), using the live dual-chain solve.
"""
import math
import numpy as np
from dataclasses import replace
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import assemble_forms, MaterialProperties
from deptwin.simulator import quadrature_phases, world_resistance
from deptwin.controller import TargetPose, reference_wrench
from deptwin.inverter import sa_solve, AnnealSchedule, ErrorTolerances
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
half = AnnealSchedule(max_evals=1250)

# yerr < 0 at the ratchet: the wanted twist is -z.
POLICIES = [("bang 0.10", 0.10), ("zeroT    ", 0.0),
            ("eps 0.006", 0.006), ("eps 0.012", 0.012)]

for name, whold in POLICIES:
    leaks, pulls, costs = [], [], []
    for ang in (0.0, 0.785, 1.57, 2.36, 3.14, 3.93, 4.71, 5.50):
        px = tgt.x + 6e-6 * math.cos(ang)
        py = tgt.y + 6e-6 * math.sin(ang)
        pose = Pose.from_xyz_yaw(px, py, 100e-6, tgt.yaw)
        rsw = world_resistance(rs_body, pose)
        dhat = np.array([tgt.x - px, tgt.y - py, 0.0])
        dhat /= np.linalg.norm(dhat)
        v = np.array([tgt.x - px, tgt.y - py, 0.0]) * 50.0
        w_ref = reference_wrench(v, np.array([0.0, 0.0, -whold]), rsw,
                                 m.mu, f_sed)
        forms = assemble_forms(obj, pose, basis, m, om)
        for s in range(6):
            best = None
            for rev in (False, True):
                start = quadrature_phases(4, 50.0, reverse=rev)
                res = sa_solve(forms, w_ref, start,
                               replace(half, rng_seed=101 * s + int(rev)),
                               tol)
                if best is None or res.cost < best.cost:
                    best = res
            q2 = min(max(w_ref.F[2] / best.wrench.F[2], 0.76 ** 2), 1.44)
            leaks.append(best.wrench.T[2] * q2)
            pulls.append(float(np.dot(best.wrench.F, dhat)) * q2)
            costs.append(best.cost)
    leaks = np.array(leaks); pulls = np.array(pulls)
    print(f"{name}: leak med {np.median(leaks):+.2e} "
          f"[p10 {np.percentile(leaks,10):+.2e} p90 "
          f"{np.percentile(leaks,90):+.2e}] "
          f"pull med {np.median(pulls)*1e10:5.2f} "
          f"p10 {np.percentile(pulls,10)*1e10:5.2f} "
          f"cost med {np.median(costs):5.1f}")
