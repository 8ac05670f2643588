"""Schedule-shape bench on the wp19 hold-cell landscape.

From the sign-matched (reversed) start, how reliably does a 1250-eval
chain keep the demanded torque sign and reach the low-cost state, as a
function of acceptance temperature and moves-per-level?
"""
import math
import numpy as np
from dataclasses import replace
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import assemble_forms
from deptwin.simulator import quadrature_phases, world_resistance
from deptwin.controller import TargetPose, velocity_refs, reference_wrench
from deptwin.inverter import sa_solve, AnnealSchedule, ErrorTolerances
from deptwin.hydro import resistance_tensors
from deptwin.gdep import MaterialProperties
from deptwin.geometry import builtin_shape

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
rs_body = resistance_tensors(obj)
from deptwin.hydro import sedimentation
f_sed = sedimentation(obj, m.rho_m, m.rho_o)

# hold cell: object ~1.5 um from the wp19 goal, heading a hair off
tgt = TargetPose(133.1e-6, -61.5e-6, 0.863)
pose = Pose.from_xyz_yaw(132.0e-6, -62.0e-6, 100e-6, 0.863 + 0.011)
gains_v, gains_w = velocity_refs(
    np.array([pose.p[0], pose.p[1]]), pose.yaw, tgt,
    __import__("deptwin.controller", fromlist=["ControlGains"]).ControlGains(),
    2)
rsw = world_resistance(rs_body, pose)
w_ref = reference_wrench(gains_v, gains_w, rsw, m.mu, f_sed)
print(f"w_ref F=({w_ref.F[0]:+.2e},{w_ref.F[1]:+.2e},{w_ref.F[2]:+.2e}) "
      f"Tz={w_ref.T[2]:+.2e}")
forms = assemble_forms(obj, pose, basis, m, om)
tol = ErrorTolerances()
start = quadrature_phases(4, 50.0, reverse=True)

rows = []
for at in (0.8, 0.5, 0.3, 0.15, 0.05):
    for mpt in (10, 20, 40):
        sc0 = AnnealSchedule(accept_target=at, moves_per_temp=mpt,
                             max_evals=1250)
        costs, signs = [], 0
        for s in range(60):
            res = sa_solve(forms, w_ref, start,
                           replace(sc0, rng_seed=500 + 11 * s), tol)
            costs.append(res.cost)
            signs += res.wrench.T[2] < -1e-15
        med = float(np.median(costs))
        p15 = float(np.mean([c < 15.0 for c in costs]))
        print(f"at={at:4.2f} mpt={mpt:2d}: med {med:6.2f} "
              f"p(cost<15) {p15:4.2f} p(Tz<-1e-15) {signs / 60:4.2f}")
