"""Torque-only (v_ref = 0) solve reliability at the wp19 hold cell."""
import math
import numpy as np
from dataclasses import replace
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import assemble_forms, MaterialProperties
from deptwin.simulator import quadrature_phases, world_resistance
from deptwin.controller import (ControlGains, TargetPose, velocity_refs,
                                reference_wrench)
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
mu = m.mu

tgt = TargetPose(133.1e-6, -61.5e-6, 0.863)
half = AnnealSchedule(max_evals=1250)

for omega_cmd in (-0.1, -0.18, 0.1):
    for dyaw in (0.0053, 0.03):
        pose = Pose.from_xyz_yaw(tgt.x + 2e-6, tgt.y, 100e-6,
                                 tgt.yaw + math.copysign(dyaw, -omega_cmd))
        rsw = world_resistance(rs_body, pose)
        w_ref = reference_wrench(np.zeros(3),
                                 np.array([0.0, 0.0, omega_cmd]),
                                 rsw, mu, f_sed)
        forms = assemble_forms(obj, pose, basis, m, om)
        tzs, fxys, costs = [], [], []
        for s in range(24):
            best = None
            for rev in (False, True):
                start = quadrature_phases(4, 50.0, reverse=rev)
                res = sa_solve(forms, w_ref, start,
                               replace(half, rng_seed=31 * s + int(rev)),
                               tol)
                if best is None or res.cost < best.cost:
                    best = res
            q2 = min(max(w_ref.F[2] / best.wrench.F[2], 0.76 ** 2), 1.2 ** 2)
            tzs.append(best.wrench.T[2] * q2)
            fxys.append(math.hypot(best.wrench.F[0], best.wrench.F[1]) * q2)
            costs.append(best.cost)
        tzs = np.array(tzs)
        ok = np.mean(np.sign(tzs) == np.sign(omega_cmd))
        print(f"w={omega_cmd:+.2f} dyaw={dyaw:.4f}: med Tz {np.median(tzs):+.2e} "
              f"sign-ok {ok:4.2f}  med |Fxy| {np.median(fxys):.2e} "
              f"med cost {np.median(costs):5.1f}")
