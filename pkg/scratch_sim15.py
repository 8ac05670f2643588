"""Probe: is the stall region position- or yaw-dependent?

For several (position, yaw) cells, run sa_solve from fresh quadrature
starts with the same reference the controller would build (v_ref toward
the hop target at v_max, omega_ref = 0), apply the vertical rescale, and
report the delivered in-plane force along the commanded direction.
"""
import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms
from deptwin.hydro import (resistance_tensors, world_resistance,
                           sedimentation, mobility_solve, Wrench)
from deptwin.inverter import (AnnealSchedule, ErrorTolerances, PhasorVector,
                              sa_solve)
from deptwin.controller import reference_wrench
from deptwin.simulator import quadrature_phases

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
omega = 2 * math.pi * 300e3
rs = resistance_tensors(obj)
f_sed = sedimentation(obj, m.rho_m, m.rho_o)
AMP = 50.0
V_CMD = 20e-6
DIR = np.array([0.737, -0.676, 0.0])
DIR /= np.linalg.norm(DIR)

cells = [
    ("stall pos, yaw pi/3", 43e-6, -16e-6, math.pi / 3),
    ("stall pos, yaw 0   ", 43e-6, -16e-6, 0.0),
    ("center,    yaw pi/3", 0.0, 0.0, math.pi / 3),
    ("center,    yaw 0   ", 0.0, 0.0, 0.0),
    ("mirror,    yaw pi/3", -43e-6, 16e-6, math.pi / 3),
    ("r=46 on x, yaw pi/3", 46e-6, 0.0, math.pi / 3),
]

rng = np.random.default_rng(7)
for name, x, y, yaw in cells:
    pose = Pose.from_xyz_yaw(x, y, 100e-6, yaw)
    rsw = world_resistance(rs, pose)
    w_ref = reference_wrench(V_CMD * DIR, np.zeros(3), rsw, m.mu, f_sed)
    forms = assemble_forms(obj, pose, basis, m, omega)
    v_alongs, fxys, costs = [], [], []
    for s in range(8):
        sched = AnnealSchedule(rng_seed=int(rng.integers(1 << 31)))
        start = quadrature_phases(4, AMP)
        res = sa_solve(forms, w_ref, start, sched, ErrorTolerances())
        wmod = res.wrench
        fz = float(wmod.F[2])
        q = 1.0
        if fz > 0 and w_ref.F[2] > 0:
            q = math.sqrt(w_ref.F[2] / fz)
            q = min(max(q, 38.0 / AMP), 60.0 / AMP)
        F = wmod.F * q * q
        v, om = mobility_solve(rsw, m.mu,
                               Wrench(F + f_sed.F, wmod.T * q * q + f_sed.T))
        v_alongs.append(float(v[:2] @ DIR[:2]) * 1e6)
        fxys.append(math.hypot(F[0], F[1]))
        costs.append(res.error.cost)
    va = np.array(v_alongs)
    print(f"{name}: v_along p10/p50/p90 = {np.percentile(va,10):6.2f}/"
          f"{np.percentile(va,50):6.2f}/{np.percentile(va,90):6.2f} um/s"
          f"   |Fxy| med {np.median(fxys):.2e}  cost med {np.median(costs):.2f}")
