"""Is the mid-slog solve SA-limited or hull-limited?

Capture (forms, w_ref) at a few ticks of the hard hop, then re-solve with
bigger eval budgets and alternative schedules.  If 10x evals finds much
lower cost / stronger wrenches, the schedule is the lever; if not, the
joint hull is simply thin there.
"""
import math
import numpy as np
from dataclasses import replace
from deptwin.geometry import Pose, builtin_shape, build_object, wrap_angle
from deptwin.field import ElectrodeBasis
from deptwin.gdep import assemble_forms
from deptwin.simulator import (Simulator, SimState, quadrature_phases,
                               world_resistance)
from deptwin.controller import TargetPose, velocity_refs, reference_wrench
from deptwin.inverter import sa_solve, AnnealSchedule, ErrorTolerances

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
target = TargetPose(-126.3e-6, -76.4e-6, -0.990)
start = Pose.from_xyz_yaw(-9.6e-6, 139.5e-6, 100e-6, 1.251)

sim = Simulator(obj, shape, basis, vision_bypass=True)
sim.begin_episode(9)
state = SimState(Pose(start.p.copy(), start.R.copy()), 0.0,
                 quadrature_phases(4, sim.amplitude))
snaps = []
for k in range(1000):
    if k in (100, 300, 500, 700):
        p = state.true_pose
        est_xy = np.array([p.p[0], p.p[1]])
        yaw = p.yaw
        v_ref, om_ref = velocity_refs(est_xy, yaw, target, sim.gains, 2)
        pe = Pose.from_xyz_yaw(p.p[0], p.p[1], sim.z_assumed, yaw)
        rsw = world_resistance(sim.rs_body, pe)
        w_ref = reference_wrench(v_ref, om_ref, rsw, sim.m.mu, sim.f_sed)
        forms = assemble_forms(obj, pe, basis, sim.m, sim.omega)
        snaps.append((k, forms, w_ref))
    state, rec = sim.control_tick(state, target, k)

tol = ErrorTolerances()
mu = sim.m.mu
for k, forms, w_ref in snaps:
    frxy = math.hypot(w_ref.F[0], w_ref.F[1])
    print(f"\n-- tick {k}: |Fr_xy|={frxy:.3e}  Tr_z={w_ref.T[2]:+.3e}")
    for name, sched, trials in [
        ("2500 (prod)", AnnealSchedule(), 8),
        ("2500 fast-cool", replace(AnnealSchedule(), moves_per_temp=10), 8),
        ("25000", replace(AnnealSchedule(), max_evals=25000), 4),
    ]:
        costs, fxys, tzs = [], [], []
        for s in range(trials):
            sc = replace(sched, rng_seed=1234 + 7 * s)
            st = quadrature_phases(4, sim.amplitude)
            res = sa_solve(forms, w_ref, st, sc, tol)
            costs.append(res.cost)
            fxys.append(math.hypot(res.wrench.F[0], res.wrench.F[1]))
            tzs.append(res.wrench.T[2])
        print(f"  {name:15s} cost {np.median(costs):6.2f} "
              f"[{min(costs):6.2f},{max(costs):6.2f}]  "
              f"|Fxy| {np.median(fxys):.2e}  Tz {np.median(tzs):+.2e}")
