import math, time
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, direct_wrench
from deptwin.hydro import mobility_solve, world_resistance
from deptwin.simulator import (Simulator, SimState, NoiseModel, quadrature_phases,
                               WaypointScript, circle_path)
from deptwin.controller import TargetPose

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
sim = Simulator(obj, shape, basis, vision_bypass=True, noise=NoiseModel.off())

# 0) hover balance at z = 100 um under quadrature
pose = Pose.from_xyz_yaw(0, 0, 100e-6, 0.3)
u = quadrature_phases(4, 38.0).complex()
w = direct_wrench(obj, pose, basis, m, sim.omega, u)
print("F_z(quad) =", w.F[2], " F_sed =", sim.f_sed.F[2], " net =", w.F[2] + sim.f_sed.F[2])

# 1) electrorotation: 1 s of warm-up substeps
st = SimState(pose, 0.0, quadrature_phases(4, 38.0))
for _ in range(500):
    st = sim.physics_step(st, 2e-3)
drift = np.hypot(st.true_pose.p[0], st.true_pose.p[1])
dyaw = st.true_pose.yaw - pose.yaw
print(f"1 s quad: drift={drift*1e6:.4f} um  dyaw={dyaw:+.4f} rad  dz={(st.true_pose.p[2]-100e-6)*1e6:+.3f} um")
st2 = SimState(pose, 0.0, quadrature_phases(4, 38.0, reverse=True))
for _ in range(500):
    st2 = sim.physics_step(st2, 2e-3)
print(f"reversed: dyaw={st2.true_pose.yaw - pose.yaw:+.4f} rad (sign flip: {np.sign(st2.true_pose.yaw-pose.yaw) != np.sign(dyaw)})")

# 2) u = 0 sinking vs mobility oracle
st0 = SimState(pose, 0.0, quadrature_phases(4, 0.0))
v_oracle = sim.sink_velocity(st0)
st1 = sim.physics_step(st0, 2e-3)
v_obs = (st1.true_pose.p - pose.p) / 2e-3
print("sink v oracle:", v_oracle, " observed:", v_obs, " match:", np.allclose(v_obs, v_oracle, rtol=0, atol=1e-18))

# 3) dt split invariance
a = sim.physics_step(st, 2e-3)
b = sim.physics_step(sim.physics_step(st, 1e-3), 1e-3)
print("dt split |dp| =", np.linalg.norm(a.true_pose.p - b.true_pose.p), "m")

# 4) closed-loop waypoint (bypass, noise off)
tgt = TargetPose(80e-6, -50e-6, math.pi / 3)
script = WaypointScript([tgt], timeout=20.0)
w0 = time.perf_counter()
log = sim.run_episode(Pose.from_xyz_yaw(-40e-6, 60e-6, 100e-6, -0.5),
                      script, duration=30.0, seed=1)
wall = time.perf_counter() - w0
perr = log.position_error()
yerr = np.abs(log.yaw_error(shape.symmetry_order))
n = len(perr)
print(f"episode: outcome={log.outcome} ticks={len(log.records)} wall={wall:.1f}s "
      f"({wall/ (len(log.records)*0.02):.2f}x realtime)")
print("waypoint stats:", script.stats)
if script.stats and script.stats[0]["captured"]:
    cap = script.stats[0]["capture_t"]
    sw = script.stats[0]["switch_t"]
    # mean error over the dwell window (capture..switch), true pose
    t = log.column("t") - log.records[0].t - 2.0  # tau of each control tick
    iswin = (t >= cap) & (t < sw)
    print(f"capture at tau={cap:.2f}s  dwell mean pos={perr[iswin].mean()*1e6:.2f} um "
          f"yaw={yerr[iswin].mean():.4f} rad")
print(f"final err pos={perr[-1]*1e6:.2f} um yaw={yerr[-1]:.4f} rad  "
      f"z drift={(log.records[-1].z-100e-6)*1e6:+.2f} um")
solve = log.column("solve_ms")
print(f"solver: mean {solve.mean():.2f} ms  max {solve.max():.2f} ms  "
      f"evals mean {log.column('evals').mean():.0f}")

# 5) monotone capture: err strictly decreasing while in (5, 100) um band?
band = (perr[:-1] > 5e-6) & (perr[:-1] < 100e-6)
mono = np.all(perr[1:][band] < perr[:-1][band])
print("monotone in (5,100) um band:", mono)
