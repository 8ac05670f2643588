"""Hold-phase replay bench: park the object near a target and run only
the hold dynamics for N seconds with the real control_tick.

Usage: scratch_sim32.py [wp] [yerr0] [seconds]
Reports yerr/d trajectory stats every second and the final tail.
"""
import math
import sys
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object, wrap_angle
from deptwin.field import ElectrodeBasis
from deptwin.simulator import Simulator, SimState, quadrature_phases
from deptwin.controller import TargetPose

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
sim = Simulator(obj, shape, basis, vision_bypass=True)

SEED = 2025
rng = np.random.default_rng(SEED)
targets = []
for _ in range(40):
    r = 150e-6 * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2.0 * math.pi)
    yaw = rng.uniform(-math.pi, math.pi)
    targets.append(TargetPose(r * math.cos(th), r * math.sin(th), yaw))

WP = int(sys.argv[1]) if len(sys.argv) > 1 else 34
Y0 = float(sys.argv[2]) if len(sys.argv) > 2 else -0.01
SECS = float(sys.argv[3]) if len(sys.argv) > 3 else 12.0
tgt = targets[WP]
r_t = math.hypot(tgt.x, tgt.y)
rhat = (tgt.x / r_t, tgt.y / r_t)

sim.begin_episode(SEED + 1 + WP)
# park 1.5 um outward of the target, heading off by Y0
pose = Pose.from_xyz_yaw(tgt.x + 1.5e-6 * rhat[0], tgt.y + 1.5e-6 * rhat[1],
                         100e-6, tgt.yaw - Y0)
state = SimState(pose, 0.0, quadrature_phases(4, sim.amplitude))
VERBOSE = SECS <= 5.0
n = int(SECS * 50)
ds, ys = [], []
for k in range(n):
    state, rec = sim.control_tick(state, tgt, k)
    d = math.hypot(rec.x - tgt.x, rec.y - tgt.y) * 1e6
    ye = wrap_angle(tgt.yaw, rec.yaw, 2)
    ds.append(d)
    ys.append(ye)
    if VERBOSE:
        if rec.evals == 1:
            mode = "OVR"
        elif abs(rec.wr[0]) < 1e-20 and abs(rec.wr[1]) < 1e-20 \
                and rec.wr[5] != 0.0:
            mode = "twi"
        elif rec.wr[5] == 0.0:
            mode = "z0T"
        else:
            mode = "jnt"
        q2 = (rec.amp / 50.0) ** 2
        ex, ey = tgt.x - rec.x, tgt.y - rec.y
        eh = math.hypot(ex, ey)
        pull = q2 * (rec.wm[0] * ex + rec.wm[1] * ey) / eh if eh else 0.0
        print(f"k={k:3d} {mode} d={d:6.2f} yerr={ye:+.4f} "
              f"tz={rec.wm[5]*q2*1e15:+7.3f}f pull={pull*1e12:+8.2f}p "
              f"cost={rec.cost:6.1f}")
    if (k + 1) % 50 == 0:
        w = slice(k - 49, k + 1)
        print(f"t={rec.t:5.1f}s  d={np.mean(ds[w]):5.2f}um "
              f"(max {np.max(ds[w]):5.2f})  yerr={np.mean(ys[w]):+.4f} "
              f"(|max| {np.max(np.abs(ys[w])):.4f})  z={rec.z*1e6:6.2f}")
tail = slice(max(0, n - 150), n)
ok = np.mean(ds[tail]) <= 15 and np.mean(np.abs(ys[tail])) <= 0.03
print(f"TAIL3s: d_mean={np.mean(ds[tail]):5.2f}um  "
      f"|yerr|_mean={np.mean(np.abs(ys[tail])):.4f}  "
      f"pass={'YES' if ok else 'no'}")
