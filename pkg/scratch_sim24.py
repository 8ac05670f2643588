"""Trace the wp19 hold-phase yaw ratchet (r=146.6, yaw +0.86)."""
import math
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
import sys
tgt = targets[int(sys.argv[1]) if len(sys.argv) > 1 else 19]
print(f"target x={tgt.x*1e6:.1f} y={tgt.y*1e6:.1f} yaw={tgt.yaw:+.3f}")

WP = int(sys.argv[1]) if len(sys.argv) > 1 else 19
sim.begin_episode(SEED + 1 + WP)
state = SimState(Pose.from_xyz_yaw(0.0, 0.0, 100e-6, 0.0), 0.0,
                 quadrature_phases(4, sim.warmup_amplitude))
for k in range(100):
    state, _ = sim._warmup_tick(state, k)
prev_yaw = None
for k in range(1150):
    state, rec = sim.control_tick(state, tgt, k)
    if 400 <= k < 1150 and k % 2 == 0:
        d = math.hypot(rec.x - tgt.x, rec.y - tgt.y) * 1e6
        ye = wrap_angle(tgt.yaw, rec.yaw, 2)
        tz_mod = rec.wm[5]
        if rec.evals == 1:
            mode = "OVR"
        elif abs(rec.wr[0]) < 1e-20 and abs(rec.wr[1]) < 1e-20 and rec.wr[5] != 0.0:
            mode = "twi"
        elif rec.wr[5] == 0.0:
            mode = "z0T"
        else:
            mode = "jnt"
        print(f"t={rec.t:6.2f} d={d:6.2f} z={rec.z*1e6:6.2f} "
              f"yerr={ye:+.4f} Trz={rec.wr[5]:+.2e} Tz={tz_mod:+.2e} "
              f"e1={rec.e1:5.1f} e2={rec.e2:5.1f} cost={rec.cost:5.2f} "
              f"amp={rec.amp:4.1f} {mode}")
