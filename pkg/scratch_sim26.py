"""Per-tick ground truth on the wp19 hold: what does each mode really do?

Prints every tick from capture onward: true yaw increment, model torque,
mode flags.  Separates the model's claimed Tz from the plant's realized
rotation so the duty-cycle design rests on real rates.
"""
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
tgt = targets[19]

sim.begin_episode(SEED + 1 + 19)
state = SimState(Pose.from_xyz_yaw(0.0, 0.0, 100e-6, 0.0), 0.0,
                 quadrature_phases(4, sim.warmup_amplitude))
for k in range(100):
    state, _ = sim._warmup_tick(state, k)
rows = []
prev = None
for k in range(1050):
    latch_before = sim._hold_latch
    state, rec = sim.control_tick(state, tgt, k)
    yaw_after = state.true_pose.yaw
    if prev is not None and 570 <= k < 800:
        d = math.hypot(rec.x - tgt.x, rec.y - tgt.y) * 1e6
        ye = wrap_angle(tgt.yaw, rec.yaw, 2)
        dyaw = wrap_angle(yaw_after, prev, 1)
        mode = "OVR" if (latch_before or sim._hold_latch) and k % 2 == 0 \
            and latch_before else ("sa+" if sim._hold_latch else "sa ")
        print(f"k={k:4d} t={rec.t:6.2f} d={d:5.2f} yerr={ye:+.4f} "
              f"dyaw={dyaw:+.5f} Tz_mod={rec.wm[5]:+.2e} "
              f"e1={rec.e1:4.1f} amp={rec.amp:4.1f} {mode}")
    prev = yaw_after
