import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties
from deptwin.simulator import Simulator, SimState, quadrature_phases
from deptwin.controller import TargetPose

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
sim = Simulator(obj, shape, basis, vision_bypass=True)
sim.begin_episode(3)

target = TargetPose(80e-6, -50e-6, math.pi / 3)
state = SimState(Pose.from_xyz_yaw(-40e-6, 60e-6, 100e-6, -0.5), 0.0,
                 quadrature_phases(4, 38.0))
# warm-up
for _ in range(100):
    state, _ = sim._warmup_tick(state, 0)
state = SimState(state.true_pose, state.time,
                 quadrature_phases(4, sim.amplitude))
print("tick   d_err(um)  v_prog  amp    cost   e1    e2    e3    e4   |Fxy_mod|  Tz_mod")
prev_d = None
for k in range(600):
    state, rec = sim.control_tick(state, target, k)
    d = math.hypot(rec.x - target.x, rec.y - target.y) * 1e6
    if k % 20 == 0:
        vp = 0.0 if prev_d is None else (prev_d - d) / (20 * 0.02)
        fxy = math.hypot(rec.wm[0], rec.wm[1])
        print(
            f"{k:4d}  {d:9.2f}  {vp:6.2f}  {rec.amp:5.1f}  {rec.cost:6.2f}"
            f"  {rec.e1:5.1f} {rec.e2:6.1f} {rec.e3:5.1f} {rec.e4:5.1f}"
            f"  {fxy:.2e}  {rec.wm[5]:+.1e}"
        )
        prev_d = d
    if d < 2.0:
        print(f"captured at tick {k} ({state.time:.2f}s)")
        break
print(f"final z = {state.true_pose.p[2]*1e6:.1f} um")
