"""Lever test on the hardest observed hop (rim-to-rim, +0.90 yaw flip)."""
import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object, wrap_angle
from deptwin.field import ElectrodeBasis
from deptwin.simulator import Simulator, SimState, quadrature_phases
from deptwin.controller import TargetPose, ControlGains
from dataclasses import replace

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()

target = TargetPose(-126.3e-6, -76.4e-6, -0.990)
start = Pose.from_xyz_yaw(-9.6e-6, 139.5e-6, 100e-6, 1.251)

cases = [
    ("baseline (v 20)", dict()),
    ("v_max 25", dict(gains=ControlGains(v_max=25e-6))),
    ("v_max 28", dict(gains=ControlGains(v_max=28e-6))),
    ("v_max 30", dict(gains=ControlGains(v_max=30e-6))),
    ("v_max 28, k_v 4", dict(gains=ControlGains(v_max=28e-6, k_v=4.0))),
    ("v_max 28, cap 70", dict(gains=ControlGains(v_max=28e-6),
                              amp_max=70.0)),
]
for name, kw in cases:
    sim = Simulator(obj, shape, basis, vision_bypass=True, **kw)
    sim.begin_episode(9)
    state = SimState(Pose(start.p.copy(), start.R.copy()), 0.0,
                     quadrature_phases(4, sim.amplitude))
    t_below = None
    for k in range(1000):
        state, rec = sim.control_tick(state, target, k)
        d = math.hypot(rec.x - target.x, rec.y - target.y)
        yerr = abs(wrap_angle(target.yaw, rec.yaw, 2))
        if d < 20e-6 and yerr < math.pi / 16:
            t_below = (k + 1) * 0.02
            break
    d_end = math.hypot(rec.x - target.x, rec.y - target.y) * 1e6
    yerr_end = wrap_angle(target.yaw, rec.yaw, 2)
    res = (f"below at {t_below:5.2f}s" if t_below is not None
           else f"MISS (d={d_end:5.1f}um yerr={yerr_end:+.3f})")
    print(f"{name:28s}: {res}")
