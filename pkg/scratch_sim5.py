import math, time
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.simulator import Simulator, NoiseModel, WaypointScript
from deptwin.controller import ControlGains, TargetPose

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()

for vmax in [5e-6, 6.5e-6, 8e-6]:
    g = ControlGains(v_max=vmax)
    sim = Simulator(obj, shape, basis, gains=g, vision_bypass=True,
                    noise=NoiseModel.off())
    tgt = TargetPose(80e-6, -50e-6, math.pi / 3)  # 140.7 um hop, yaw flip 1.55 rad
    script = WaypointScript([tgt], timeout=25.0)
    log = sim.run_episode(Pose.from_xyz_yaw(-40e-6, 60e-6, 100e-6, -0.5),
                          script, duration=30.0, seed=1)
    perr = log.position_error()
    yerr = np.abs(log.yaw_error(shape.symmetry_order))
    z = log.column("z")
    t = log.column("t") - 2.0
    reach = np.where((perr < 20e-6) & (yerr < math.pi / 16))[0]
    t_reach = t[reach[0]] if len(reach) else None
    cost = log.column("cost")
    print(f"v_max={vmax*1e6:.1f}um/s: reach={t_reach}, z[min,max]=({z.min()*1e6:.1f},{z.max()*1e6:.1f})um "
          f"final perr={perr[-1]*1e6:.1f}um yerr={yerr[-1]:.3f} cost(med)={np.median(cost):.2f} "
          f"e4(med)={np.median(log.column('e4')):.1f}%")
