"""Mini waypoint suite: 12 uniform-in-disc targets, sequential captures."""
import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.simulator import Simulator, WaypointScript
from deptwin.controller import TargetPose

rng = np.random.default_rng(2024)
targets = []
while len(targets) < 12:
    x, y = rng.uniform(-150e-6, 150e-6, 2)
    if math.hypot(x, y) <= 150e-6:
        targets.append(TargetPose(float(x), float(y),
                                  float(rng.uniform(-math.pi/2, math.pi/2))))

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
sim = Simulator(obj, shape, basis, vision_bypass=True)

script = WaypointScript(targets, timeout=20.0,
                        symmetry_order=shape.symmetry_order)
log = sim.run_episode(Pose.from_xyz_yaw(0, 0, 100e-6, 0.0), script=script,
                      seed=5)
n_cap = sum(s["captured"] for s in script.stats)
print(f"outcome={log.outcome}  captured {n_cap}/{len(script.stats)}")
for s in script.stats:
    tch = (s["capture_t"] - s["issue_t"]) if s["captured"] else float("nan")
    t = targets[s["index"]]
    r = math.hypot(t.x, t.y) * 1e6
    print(f"  wp{s['index']:2d} r={r:5.1f} yaw={t.yaw:+5.2f} "
          f"captured={s['captured']} t_capture={tch:6.2f}s")
# dwell-quality stats from the log records
recs = [r for r in log.records if r.stage == "control"]
zs = [r.z for r in recs]
print(f"z range during run: {min(zs)*1e6:.1f}..{max(zs)*1e6:.1f} um")
print(f"wall {log.meta.get('wall_s', float('nan')):.1f}s "
      f"for {recs[-1].t:.0f}s sim")
