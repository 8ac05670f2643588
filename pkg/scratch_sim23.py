"""Dry-run of the 40-waypoint convergence suite, per-episode protocol.

Each waypoint is its own seeded episode: warm up at center, issue the
goal, 20 s reach limit, 3 s hold, grade last-3-s means.
"""
import math
import time
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
n_wp = 40
targets = []
for _ in range(n_wp):
    r = 150e-6 * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2.0 * math.pi)
    yaw = rng.uniform(-math.pi, math.pi)
    targets.append(TargetPose(r * math.cos(th), r * math.sin(th), yaw))

t_start = time.perf_counter()
passes = 0
rows = []
for i, tgt in enumerate(targets):
    sim.begin_episode(SEED + 1 + i)
    state = SimState(Pose.from_xyz_yaw(0.0, 0.0, 100e-6, 0.0), 0.0,
                     quadrature_phases(4, sim.warmup_amplitude))
    # warmup: 2 s hover at the plain drive
    for k in range(100):
        state, _ = sim._warmup_tick(state, k)
    entry = None
    tail = []  # (d, |yerr|) over the last 3 s
    n_ticks = int(23.0 / sim.tick_dt)
    for k in range(n_ticks):
        state, rec = sim.control_tick(state, tgt, k)
        d = math.hypot(rec.x - tgt.x, rec.y - tgt.y)
        ye = abs(wrap_angle(tgt.yaw, rec.yaw, 2))
        tau = (k + 1) * sim.tick_dt
        if entry is None and d < 20e-6 and ye < math.pi / 16:
            entry = tau
        if tau > 20.0:
            tail.append((d, ye))
        zc = state.true_pose.p[2]
    d_mean = float(np.mean([a for a, _ in tail]))
    y_mean = float(np.mean([b for _, b in tail]))
    ok = (entry is not None and entry <= 20.0
          and d_mean <= 15e-6 and y_mean <= 0.03)
    passes += ok
    r_t = math.hypot(tgt.x, tgt.y) * 1e6
    rows.append((i, r_t, entry, d_mean * 1e6, y_mean, ok))
    flag = "ok " if ok else "MISS"
    et = f"{entry:5.2f}" if entry is not None else "  -- "
    print(f"wp{i:02d} r={r_t:5.1f} yaw={tgt.yaw:+5.2f} entry={et}s "
          f"tail d={d_mean*1e6:5.2f}um y={y_mean:.4f} z={zc*1e6:5.1f} {flag}")

wall = time.perf_counter() - t_start
print(f"\npasses: {passes}/{n_wp} (need >= 38)   wall {wall:.0f}s "
      f"(sim {n_wp * 25.0:.0f}s -> {n_wp * 25.0 / wall:.1f}x realtime)")
