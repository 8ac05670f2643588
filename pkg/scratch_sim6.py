import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.simulator import Simulator, SimState, NoiseModel, quadrature_phases
from deptwin.controller import ControlGains, TargetPose, velocity_refs

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()

tgt = TargetPose(80e-6, -50e-6, math.pi / 3)
for vmax in [5e-6, 8e-6]:
    g = ControlGains(v_max=vmax)
    v, om = velocity_refs(np.array([-40e-6, 60e-6]), -0.5, tgt, g, 2)
    print(f"v_max={vmax*1e6} -> v_ref={np.hypot(v[0],v[1])*1e6:.2f} um/s  wz={om[2]:+.3f}")

g = ControlGains(v_max=6.5e-6)
sim = Simulator(obj, shape, basis, gains=g, vision_bypass=True, noise=NoiseModel.off())
st = SimState(Pose.from_xyz_yaw(-40e-6, 60e-6, 100e-6, -0.5), 0.0, quadrature_phases(4))
# warm-up by hand: 100 ticks quadrature
for k in range(100):
    st, rec = sim._warmup_tick(st, k)
    if k % 25 == 0:
        print(f"warm k={k} z={rec.z*1e6:.1f} yaw={rec.yaw:+.2f}")
print(f"after warmup: z={st.true_pose.p[2]*1e6:.1f}")
from deptwin.inverter import PhasorVector
st = SimState(st.true_pose, st.time,
              PhasorVector(st.applied_phases.phases_deg, sim.amplitude))
from deptwin.gdep import direct_wrench
for k in range(60):
    p0 = st.true_pose.p.copy()
    st, rec = sim.control_tick(st, tgt, k)
    if k % 6 == 0:
        fr = math.hypot(rec.wr[0], rec.wr[1])
        fm = math.hypot(rec.wm[0], rec.wm[1])
        wt = direct_wrench(obj, st.true_pose, basis, sim.m, sim.omega,
                           st.applied_phases.complex())
        dxy = (st.true_pose.p - p0)[:2]
        to_t = np.array([tgt.x, tgt.y]) - p0[:2]
        prog = float(dxy @ to_t / np.linalg.norm(to_t)) / 0.02 * 1e6
        print(f"k={k:3d} z={rec.z*1e6:6.1f} perr={math.hypot(rec.x-tgt.x, rec.y-tgt.y)*1e6:6.1f} "
              f"Fm_xy={fm:.2e} Ftrue_xy={math.hypot(wt.F[0],wt.F[1]):.2e} "
              f"Ftrue_z={wt.F[2]:.2e} prog={prog:+5.1f}um/s "
              f"e=({rec.e1:.0f},{rec.e2:.0f},{rec.e3:.0f},{rec.e4:.0f}) c={rec.cost:.1f}")
