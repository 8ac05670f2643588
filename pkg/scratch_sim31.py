"""At a failing cell's park pose, do rotated-direction pull solves carry
right-sign Tz?

For each demand direction (rotations of the straight inward pull), run a
dual-handedness pull solve (T_ref = 0) and report the realized in-plane
force projection onto the straight direction, the realized Tz, and cost.
Premise: some rotation yields the needed repair torque sign while keeping
a decent positive projection on the straight pull.
"""
import math
import sys
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench
from deptwin.hydro import resistance_tensors, world_resistance, sedimentation
from deptwin.inverter import sa_solve, AnnealSchedule, ErrorTolerances
from deptwin.simulator import Simulator, quadrature_phases, DEFAULT_FREQUENCY
from deptwin.controller import TargetPose, reference_wrench

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
omega_f = 2.0 * math.pi * DEFAULT_FREQUENCY
rs = resistance_tensors(obj)
f_sed = sedimentation(obj, m.rho_m, m.rho_o)
tol = ErrorTolerances()

SEED = 2025
rng = np.random.default_rng(SEED)
targets = []
for _ in range(40):
    r = 150e-6 * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2.0 * math.pi)
    yaw = rng.uniform(-math.pi, math.pi)
    targets.append(TargetPose(r * math.cos(th), r * math.sin(th), yaw))

WP = int(sys.argv[1]) if len(sys.argv) > 1 else 34
YERR = float(sys.argv[2]) if len(sys.argv) > 2 else -0.15
PARK = float(sys.argv[3]) if len(sys.argv) > 3 else 6e-6
tgt = targets[WP]
r_t = math.hypot(tgt.x, tgt.y)
rhat = np.array([tgt.x / r_t, tgt.y / r_t])
print(f"wp{WP}: target r={r_t*1e6:.1f}um yaw={tgt.yaw:+.3f}  "
      f"park {PARK*1e6:.0f}um outward, yerr={YERR:+.3f}")

# park: object floated outward of the target, heading off by YERR
px, py = tgt.x + PARK * rhat[0], tgt.y + PARK * rhat[1]
phi = tgt.yaw - YERR
pose = Pose.from_xyz_yaw(px, py, 100e-6, phi)
forms = assemble_forms(obj, pose, basis, m, omega_f)
rsw = world_resistance(rs, pose)

# straight pull demand: toward the target
vhat = -rhat
mu = m.mu

sched = AnnealSchedule(max_evals=300)
rng2 = np.random.default_rng(7)
print(f"{'rot':>5} {'hand':>4} {'cost':>6} {'proj':>9} {'perp':>9} "
      f"{'Tz':>10} {'|Txy|':>9}")
for rot_deg in (0, 30, 60, 90, 120, 150, 180, -150, -120, -90, -60, -30):
    a = math.radians(rot_deg)
    c, s = math.cos(a), math.sin(a)
    d2 = np.array([c * vhat[0] - s * vhat[1], s * vhat[0] + c * vhat[1], 0.0])
    v = 20e-6 * d2
    w_ref = reference_wrench(v, np.zeros(3), rsw, mu, f_sed)
    for rev in (False, True):
        start = quadrature_phases(4, 50.0, reverse=rev)
        sc = AnnealSchedule(max_evals=300,
                            rng_seed=int(rng2.integers(1 << 31)))
        res = sa_solve(forms, w_ref, start, sc, tol)
        F, T = res.wrench.F, res.wrench.T
        # rescale to hover like the loop does
        q2 = 1.0
        if F[2] > 0.0 and w_ref.F[2] > 0.0:
            q = math.sqrt(w_ref.F[2] / F[2])
            q = min(max(q, 38.0 / 50.0), 60.0 / 50.0)
            q2 = q * q
        proj = q2 * (F[0] * vhat[0] + F[1] * vhat[1])
        perp = q2 * (-F[0] * vhat[1] + F[1] * vhat[0])
        print(f"{rot_deg:>5} {'ccw' if not rev else 'cw':>4} "
              f"{res.cost:6.2f} {proj:+9.2e} {perp:+9.2e} "
              f"{q2*T[2]:+10.2e} {q2*math.hypot(T[0], T[1]):9.2e}")
