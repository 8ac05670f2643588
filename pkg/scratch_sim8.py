import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench_batch
from deptwin.hydro import resistance_tensors, sedimentation

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
fz_need = -sedimentation(obj, m.rho_m, m.rho_o).F[2]
rs = resistance_tensors(obj)
drag_f, drag_t = m.mu * rs.K[0, 0], m.mu * rs.Omega[2, 2]

pose = Pose.from_xyz_yaw(-40e-6, 60e-6, 100e-6, -0.55)  # the failing run's pose
forms = assemble_forms(obj, pose, basis, m, om)
g = np.arange(0, 360, 5)
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)
for amp in [44.0, 48.0, 52.0]:
    W = eval_wrench_batch(forms, amp * np.exp(1j * np.deg2rad(ph)))
    fxy = np.hypot(W[:, 0], W[:, 1])
    ang = np.degrees(np.arctan2(W[:, 1], W[:, 0]))
    tz = W[:, 5]
    e4 = np.abs(W[:, 2] - fz_need) / fz_need
    print(f"--- {amp:.0f} V, off-center (-40,60)um, signed tz, no tilt constraint ---")
    for e4cap in [0.03, 0.08]:
        ok = e4 < e4cap
        for t0 in [-4.3e-15, 4.3e-15]:
            per_dir = []
            for th in range(0, 360, 15):
                d = np.abs((ang - th + 180) % 360 - 180)
                sel = ok & (d < 7.5) & ((tz <= t0) if t0 < 0 else (tz >= t0))
                per_dir.append(fxy[sel].max() if sel.any() else 0.0)
            per_dir = np.array(per_dir)
            print(f"  e4<{e4cap:.2f} tz{'<=' if t0<0 else '>='}{t0:+.0e}: "
                  f"worst={per_dir.min():.2e} ({per_dir.min()/drag_f*1e6:4.1f} um/s) "
                  f"median={np.median(per_dir):.2e}")
