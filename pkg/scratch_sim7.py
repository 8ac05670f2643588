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

pose = Pose.from_xyz_yaw(0, 0, 100e-6, 0.3)
forms = assemble_forms(obj, pose, basis, m, om)
g = np.arange(0, 360, 5)  # 5-degree grid: 373k states
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)

for amp in [38.0, 44.0, 48.0]:
    W = eval_wrench_batch(forms, amp * np.exp(1j * np.deg2rad(ph)))
    fxy = np.hypot(W[:, 0], W[:, 1])
    ang = np.degrees(np.arctan2(W[:, 1], W[:, 0]))
    tz = np.abs(W[:, 5])
    e4 = np.abs(W[:, 2] - fz_need) / fz_need
    ok = e4 < 0.03
    print(f"--- amplitude {amp} V (e4<3%) ---")
    for t0 in [0.0, 1.5e-15, 2.5e-15, 4e-15]:
        # worst over direction: max Fxy with |Tz|>=t0 available in every 15-deg sector
        per_dir = []
        for th in range(0, 360, 15):
            d = np.abs((ang - th + 180) % 360 - 180)
            sel = ok & (d < 7.5) & (tz >= t0)
            per_dir.append(fxy[sel].max() if sel.any() else 0.0)
        lo = min(per_dir)
        print(f"  |Tz|>={t0:.1e}: worst-dir max Fxy={lo:.2e} -> v={lo/drag_f*1e6:5.1f} um/s "
              f"(w={t0/drag_t:.3f} rad/s)")
