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
drag_f = m.mu * rs.K[0, 0]
drag_t = m.mu * rs.Omega[2, 2]

pose = Pose.from_xyz_yaw(0, 0, 100e-6, 0.3)
forms = assemble_forms(obj, pose, basis, m, om)
g = np.arange(0, 360, 10)
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)
W = eval_wrench_batch(forms, 38.0 * np.exp(1j * np.deg2rad(ph)))
fxy = np.hypot(W[:, 0], W[:, 1])
ang = np.degrees(np.arctan2(W[:, 1], W[:, 0]))
tn = np.linalg.norm(W[:, 3:], axis=1)
tz = W[:, 5]
e4 = np.abs(W[:, 2] - fz_need) / fz_need

# directional worst-case cruise force at several altitude tolerances
for e4cap, tcap in [(0.02, 1e-15), (0.03, 1e-15), (0.05, 1e-15),
                    (0.03, 4.5e-15), (0.03, None)]:
    per_dir = []
    for th in range(0, 360, 15):
        d = np.abs((ang - th + 180) % 360 - 180)
        sel = (e4 < e4cap) & (d < 7.5)
        if tcap is not None:
            sel &= tn < tcap
        per_dir.append(fxy[sel].max() if sel.any() else 0.0)
    per_dir = np.array(per_dir)
    print(f"e4<{e4cap:.2f} |T|<{tcap}: Fxy per-direction min={per_dir.min():.3e} "
          f"median={np.median(per_dir):.3e}  -> v_min={per_dir.min()/drag_f*1e6:.1f} um/s")

# torque envelope while holding altitude tightly and Fxy moderate
for fcap in [2e-11, 6e-11, 1.0e-10]:
    sel = (e4 < 0.03) & (fxy < fcap)
    if sel.any():
        print(f"e4<3% Fxy<{fcap:.0e}: max Tz+={tz[sel].max():.3e} max Tz-={tz[sel].min():.3e} "
              f"-> w={tz[sel].max()/drag_t:.3f} rad/s")

# combined: cruise force + cruise torque simultaneously
for th in [0, 45]:
    d = np.abs((ang - th + 180) % 360 - 180)
    for fneed, tneed in [(8.5e-11, 3.2e-15), (1.0e-10, 3.2e-15), (8.5e-11, 4.3e-15)]:
        sel = (e4 < 0.03) & (d < 7.5) & (fxy > fneed) & (np.abs(tz) > tneed)
        print(f"dir={th} Fxy>{fneed:.1e} |Tz|>{tneed:.1e}: n={sel.sum()}")
