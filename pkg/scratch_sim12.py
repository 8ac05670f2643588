import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench_batch
from deptwin.hydro import sedimentation

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
fz_need = -sedimentation(obj, m.rho_m, m.rho_o).F[2]

g = np.arange(0, 360, 5)
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)
E = np.exp(1j * np.deg2rad(ph))

dirs = np.deg2rad(np.arange(0, 360, 15))
print("cruise stratum: {e4<5%, |Tz|<1e-15, |T|3D < min(|T|3D)+3e-15}: worst-dir max Fxy")
for amp in [50.0]:
    for r, ang in [(0, 0), (75, 20), (120, 40), (150, 10)]:
        th = math.radians(ang)
        pose = Pose.from_xyz_yaw(r * 1e-6 * math.cos(th), r * 1e-6 * math.sin(th), 100e-6, -0.55)
        forms = assemble_forms(obj, pose, basis, m, om)
        W = eval_wrench_batch(forms, amp * E)
        tmag = np.linalg.norm(W[:, 3:6], axis=1)
        band = np.abs(W[:, 2] - fz_need) / fz_need < 0.05
        tfloor = tmag[band].min() if band.any() else np.nan
        ok = band & (np.abs(W[:, 5]) < 1e-15) & (tmag < tfloor + 3e-15)
        if not ok.any():
            print(f"amp={amp:.0f} r={r:3d}: EMPTY (tilt floor {tfloor:.2e})")
            continue
        fx, fy = W[ok, 0], W[ok, 1]
        per_dir = [np.maximum(fx * math.cos(d) + fy * math.sin(d), 0.0).max() for d in dirs]
        v = 1e6 / 8.492e-6
        print(
            f"amp={amp:.0f} r={r:3d} n={ok.sum():6d} tiltfloor={tfloor:.1e}  "
            f"worst-dir {min(per_dir):.2e} ({min(per_dir)*v:4.1f} um/s)  "
            f"median {np.median(per_dir):.2e} ({np.median(per_dir)*v:4.1f} um/s)"
        )
