import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis, FOUR_PI
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench_batch
from deptwin.hydro import sedimentation

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
fz_need = -sedimentation(obj, m.rho_m, m.rho_o).F[2]


def wedge_basis(tip_radius, src_z, half_arc_deg=35.0, n_src=3, surface_offset=5e-6):
    sources, weights, scales = [], [], []
    up = np.array([0.0, 0.0, surface_offset])
    for i in range(4):
        ang0 = 2.0 * np.pi * i / 4
        angs = ang0 + np.deg2rad(np.linspace(-half_arc_deg, half_arc_deg, n_src))
        pts = np.stack(
            [tip_radius * np.cos(angs), tip_radius * np.sin(angs), np.full(n_src, src_z)],
            axis=1,
        )
        w = np.ones(n_src)
        probe = pts + up
        d = np.linalg.norm(probe[:, None, :] - pts[None, :, :], axis=-1)
        pot = (w[None, :] / (FOUR_PI * d)).sum(axis=1)
        sources.append(pts)
        weights.append(w)
        scales.append(1.0 / pot.mean())
    return ElectrodeBasis(sources, weights, np.array(scales), clearance=5e-6)


g = np.arange(0, 360, 5)
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)
E = np.exp(1j * np.deg2rad(ph))

rng = np.random.default_rng(7)
DIRS = rng.standard_normal((4, 1500))
DIRS /= np.linalg.norm(DIRS, axis=0)
DIRS = DIRS.astype(np.float32)

SC = np.array([5e-11, 5e-11, 2e-15, 0.10 * fz_need])


def hull_margin(basis, r_um, ang_deg, yaw=-0.55, z=100e-6):
    th = math.radians(ang_deg)
    pose = Pose.from_xyz_yaw(r_um * 1e-6 * math.cos(th), r_um * 1e-6 * math.sin(th), z, yaw)
    forms = assemble_forms(obj, pose, basis, m, om)
    W = eval_wrench_batch(forms, 44.0 * E)
    fz = W[:, 2]
    keep = fz > fz_need * 0.05
    s = fz_need / fz[keep]
    ux, uy = math.cos(th), math.sin(th)
    X = np.stack(
        [
            (W[keep, 0] * ux + W[keep, 1] * uy) * s / SC[0],
            (-W[keep, 0] * uy + W[keep, 1] * ux) * s / SC[1],
            W[keep, 5] * s / SC[2],
            np.zeros(keep.sum()),
        ],
        axis=1,
    )
    reps = []
    for q2 in (0.9, 1.0, 1.1):
        Y = X * q2
        Y[:, 3] = (q2 - 1.0) * fz_need / SC[3]
        reps.append(Y)
    P = np.concatenate(reps, axis=0).astype(np.float32)
    sup = np.full(DIRS.shape[1], -np.inf, dtype=np.float32)
    for lo in range(0, P.shape[0], 30000):
        np.maximum(sup, (P[lo : lo + 30000] @ DIRS).max(axis=0), out=sup)
    return float(sup.min())


print("hull margin at z=100um, worst angle in {0,15,30,45}")
print("R_tip src_z    r=60    r=90    r=120   r=150")
for R, sz in [(200, 0), (200, -30), (200, -45), (200, -60), (220, -45), (180, -30)]:
    basis = wedge_basis(R * 1e-6, sz * 1e-6)
    row = f"{R:4d}  {sz:4d} "
    for r in [60, 90, 120, 150]:
        mm = min(hull_margin(basis, r, a) for a in [0.0, 15.0, 30.0, 45.0])
        row += f"  {mm:6.2f}"
    print(row)
