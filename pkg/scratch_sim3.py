import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench_batch, direct_wrench
from deptwin.hydro import resistance_tensors, sedimentation
from deptwin.simulator import quadrature_phases

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
om = 2 * math.pi * 300e3
u_quad = quadrature_phases(4).complex()

# 1) vertical profile under quadrature: is hover passively stable?
print("z(um)   F_z(N)      net(N)")
fsed = sedimentation(obj, m.rho_m, m.rho_o).F[2]
for z in [40, 60, 80, 90, 100, 110, 120, 140, 160]:
    w = direct_wrench(obj, Pose.from_xyz_yaw(0, 0, z * 1e-6, 0.3), basis, m, om, u_quad)
    print(f"{z:5.0f}  {w.F[2]:+.3e}  {w.F[2]+fsed:+.3e}")

# 2) achievable envelope on the 15-degree grid at center, z=100um
pose = Pose.from_xyz_yaw(0, 0, 100e-6, 0.3)
forms = assemble_forms(obj, pose, basis, m, om)
step = 15
g = np.arange(0, 360, step)
A, B, C = np.meshgrid(g, g, g, indexing="ij")
ph = np.stack([np.zeros(A.size), A.ravel(), B.ravel(), C.ravel()], axis=1)
U = 38.0 * np.exp(1j * np.deg2rad(ph))
W = eval_wrench_batch(forms, U)
fz_ok = np.abs(W[:, 2] - (-fsed)) < 0.2 * abs(fsed)   # hold altitude within 20%
fxy = np.hypot(W[:, 0], W[:, 1])
tz = np.abs(W[:, 5])
tnorm = np.linalg.norm(W[:, 3:], axis=1)
print(f"\ngrid states: {len(W)}, altitude-holding: {fz_ok.sum()}")
for tcap in [2e-15, 5e-15, 1e-14]:
    sel = fz_ok & (tnorm < tcap)
    print(f"  |T|<{tcap:.0e}: n={sel.sum():6d}  max Fxy={fxy[sel].max():.3e} N")
sel = fz_ok
print(f"  any T:      n={sel.sum():6d}  max Fxy={fxy[sel].max():.3e} N")
# torque envelope while holding altitude and small in-plane force
sel = fz_ok & (fxy < 5e-11)
print(f"  Fxy<5e-11:  n={sel.sum():6d}  max |Tz|={tz[sel].max():.3e} N m")
# drag coefficients -> speed scales
rs = resistance_tensors(obj)
drag_f = m.mu * rs.K[0, 0]
drag_t = m.mu * rs.Omega[2, 2]
print(f"\ndrag: F/v = {drag_f:.3e} N s/m   T/w = {drag_t:.3e} N m s")
print(f"Fxy=1.5e-10 -> v = {1.5e-10/drag_f*1e6:.1f} um/s ; Tz=1.0e-15 -> w = {1e-15/drag_t:.3f} rad/s")
# parasitics of plain quadrature at this pose
w = eval_wrench_batch(forms, u_quad[None, :])[0]
print("quadrature wrench:", w)
