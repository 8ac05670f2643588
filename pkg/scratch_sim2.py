import math
import numpy as np
from deptwin.geometry import Pose, builtin_shape, build_object
from deptwin.field import ElectrodeBasis
from deptwin.gdep import MaterialProperties, assemble_forms, eval_wrench
from deptwin.simulator import Simulator, SimState, NoiseModel, quadrature_phases
from deptwin.controller import TargetPose
from deptwin.inverter import error_vector

shape = builtin_shape("SZ")
obj = build_object(shape, elements_per_cell=8)
basis = ElectrodeBasis.quadrupole()
m = MaterialProperties.water_su8()
sim = Simulator(obj, shape, basis, vision_bypass=True, noise=NoiseModel.off())

# hover at the start pose: w_ref should be (0,0,+9.41e-10, 0,0,0)
st = SimState(Pose.from_xyz_yaw(0, 0, 100e-6, 0.0), 0.0, quadrature_phases(4))
tgt = TargetPose(0.0, 0.0, 0.0)
for k in range(25):
    st, rec = sim.control_tick(st, tgt, k)
    if k < 6 or k % 5 == 0:
        print(f"k={k:3d} z={rec.z*1e6:7.2f}um yaw={rec.yaw:+.3f} "
              f"wr_z={rec.wr[2]:+.3e} wm_z={rec.wm[2]:+.3e} "
              f"e=({rec.e1:.2f},{rec.e2:.2f},{rec.e3:.2f},{rec.e4:.2f}) "
              f"cost={rec.cost:.3f} ph={rec.phases}")
print("final z", st.true_pose.p[2] * 1e6, "um")

# what wrench do the chosen phases make at the TRUE pose vs at est pose?
forms_true = assemble_forms(obj, st.true_pose, basis, m, sim.omega)
u = st.applied_phases.complex()
w_true = eval_wrench(forms_true, u)
print("true-pose wrench of last phases:", w_true.F, w_true.T)
print("f_sed:", sim.f_sed.F)
