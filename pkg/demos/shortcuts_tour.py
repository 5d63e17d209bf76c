"""Three ways to drive a qubit fast and still land where a slow drive would."""

import numpy as np

from qubitengine.open_dynamics import BathSpec, EigenFrameState, evolve_name
from qubitengine.protocols import STERequest, const_mu_schedule, synthesize_ste, target_c_chi
from qubitengine.su2 import thermal_state
from qubitengine.unitary import evolve_static, evolve_unitary, feat_schedule, mu_quantized, sta_duration

print("1. Constant-mu shortcut: rotate the field by pi/2 while the frequency drops 8 -> 6.")
start = thermal_state(8.0, 10.0)
for l in (1, 2, 3):
    tau = sta_duration(8.0, 6.0, np.pi / 2, l)
    tr = evolve_unitary(start, const_mu_schedule(8.0, 6.0, 0.0, np.pi / 2, tau))
    print(f"   l={l}: mu={mu_quantized(l, np.pi / 2):.4f}, tau={tau:.4f}, final coherence {tr.coherence[-1]:.2e}")
print("   Quantized mu closes the precession loop, so no coherence is left behind.")

print("\n2. Bang-bang field switching between 8 and 4 with a transverse field of 1.")
sch, bb = feat_schedule(8.0, 4.0, 1.0, dt=1e-4)
s0 = -0.3 * np.array([1.0, 0.0, 8.0]) / np.hypot(8.0, 1.0)
s1 = evolve_static(s0, sch)[-1]
target = -0.3 * np.array([1.0, 0.0, 4.0]) / np.hypot(4.0, 1.0)
print(f"   segments {bb.tau1:.4f} + {bb.tau2:.4f}, miss distance {np.linalg.norm(s1 - target):.2e}")

print("\n3. Shortcut to equilibrium: leave a T=10 bath in a thermal state at a new frequency.")
bath = BathSpec(10.0, 0.01)
tau = 20 * 2 * np.pi / 8.0
ste = synthesize_ste(STERequest(12.0, 8.0, tau, bath))
c0 = float(target_c_chi(12.0, 10.0))
et = evolve_name(EigenFrameState(c0, 0, 0, float(ste.mu[0]), 12.0), ste, bath)
goal = thermal_state(8.0, 10.0).components / 8.0
print(f"   stroke length {tau:.3f}; distance to the Gibbs state at Omega=8: {np.linalg.norm(et.final.u() - goal):.2e}")
print(f"   largest mid-stroke detour from a straight frequency ramp: "
      f"{np.max(np.abs(ste.Omega - (12 + (8 - 12) * ste.t / tau))):.3f}")
