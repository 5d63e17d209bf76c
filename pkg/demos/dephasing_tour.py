"""How weak energy measurements change a coherent Carnot-type engine."""

from qubitengine import CycleSpec
from qubitengine.cycles import sweep

spec = CycleSpec("global-carnot", tau_cyc=30.0)
kds = (0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0)
print("Global Carnot cycle, tau_cyc = 30. Measurement strength k_d scans six decades.")
for r in sweep(spec, "k_d", kds, workers=1):
    print(f"  k_d = {r.value:<7g} eta = {r.eta:.4f}   power = {r.P:.5f}   {r.mode}")
print("Moderate measurement rates damp the coherence the engine relies on and cost efficiency.")
print("Strong measurement pins the state to the energy basis (Zeno effect) and recovers most of it.")
