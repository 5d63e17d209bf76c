"""Finite-time thermodynamics of a driven qubit heat engine.

Modules
-------
su2            states, frames and entropies
unitary        closed-system strokes (constant mu, sudden, bang-bang)
open_dynamics  bath contact (elementary, dressed-frequency, dephasing)
protocols      control schedules and shortcuts to equilibrium
thermo         first law, entropy production, fluxes and forces
formulas       closed-form cycle results by name
cycles         four-stroke cycles, limit cycles and sweeps
cli            command-line driver
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .su2 import BlochState, FrameParams, thermal_state  # noqa: F401
from .schedule import Schedule  # noqa: F401
from .open_dynamics import BathSpec, MeasurementSpec  # noqa: F401
from .cycles import CycleSpec, build_cycle, run_cycle, sweep_cycle_time  # noqa: F401
