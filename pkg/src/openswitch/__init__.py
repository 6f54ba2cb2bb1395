"""Quantum switch with a thermally monitored control qubit.

Submodules:

* ``matcore``       small dense linear algebra (Jacobi eigensolver, partial trace)
* ``quantum``       states, Kraus channels, monitoring maps, Gibbs states
* ``switch``        the two-map switch and control post-selection
* ``opencontrol``   collisional thermal environment on the control
* ``entanglement``  two-qubit concurrence
* ``experiments``   Bell pair under two monitorings, sweeps and thresholds
* ``cli``           command-line interface
"""
from .entanglement import concurrence, concurrence_mixed, concurrence_pure, spin_flip
from .experiments import (
    ScenarioConfig,
    SweepRecord,
    bell_mub_switch,
    definite_baseline,
    make_params,
    open_control_record,
    run_sweep,
    sudden_death_threshold,
)
from .opencontrol import CollisionParams, analytic_after_n, asymptotic_state, collide, collide_once, postselect_after_n
from .quantum import INF, DensityMatrix, KrausChannel, ProjectorSet, gibbs_state, monitoring_channel, mub_qubit_bases
from .switch import SwitchOutput, PostSelection, postselect, run_switch

__version__ = "0.1.0"
