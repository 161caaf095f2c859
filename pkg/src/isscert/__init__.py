"""Simulation and certification toolkit for disturbance-driven PDE decay.

Solvers for three one-parameter PDE families (reaction-diffusion,
recirculating transport, boundary-damped wave), truncation-based energy
functionals evaluated along the computed trajectories, and closed-form
decay bounds with explicit constants checked stamp by stamp.
"""

from .certify import (CheckReport, IssBound, bound_heat_classical,
                      bound_parabolic_q, bound_transport_p, bound_transport_q,
                      bound_wave_m, bound_wave_r_eps, check_trajectory,
                      prepare_bound)
from .comparison import (KLBound, MonotoneFn, identity_map, invert_monotone,
                         iss_gain, linear_map, odd_cubic_map, power_map,
                         truncation_sandwich)
from .config import ConfigError, RunPlan, build_plan, load_config, load_plan
from .fields import Field, Grid1D, Grid2D, Trajectory, lq_norm
from .glf import (GlfSeries, GlfSpec, dissipation_rate, dissipation_report,
                  evaluate, glf_for_parabolic, glf_for_transport, glf_for_wave,
                  local_speed_floor, series, wave_forcing_slack,
                  weighted_energy)
from .scenarios import SCENARIOS
from .signals import SpaceTimeField, TimeSignal, sup_field, sup_window
from .solvers import (AssumptionViolationError, ParabolicScenario,
                      ScenarioError, SolverConfig, SolverDivergedError,
                      TransportScenario, WaveScenario, reconstruct_wave_state,
                      solve_parabolic, solve_transport, solve_wave)
from .trunc import (TruncationPair, gronwall_envelope, gronwall_envelope_at,
                    property_gap, property_sides, young_epsilon_gap)

__version__ = "0.1.0"
