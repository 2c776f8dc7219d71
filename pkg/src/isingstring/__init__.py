"""String-breaking dynamics in a quantum Ising chain with local vibrations."""

__version__ = "0.1.0"

from .errors import (CapacityError, ConfigError, DomainError, PropagationError,
                     SimulationError)
from .params import SystemParams, format_config, load_params
from .hilbert import HilbertSpace, StateVector, build_initial_state
from .hamiltonian import HamiltonianOperator
from .krylov import PropagationPlan, evolve_and_sample, krylov_step
from .observables import (ObservableFrame, classify_string_fate,
                          domain_wall_profile, magnetization_measures,
                          measure_frame, phonon_statistics, string_aggregates,
                          string_variances)
from .sbt import SbtResult, detect_sbt
from .semiclassical import (SemiclassicalState, effective_spin_hamiltonian_apply,
                            eom_step, run_semiclassical)
from .dense import DenseOperator, dense_assemble, dense_evolve
from .runner import (ConvergenceReport, RunResult, SweepSpec, check_convergence,
                     run_convergence_study, run_experiment, run_sweep)

__all__ = [name for name in dir() if not name.startswith("_")]
