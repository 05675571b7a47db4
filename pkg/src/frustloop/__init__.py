"""frustloop: planted MAX-2-SAT / bipartite Ising instances with tunable
hardness, a simulated-annealing reference solver, and a time-to-solution
benchmark harness."""

__version__ = "0.1.0"

from .core import (
    RbmInstance,
    SpinState,
    SwitchingSubset,
    brute_force_ground_state,
    distance,
    energy,
    energy_gap,
    frustration_index,
    gauge_fix,
    is_local_minimum,
    local_fields,
    plant,
    switching_subset,
    vertex_switch,
)
from .convert import (
    Max2SatInstance,
    QuboInstance,
    WeightedClause,
    absorb_biases,
    binary_to_ising,
    clause_density,
    max2sat_to_qubo,
    qubo_to_bipartite,
    rbm_to_max2sat,
    read_wcnf,
    write_wcnf,
)
from .generate import (
    GenParams,
    LoopAtom,
    SaturationError,
    alpha_from_f,
    decompose_loop,
    f_from_alpha,
    random_loop_instance,
    structured_loop_instance,
    uniform_sat_instance,
)
from .solve import AnnealSchedule, TtsRecord, anneal_run, beta_schedule, solve_with_restarts
from .bench import (
    HardnessStats,
    default_nsweep,
    density_scan,
    lognormal_stats,
    rho_peak_reference,
    scaling_study,
)
from .analyze import (
    expected_frustration_decay,
    expected_intersections,
    expected_local_minima,
    gap_variance,
    local_field_dispersion,
)
