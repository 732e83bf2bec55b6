"""Latency-minimizing solver and simulator for IRS-aided mobile edge computing."""

from .compute_alloc import (
    Allocation,
    LatencyReport,
    edge_latency,
    integerize_offload,
    joint_compute_opt,
    local_latency,
    optimal_offload_relaxed,
    resource_allocation_at_mu,
    solve_mu_bisection,
)
from .comms_opt import (
    NewtonState,
    PhaseQuadratic,
    auxiliary_weights,
    build_phase_quadratic,
    inner_bcd,
    mm_phase_optimize,
    mm_phase_step,
    mmse_mud,
    mmse_rate,
    mse,
    newton_update,
    outer_sum_of_ratios,
    rate,
    sinr,
)
from .numerics import (
    MaxEigenvalue,
    SingularSystemError,
    hadamard,
    hermitian_solve,
    max_eigenvalue,
    principal_arg,
)
from .scenario import (
    ChannelSet,
    Geometry,
    PathLossModel,
    SystemConfig,
    TaskRanges,
    TaskSet,
    composite_channel,
    draw_channels,
    draw_tasks,
    mix_seed,
    path_loss_gain,
    place_devices,
)
from .solver import (
    Solution,
    SolverOptions,
    evaluate_solution,
    grid_oracle,
    quantize_phases,
    solve_multi_device,
    solve_randphase,
    solve_single_device,
    solve_without_irs,
)

__version__ = "0.1.0"
