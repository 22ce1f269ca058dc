"""Estimation-dependent threshold policies for the age of incorrect
information.

The package wraps a C++ core: closed-form cycle parameters for a finite
Markov source watched through a phase-type channel, average-cost solvers for
the resulting decision process, and a slot-accurate simulator used to
cross-check the closed forms.
"""

from ._core import (
    ChannelModel,
    CycleChain,
    CycleParameterEstimate,
    CycleStats,
    DrDphDistribution,
    DualRegimeChain,
    Error,
    MomentSeries,
    Policy,
    Polynomial,
    RsSweepCell,
    Scenario,
    SimOptions,
    SimPolicy,
    SimulationReport,
    SmdpParameters,
    SmdpSweepCell,
    SolverResult,
    SourceModel,
    StSweepCell,
    SweepPolicySet,
    SweepResult,
    SweepRow,
    __version__,
    absorption_vectors,
    age_cost,
    build_cycle_chain,
    default_xi_grid,
    drdph_pmf,
    duration,
    estimate_cycle_parameters,
    exhaustive_search,
    expected_penalty_sum,
    factorial_moment,
    ordinary_moment,
    policy_evaluate,
    policy_improve,
    policy_iteration,
    regime2_ipv,
    rs_line_search,
    run_sweep,
    scenario_by_name,
    scenario_one,
    scenario_two,
    simulate,
    simulation_report_json,
    smdp_parameters,
    smdp_parameters_csv,
    solver_result_json,
    sweep_costs_csv,
    sweep_thresholds_csv,
    transition_row,
    transmission_cost,
    uniform_threshold_search,
    validate_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
