#include "aoii/experiments.hpp"

#include <ostream>
#include <sstream>

#include "aoii/format.hpp"

namespace aoii {

Scenario scenario_one() {
  const int n = 10;
  Matrix q(n, n);
  for (int row = 0; row < n; ++row) {
    const double diag = 0.4 + 0.2 * row / (n - 1);
    q(row, row) = diag;
    // Off-diagonal entries linearly spread over
    // [0.5 (1-q_nn)/(N-1), 1.5 (1-q_nn)/(N-1)], filled in ascending column
    // order; their mean is (1-q_nn)/(N-1), so the row sums to 1 exactly.
    const double lo = 0.5 * (1.0 - diag) / (n - 1);
    const double hi = 1.5 * (1.0 - diag) / (n - 1);
    int k = 0;
    for (int col = 0; col < n; ++col) {
      if (col == row) continue;
      q(row, col) = lo + (hi - lo) * k / (n - 2);
      ++k;
    }
  }
  std::vector<Polynomial> penalties;
  for (int j = 1; j <= n; ++j) {
    penalties.push_back(
        Polynomial({0.0, 1.0 / (n + 1 - j), 1.0 / j}));
  }
  RowVector gamma(1);
  gamma << 1.0;
  Matrix g(1, 1);
  g << 0.2;
  // tau_max 12 keeps every policy in the built-in action space mixing fast
  // enough for the default 10^6-slot horizon. Larger caps admit
  // quasi-non-transmitting thresholds whose long-run average is correct but
  // needs orders of magnitude more slots to show up in a simulation.
  Scenario s{"scenario1",
             SourceModel(std::move(q), std::move(penalties)),
             ChannelModel(std::move(gamma), std::move(g)),
             {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0},
             12};
  return s;
}

Scenario scenario_two() {
  Matrix q(3, 3);
  q << 0.60, 0.25, 0.15,
       0.25, 0.55, 0.20,
       0.20, 0.30, 0.50;
  std::vector<Polynomial> penalties{
      Polynomial({0.5, 1.0}),
      Polynomial({1.0, 0.5}),
      Polynomial({0.25, 1.0 / 3.0}),
  };
  RowVector gamma(2);
  gamma << 1.0, 0.0;
  Matrix g(2, 2);
  g << 0.7, 0.2,
       0.1, 0.6;
  // Same tau_max rationale as scenario_one.
  Scenario s{"scenario2",
             SourceModel(std::move(q), std::move(penalties)),
             ChannelModel(std::move(gamma), std::move(g)),
             {0.0, 0.5, 1.0, 2.0, 5.0, 10.0},
             12};
  return s;
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "scenario1") return scenario_one();
  if (name == "scenario2") return scenario_two();
  fail(ErrorCode::kConfigError,
       "unknown scenario '" + name + "'; available: scenario1, scenario2");
}

std::vector<double> default_xi_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(0.05 * k);
  return grid;
}

SweepResult run_sweep(const Scenario& scenario, const SweepPolicySet& policies,
                      const std::vector<double>& xi_grid) {
  SweepResult result;
  result.policies = policies;
  result.xi_grid = xi_grid;

  const SmdpParameters params =
      smdp_parameters(scenario.source, scenario.channel, scenario.tau_max);

  for (size_t li = 0; li < scenario.lambda_grid.size(); ++li) {
    const double lambda = scenario.lambda_grid[li];
    SweepRow row;
    row.lambda = lambda;
    // Distinct deterministic seeds per (lambda, policy kind) cell.
    const std::uint64_t cell_seed = scenario.seed + 1000 * li;
    SimOptions options;
    options.horizon = scenario.horizon;
    options.replications = scenario.replications;
    options.lambda = lambda;
    try {
      if (policies.smdp) {
        SolverResult solved = policy_iteration(params, lambda);
        options.seed = cell_seed;
        SimulationReport report =
            simulate(scenario.source, scenario.channel,
                     SimPolicy::multi(solved.policy.thresholds), options);
        row.smdp = SmdpSweepCell{solved.policy, solved.gain, report.avg_cost,
                                 report.ci_half_width};
      }
      if (policies.st) {
        auto [tau, gain] = uniform_threshold_search(params, lambda);
        options.seed = cell_seed + 100;
        SimulationReport report = simulate(scenario.source, scenario.channel,
                                           SimPolicy::uniform(tau), options);
        row.st =
            StSweepCell{tau, gain, report.avg_cost, report.ci_half_width};
      }
      if (policies.rs) {
        options.seed = cell_seed + 200;
        auto [xi, report] = rs_line_search(scenario.source, scenario.channel,
                                           xi_grid, options);
        row.rs = RsSweepCell{xi, report.avg_cost, report.ci_half_width};
      }
    } catch (const Error& e) {
      row.error = std::string(error_code_name(e.code())) + ": " + e.what();
      row.smdp.reset();
      row.st.reset();
      row.rs.reset();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

void write_provenance(std::ostream& os, const Scenario& scenario,
                      const SweepResult& result) {
  os << "# aoii sweep, schema_version 1\n";
  os << "# scenario " << scenario.name << ", states "
     << scenario.source.num_states() << ", channel phases "
     << scenario.channel.phases() << "\n";
  os << "# tau_max " << scenario.tau_max << ", horizon " << scenario.horizon
     << ", replications " << scenario.replications << ", seed "
     << scenario.seed << "\n";
  os << "# lambda grid";
  for (const SweepRow& row : result.rows) os << " " << format_double(row.lambda);
  os << "\n";
  if (result.policies.rs) {
    os << "# xi grid";
    for (double xi : result.xi_grid) os << " " << format_double(xi);
    os << "\n";
  }
}

}  // namespace

void write_sweep_costs_csv(std::ostream& os, const Scenario& scenario,
                           const SweepResult& result) {
  write_provenance(os, scenario, result);
  os << "lambda";
  if (result.policies.smdp) os << ",smdp_gain,smdp_sim_cost,smdp_sim_ci";
  if (result.policies.st) os << ",st_tau,st_gain,st_sim_cost,st_sim_ci";
  if (result.policies.rs) os << ",rs_xi,rs_sim_cost,rs_sim_ci";
  os << "\n";
  for (const SweepRow& row : result.rows) {
    if (!row.error.empty()) {
      os << "# lambda " << format_double(row.lambda) << " failed: "
         << row.error << "\n";
      continue;
    }
    os << format_double(row.lambda);
    if (result.policies.smdp) {
      os << "," << format_double(row.smdp->gain) << ","
         << format_double(row.smdp->sim_cost) << ","
         << format_double(row.smdp->sim_ci);
    }
    if (result.policies.st) {
      os << "," << row.st->tau << "," << format_double(row.st->gain) << ","
         << format_double(row.st->sim_cost) << ","
         << format_double(row.st->sim_ci);
    }
    if (result.policies.rs) {
      os << "," << format_double(row.rs->xi) << ","
         << format_double(row.rs->sim_cost) << ","
         << format_double(row.rs->sim_ci);
    }
    os << "\n";
  }
}

void write_sweep_thresholds_csv(std::ostream& os, const Scenario& scenario,
                                const SweepResult& result) {
  write_provenance(os, scenario, result);
  os << "lambda,policy";
  for (int j = 1; j <= scenario.source.num_states(); ++j) os << ",tau_" << j;
  os << "\n";
  for (const SweepRow& row : result.rows) {
    if (!row.error.empty()) {
      os << "# lambda " << format_double(row.lambda) << " failed: "
         << row.error << "\n";
      continue;
    }
    if (row.smdp) {
      os << format_double(row.lambda) << ",smdp";
      for (int tau : row.smdp->policy.thresholds) os << "," << tau;
      os << "\n";
    }
    if (row.st) {
      os << format_double(row.lambda) << ",st";
      for (int j = 0; j < scenario.source.num_states(); ++j)
        os << "," << row.st->tau;
      os << "\n";
    }
  }
}

}  // namespace aoii
