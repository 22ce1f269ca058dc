#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aoii/simulator.hpp"

namespace aoii {

// A reproducible experiment setup: model, lambda grid and simulation
// defaults.
struct Scenario {
  std::string name;
  SourceModel source;
  ChannelModel channel;
  std::vector<double> lambda_grid;
  int tau_max = 50;
  long long horizon = 1000000;
  int replications = 5;
  std::uint64_t seed = 20240521;
};

// 10-state source with linearly spread diagonal and off-diagonal transition
// probabilities, quadratic penalties, geometric channel.
Scenario scenario_one();

// 3-state source with a 2-phase channel and linear penalties.
Scenario scenario_two();

Scenario scenario_by_name(const std::string& name);

struct SweepPolicySet {
  bool smdp = true;
  bool st = true;
  bool rs = true;
};

struct SmdpSweepCell {
  Policy policy;
  double gain = 0.0;
  double sim_cost = 0.0;
  double sim_ci = 0.0;
};

struct StSweepCell {
  int tau = 1;
  double gain = 0.0;
  double sim_cost = 0.0;
  double sim_ci = 0.0;
};

struct RsSweepCell {
  double xi = 0.0;
  double sim_cost = 0.0;
  double sim_ci = 0.0;
};

struct SweepRow {
  double lambda = 0.0;
  std::optional<SmdpSweepCell> smdp;
  std::optional<StSweepCell> st;
  std::optional<RsSweepCell> rs;
  std::string error;  // nonempty if this lambda failed
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> xi_grid;
  SweepPolicySet policies;
};

// Default RS search grid: 0.05, 0.10, ..., 1.00.
std::vector<double> default_xi_grid();

// Per lambda: solve the SMDP and simulate its policy, line-search the best
// uniform threshold and simulate it, line-search the best RS rate
// (simulation only). A failing lambda is recorded in its row and the sweep
// continues. Simulation seeds derive deterministically from the scenario
// seed, the lambda index and the policy kind.
SweepResult run_sweep(const Scenario& scenario, const SweepPolicySet& policies,
                      const std::vector<double>& xi_grid);

void write_sweep_costs_csv(std::ostream& os, const Scenario& scenario,
                           const SweepResult& result);
void write_sweep_thresholds_csv(std::ostream& os, const Scenario& scenario,
                                const SweepResult& result);

}  // namespace aoii
