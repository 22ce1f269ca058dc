#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoii/cycle_model.hpp"
#include "aoii/smdp_solver.hpp"

namespace aoii {

// Transmission policy as executed slot by slot. Threshold kinds fire when the
// AoII reaches the threshold for the current estimate; random sampling fires
// each idle mismatch slot with probability xi.
struct SimPolicy {
  enum class Kind { kMultiThreshold, kUniform, kRandomSampling };

  Kind kind = Kind::kMultiThreshold;
  std::vector<int> thresholds;
  double xi = 0.0;

  static SimPolicy multi(std::vector<int> taus);
  static SimPolicy uniform(int tau);
  static SimPolicy random_sampling(double xi);

  std::string label() const;
};

struct SimOptions {
  long long horizon = 1000000;
  int replications = 5;
  std::uint64_t seed = 20240521;
  double lambda = 0.0;
  // Fraction of each replication discarded before accounting starts.
  double warmup_fraction = 0.01;
  // Charge f_{xhat}(0) on in-sync slots as well (literal reading of the cost
  // expression; default keeps penalties to mismatch slots only).
  bool charge_in_sync_penalty = false;
  // Fire strictly above the threshold instead of at it.
  bool exclusive_trigger = false;
  long long trace_limit = 100000;
};

struct CycleStats {
  int ev = 0;
  long long cycles = 0;
  double mean_duration = 0.0;
  double mean_tx_slots = 0.0;
  double mean_penalty = 0.0;
  std::vector<double> next_ev_freq;
};

struct SimulationReport {
  double avg_cost = 0.0;
  double ci_half_width = 0.0;
  double avg_penalty = 0.0;
  double avg_tx_fraction = 0.0;
  long long slots_counted = 0;  // per replication
  long long horizon = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::vector<double> rep_costs;
  std::vector<CycleStats> cycle_stats;
  std::vector<std::string> warnings;
};

// Slot-accurate system simulation. Replication r uses the substream
// seed + r; reports are bit-identical across runs with equal options. The
// optional trace receives at most options.trace_limit slots of replication 0
// as CSV.
SimulationReport simulate(const SourceModel& source,
                          const ChannelModel& channel, const SimPolicy& policy,
                          const SimOptions& options,
                          std::ostream* trace = nullptr);

// Direct Monte Carlo estimate of one (j, tau) cell of the SMDP parameter
// tables, with standard errors. Needs at least 10^4 cycles.
struct CycleParameterEstimate {
  double age_cost = 0.0;
  double tx_cost = 0.0;
  double duration = 0.0;
  std::vector<double> rho;
  double age_cost_se = 0.0;
  double tx_cost_se = 0.0;
  double duration_se = 0.0;
  std::vector<double> rho_se;
  long long cycles = 0;
};

CycleParameterEstimate estimate_cycle_parameters(const SourceModel& source,
                                                 const ChannelModel& channel,
                                                 int j, int tau,
                                                 long long cycles,
                                                 std::uint64_t seed);

// Best random-sampling rate over a xi grid under the given simulation
// options; ties resolve toward the larger xi.
std::pair<double, SimulationReport> rs_line_search(
    const SourceModel& source, const ChannelModel& channel,
    const std::vector<double>& xi_grid, const SimOptions& options);

}  // namespace aoii
