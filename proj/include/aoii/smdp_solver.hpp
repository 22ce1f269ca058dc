#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aoii/cycle_model.hpp"

namespace aoii {

// A multi-threshold policy: thresholds[j] is the AoII level at which state j
// starts transmitting, 1-based values in 1..tau_max.
struct Policy {
  std::vector<int> thresholds;

  bool operator==(const Policy&) const = default;
};

struct SolverResult {
  Policy policy;
  double gain = 0.0;
  ColVector bias;
  int iterations = 0;
  std::vector<double> gain_trace;
  std::vector<std::string> warnings;
};

// Average-cost evaluation of a fixed policy: solves the gain/bias linear
// system h_j + g d_j = r_j + sum_i rho_ji h_i with the bias pinned to 0 at
// the last state. r_j = age + lambda * tx. The induced chain must be
// unichain (here: irreducible over states reachable under rho).
std::pair<double, ColVector> policy_evaluate(const SmdpParameters& params,
                                             double lambda,
                                             const Policy& policy);

// One improvement sweep: per state, the threshold minimizing
// r - g d + rho . bias, ties resolved toward the smallest threshold.
Policy policy_improve(const SmdpParameters& params, double lambda, double gain,
                      const ColVector& bias);

// Policy iteration from an initial policy (default: all thresholds 1).
// Terminates when the policy repeats; the gain trace is nonincreasing.
SolverResult policy_iteration(const SmdpParameters& params, double lambda,
                              const Policy* initial = nullptr);

// Best single common threshold, ties toward the smallest.
std::pair<int, double> uniform_threshold_search(const SmdpParameters& params,
                                                double lambda);

// Full enumeration over tau_max^N policies; rejects search spaces beyond
// 10^7 evaluations.
SolverResult exhaustive_search(const SmdpParameters& params, double lambda);

void validate_policy(const SmdpParameters& params, const Policy& policy);

}  // namespace aoii
