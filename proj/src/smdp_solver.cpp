#include "aoii/smdp_solver.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace aoii {

namespace {

Matrix induced_chain(const SmdpParameters& params, const Policy& policy) {
  const int n = params.num_states;
  Matrix p(n, n);
  for (int j = 0; j < n; ++j)
    p.row(j) = params.transition_row(j, policy.thresholds[static_cast<size_t>(j)]);
  return p;
}

// Average-cost evaluation needs a unichain structure: exactly one recurrent
// class (plus possibly transient states). Checked exactly through the
// transitive closure of the positive part of p.
void check_unichain(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<char>> reach(static_cast<size_t>(n),
                                       std::vector<char>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    reach[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    for (int j = 0; j < n; ++j)
      if (p(i, j) > 0.0) reach[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[static_cast<size_t>(i)][static_cast<size_t>(k)])
        for (int j = 0; j < n; ++j)
          if (reach[static_cast<size_t>(k)][static_cast<size_t>(j)])
            reach[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
  int first_recurrent = -1;
  for (int i = 0; i < n; ++i) {
    bool recurrent = true;
    for (int j = 0; j < n && recurrent; ++j) {
      if (reach[static_cast<size_t>(i)][static_cast<size_t>(j)] &&
          !reach[static_cast<size_t>(j)][static_cast<size_t>(i)])
        recurrent = false;
    }
    if (!recurrent) continue;
    if (first_recurrent < 0) {
      first_recurrent = i;
    } else if (!reach[static_cast<size_t>(first_recurrent)][static_cast<size_t>(i)]) {
      fail(ErrorCode::kNotUnichain,
           "induced chain has at least two recurrent classes (states " +
               std::to_string(first_recurrent + 1) + " and " +
               std::to_string(i + 1) + " are mutually unreachable)");
    }
  }
}

}  // namespace

void validate_policy(const SmdpParameters& params, const Policy& policy) {
  if (static_cast<int>(policy.thresholds.size()) != params.num_states) {
    fail(ErrorCode::kInvalidPolicy,
         "policy has " + std::to_string(policy.thresholds.size()) +
             " thresholds, expected " + std::to_string(params.num_states));
  }
  for (int j = 0; j < params.num_states; ++j) {
    const int tau = policy.thresholds[static_cast<size_t>(j)];
    if (tau < 1 || tau > params.tau_max) {
      fail(ErrorCode::kInvalidPolicy,
           "threshold for state " + std::to_string(j + 1) + " is " +
               std::to_string(tau) + ", outside 1.." +
               std::to_string(params.tau_max));
    }
  }
}

std::pair<double, ColVector> policy_evaluate(const SmdpParameters& params,
                                             double lambda,
                                             const Policy& policy) {
  validate_policy(params, policy);
  if (lambda < 0.0) {
    fail(ErrorCode::kArgumentOutOfRange,
         "lambda must be nonnegative, got " + std::to_string(lambda));
  }
  const int n = params.num_states;
  const Matrix p = induced_chain(params, policy);
  check_unichain(p);

  // Unknowns x_0..x_{n-1} = bias, x_n = gain; bias of the reference state
  // (the last one) is pinned to 0 by the extra equation.
  Matrix sys = Matrix::Zero(n + 1, n + 1);
  ColVector rhs(n + 1);
  for (int j = 0; j < n; ++j) {
    const int tau = policy.thresholds[static_cast<size_t>(j)];
    sys(j, j) += 1.0;
    for (int i = 0; i < n; ++i) sys(j, i) -= p(j, i);
    sys(j, n) = params.duration(j, tau);
    rhs(j) = params.age_cost(j, tau) + lambda * params.tx_cost(j, tau);
  }
  sys(n, n - 1) = 1.0;
  rhs(n) = 0.0;
  Eigen::PartialPivLU<Matrix> lu(sys);
  if (lu.rcond() < kRcondFloor) {
    fail(ErrorCode::kSingularSystem,
         "gain/bias system is numerically singular (rcond = " +
             std::to_string(lu.rcond()) + ")");
  }
  ColVector sol = lu.solve(rhs);
  ColVector bias = sol.head(n);
  bias(n - 1) = 0.0;
  return {sol(n), bias};
}

Policy policy_improve(const SmdpParameters& params, double lambda, double gain,
                      const ColVector& bias) {
  const int n = params.num_states;
  Policy next;
  next.thresholds.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    int best_tau = 1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int tau = 1; tau <= params.tau_max; ++tau) {
      const double r =
          params.age_cost(j, tau) + lambda * params.tx_cost(j, tau);
      const double value = r - gain * params.duration(j, tau) +
                           params.transition_row(j, tau).dot(bias);
      if (value < best_value - 1e-12) {
        best_value = value;
        best_tau = tau;
      }
    }
    next.thresholds[static_cast<size_t>(j)] = best_tau;
  }
  return next;
}

SolverResult policy_iteration(const SmdpParameters& params, double lambda,
                              const Policy* initial) {
  Policy current;
  if (initial != nullptr) {
    current = *initial;
    validate_policy(params, current);
  } else {
    current.thresholds.assign(static_cast<size_t>(params.num_states), 1);
  }
  SolverResult result;
  std::set<std::vector<int>> seen;
  seen.insert(current.thresholds);
  constexpr int kMaxIterations = 1000;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    auto [gain, bias] = policy_evaluate(params, lambda, current);
    result.gain_trace.push_back(gain);
    result.policy = current;
    result.gain = gain;
    result.bias = bias;
    result.iterations = iter;
    Policy next = policy_improve(params, lambda, gain, bias);
    if (next == current) break;
    if (!seen.insert(next.thresholds).second) {
      // A revisited policy that is not the current one means the improvement
      // step is cycling on ties; the incumbent is already optimal to
      // within the tie tolerance.
      result.warnings.push_back("policy improvement revisited a policy; "
                                "stopping at the incumbent");
      break;
    }
    current = next;
  }
  for (int j = 0; j < params.num_states; ++j) {
    if (result.policy.thresholds[static_cast<size_t>(j)] == params.tau_max) {
      result.warnings.push_back(
          "threshold for state " + std::to_string(j + 1) +
          " sits at tau_max = " + std::to_string(params.tau_max) +
          "; the search range may be truncating the optimum");
    }
  }
  return result;
}

std::pair<int, double> uniform_threshold_search(const SmdpParameters& params,
                                                double lambda) {
  int best_tau = 1;
  double best_gain = std::numeric_limits<double>::infinity();
  for (int tau = 1; tau <= params.tau_max; ++tau) {
    Policy policy;
    policy.thresholds.assign(static_cast<size_t>(params.num_states), tau);
    const double gain = policy_evaluate(params, lambda, policy).first;
    if (gain < best_gain - 1e-12) {
      best_gain = gain;
      best_tau = tau;
    }
  }
  return {best_tau, best_gain};
}

SolverResult exhaustive_search(const SmdpParameters& params, double lambda) {
  const int n = params.num_states;
  double space = 1.0;
  for (int j = 0; j < n; ++j) space *= params.tau_max;
  if (space > 1e7) {
    fail(ErrorCode::kSearchSpaceTooLarge,
         "exhaustive search over tau_max^N = " + std::to_string(space) +
             " policies exceeds the 1e7 evaluation budget");
  }
  SolverResult result;
  result.gain = std::numeric_limits<double>::infinity();
  Policy policy;
  policy.thresholds.assign(static_cast<size_t>(n), 1);
  int evaluated = 0;
  for (;;) {
    ++evaluated;
    auto [gain, bias] = policy_evaluate(params, lambda, policy);
    if (gain < result.gain - 1e-12) {
      result.gain = gain;
      result.bias = bias;
      result.policy = policy;
    }
    int pos = 0;
    while (pos < n) {
      int& tau = policy.thresholds[static_cast<size_t>(pos)];
      if (tau < params.tau_max) {
        ++tau;
        break;
      }
      tau = 1;
      ++pos;
    }
    if (pos == n) break;
  }
  result.iterations = evaluated;
  for (int j = 0; j < n; ++j) {
    if (result.policy.thresholds[static_cast<size_t>(j)] == params.tau_max) {
      result.warnings.push_back(
          "threshold for state " + std::to_string(j + 1) +
          " sits at tau_max = " + std::to_string(params.tau_max) +
          "; the search range may be truncating the optimum");
    }
  }
  return result;
}

}  // namespace aoii
