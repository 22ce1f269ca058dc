#include "aoii/cycle_model.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "aoii/format.hpp"

namespace aoii {

namespace {

// Strong connectivity of the directed graph with edges where p(i,j) > 0.
void check_irreducible(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  auto reach = [&](bool transpose) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double edge = transpose ? p(w, v) : p(v, w);
        if (edge > 0.0 && !seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(false);
  const auto bwd = reach(true);
  for (int v = 0; v < n; ++v) {
    if (!fwd[static_cast<size_t>(v)] || !bwd[static_cast<size_t>(v)]) {
      fail(ErrorCode::kIsolatedState,
           "source chain is not irreducible: state " + std::to_string(v + 1) +
               " is not strongly connected to state 1");
    }
  }
}

int off_state(int j, int k) { return k < j ? k : k + 1; }

}  // namespace

SourceModel::SourceModel(Matrix q, std::vector<Polynomial> penalties)
    : q_(std::move(q)), penalties_(std::move(penalties)) {
  const int n = q_.size();
  check_irreducible(q_.entries());
  for (int j = 0; j < n; ++j) {
    if (q_(j, j) >= 1.0 - kProbabilityTol) {
      fail(ErrorCode::kDegenerateState,
           "state " + std::to_string(j + 1) + " has q_jj = " +
               std::to_string(q_(j, j)) + "; it would never be left");
    }
  }
  if (static_cast<int>(penalties_.size()) != n) {
    fail(ErrorCode::kValidationFailure,
         "expected " + std::to_string(n) + " penalty polynomials, got " +
             std::to_string(penalties_.size()));
  }
  for (int j = 0; j < n; ++j) {
    const Polynomial& f = penalties_[static_cast<size_t>(j)];
    if (f.coeffs.empty()) {
      fail(ErrorCode::kValidationFailure,
           "penalty polynomial " + std::to_string(j + 1) + " is empty");
    }
    if (f.degree() > 8) {
      fail(ErrorCode::kArgumentOutOfRange,
           "penalty polynomial " + std::to_string(j + 1) + " has degree " +
               std::to_string(f.degree()) + ", supported maximum is 8");
    }
    if (f.coeffs.back() < 0.0 && f.degree() > 0) {
      fail(ErrorCode::kValidationFailure,
           "penalty polynomial " + std::to_string(j + 1) +
               " has a negative leading coefficient");
    }
    for (int t = 1; t <= 1000; ++t) {
      if (f(static_cast<double>(t)) < 0.0) {
        fail(ErrorCode::kValidationFailure,
             "penalty polynomial " + std::to_string(j + 1) +
                 " is negative at age " + std::to_string(t));
      }
    }
  }
}

ChannelModel::ChannelModel(RowVector gamma, Matrix g)
    : delay_(std::move(gamma), std::move(g)) {}

Regime1Blocks regime1_blocks(const SourceModel& source, int j) {
  const int n = source.num_states();
  if (j < 0 || j >= n) {
    fail(ErrorCode::kArgumentOutOfRange,
         "state index out of range: " + std::to_string(j));
  }
  const Matrix& q = source.q().entries();
  const int k1 = n - 1;
  Regime1Blocks out;
  out.ipv.resize(k1);
  out.tpts.resize(k1, k1);
  out.apts = Matrix::Zero(k1, n);
  const double escape = 1.0 - q(j, j);
  for (int k = 0; k < k1; ++k) {
    const int i = off_state(j, k);
    out.ipv(k) = q(j, i) / escape;
    for (int kk = 0; kk < k1; ++kk) out.tpts(k, kk) = q(i, off_state(j, kk));
    out.apts(k, j) = q(i, j);
  }
  return out;
}

Regime2Blocks regime2_blocks(const SourceModel& source,
                             const ChannelModel& channel, int j,
                             DeliveryAbsorption mode) {
  const int n = source.num_states();
  if (j < 0 || j >= n) {
    fail(ErrorCode::kArgumentOutOfRange,
         "state index out of range: " + std::to_string(j));
  }
  const Matrix& q = source.q().entries();
  const Matrix& g = channel.g();
  const RowVector& gamma = channel.gamma();
  const ColVector& h = channel.h();
  const int m = channel.phases();
  const int k1 = n - 1;
  const int k2 = k1 * m;
  Regime2Blocks out;
  out.tpts = Matrix::Zero(k2, k2);
  out.apts = Matrix::Zero(k2, n);
  for (int k = 0; k < k1; ++k) {
    const int i = off_state(j, k);
    for (int ph = 0; ph < m; ++ph) {
      const int row = k * m + ph;
      // Source holds: the transmission keeps its phase trajectory.
      for (int ph2 = 0; ph2 < m; ++ph2)
        out.tpts(row, k * m + ph2) = q(i, i) * g(ph, ph2);
      // Source moves to another wrong state: preempt, restart from gamma.
      for (int kk = 0; kk < k1; ++kk) {
        if (kk == k) continue;
        const int i2 = off_state(j, kk);
        for (int ph2 = 0; ph2 < m; ++ph2)
          out.tpts(row, kk * m + ph2) = q(i, i2) * gamma(ph2);
      }
      // Source returns to the estimate: sync without a delivery.
      out.apts(row, j) = q(i, j);
      // Delivery: the sample survives the slot only if the source holds.
      const double factor =
          mode == DeliveryAbsorption::kRequireSourceHold ? q(i, i)
                                                         : 1.0 - q(i, i);
      out.apts(row, i) = factor * h(ph);
    }
  }
  return out;
}

Matrix boundary_matrix(const ChannelModel& channel, int num_states) {
  if (num_states < 2) {
    fail(ErrorCode::kArgumentOutOfRange,
         "boundary matrix needs at least 2 source states");
  }
  const int k1 = num_states - 1;
  Matrix gamma(1, channel.phases());
  gamma.row(0) = channel.gamma();
  return kron(Matrix::Identity(k1, k1), gamma);
}

CycleChain build_cycle_chain(const SourceModel& source,
                             const ChannelModel& channel, int j, int tau) {
  if (tau < 1) {
    fail(ErrorCode::kArgumentOutOfRange,
         "threshold must be >= 1, got " + std::to_string(tau));
  }
  Regime1Blocks r1 = regime1_blocks(source, j);
  Regime2Blocks r2 = regime2_blocks(source, channel, j);
  Matrix btm = boundary_matrix(channel, source.num_states());
  DualRegimeChain chain(r1.ipv, tau, std::move(btm), std::move(r1.tpts),
                        std::move(r2.tpts), std::move(r1.apts),
                        std::move(r2.apts));
  DrDphDistribution dist(chain);
  return CycleChain{j, tau, std::move(chain), std::move(dist)};
}

double age_cost(const CycleChain& cycle, const Polynomial& f) {
  return expected_penalty_sum(cycle.dist, f);
}

double duration(const CycleChain& cycle, const SourceModel& source) {
  const double q_jj = source.q()(cycle.ev, cycle.ev);
  return 1.0 / (1.0 - q_jj) + factorial_moment(cycle.dist, 1);
}

double transmission_cost(const CycleChain& cycle) {
  const Matrix inv = inverse_i_minus(cycle.dist.tpts2.entries());
  const RowVector visits = cycle.dist.ipv2 * inv;
  return visits.sum();
}

RowVector transition_row(const CycleChain& cycle) {
  const auto [sigma1, sigma2] = absorption_vectors(cycle.chain);
  const int n = static_cast<int>(sigma1.size());
  RowVector row(n);
  double off = 0.0;
  for (int l = 0; l < n; ++l) {
    if (l == cycle.ev) continue;
    row(l) = sigma2(l);
    off += sigma2(l);
  }
  row(cycle.ev) = 1.0 - off;
  const RowVector direct = sigma1 + sigma2;
  if ((row - direct).cwiseAbs().maxCoeff() > kDerivedTol) {
    fail(ErrorCode::kValidationFailure,
         "transition row disagrees with the absorption split beyond tolerance");
  }
  return row;
}

SmdpParameters smdp_parameters(const SourceModel& source,
                               const ChannelModel& channel, int tau_max) {
  if (tau_max < 1) {
    fail(ErrorCode::kArgumentOutOfRange,
         "tau_max must be >= 1, got " + std::to_string(tau_max));
  }
  const int n = source.num_states();
  SmdpParameters params;
  params.num_states = n;
  params.tau_max = tau_max;
  params.age.resize(n, tau_max);
  params.tx.resize(n, tau_max);
  params.dur.resize(n, tau_max);
  params.rho.assign(static_cast<size_t>(n), Matrix::Zero(tau_max, n));
  for (int j = 0; j < n; ++j) {
    for (int tau = 1; tau <= tau_max; ++tau) {
      CycleChain cycle = build_cycle_chain(source, channel, j, tau);
      params.age(j, tau - 1) = age_cost(cycle, source.penalty(j));
      params.tx(j, tau - 1) = transmission_cost(cycle);
      params.dur(j, tau - 1) = duration(cycle, source);
      params.rho[static_cast<size_t>(j)].row(tau - 1) = transition_row(cycle);
    }
  }
  return params;
}

void write_smdp_parameters_csv(std::ostream& os, const SmdpParameters& params) {
  os << "# aoii smdp parameters, schema_version 1\n";
  os << "# states " << params.num_states << ", tau 1.." << params.tau_max
     << ", state labels are 1-based\n";
  os << "j,tau,age_cost,tx_cost,duration";
  for (int i = 1; i <= params.num_states; ++i) os << ",rho_" << i;
  os << "\n";
  for (int j = 0; j < params.num_states; ++j) {
    for (int tau = 1; tau <= params.tau_max; ++tau) {
      os << (j + 1) << "," << tau << "," << format_double(params.age_cost(j, tau))
         << "," << format_double(params.tx_cost(j, tau)) << ","
         << format_double(params.duration(j, tau));
      const RowVector row = params.transition_row(j, tau);
      for (int i = 0; i < params.num_states; ++i)
        os << "," << format_double(row(i));
      os << "\n";
    }
  }
}

}  // namespace aoii
