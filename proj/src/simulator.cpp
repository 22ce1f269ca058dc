#include "aoii/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cassert>
#include <cmath>
#include <ostream>
#include <sstream>

#include "aoii/format.hpp"

namespace aoii {

SimPolicy SimPolicy::multi(std::vector<int> taus) {
  SimPolicy p;
  p.kind = Kind::kMultiThreshold;
  p.thresholds = std::move(taus);
  return p;
}

SimPolicy SimPolicy::uniform(int tau) {
  SimPolicy p;
  p.kind = Kind::kUniform;
  p.thresholds = {tau};
  return p;
}

SimPolicy SimPolicy::random_sampling(double xi) {
  SimPolicy p;
  p.kind = Kind::kRandomSampling;
  p.xi = xi;
  return p;
}

std::string SimPolicy::label() const {
  switch (kind) {
    case Kind::kMultiThreshold: {
      std::string out = "multi:";
      for (size_t i = 0; i < thresholds.size(); ++i) {
        if (i) out += "-";
        out += std::to_string(thresholds[i]);
      }
      return out;
    }
    case Kind::kUniform:
      return "uniform:" + std::to_string(thresholds.at(0));
    case Kind::kRandomSampling:
      return "rs:" + format_double(xi);
  }
  return "?";
}

namespace {

// Per-state thresholds expanded to the source size; random sampling keeps an
// empty vector and uses xi instead.
std::vector<int> resolve_thresholds(const SimPolicy& policy, int n) {
  switch (policy.kind) {
    case SimPolicy::Kind::kMultiThreshold: {
      if (static_cast<int>(policy.thresholds.size()) != n) {
        fail(ErrorCode::kInvalidPolicy,
             "multi-threshold policy has " +
                 std::to_string(policy.thresholds.size()) +
                 " thresholds, expected " + std::to_string(n));
      }
      for (int tau : policy.thresholds) {
        if (tau < 1) {
          fail(ErrorCode::kInvalidPolicy,
               "thresholds must be >= 1, got " + std::to_string(tau));
        }
      }
      return policy.thresholds;
    }
    case SimPolicy::Kind::kUniform: {
      if (policy.thresholds.size() != 1 || policy.thresholds[0] < 1) {
        fail(ErrorCode::kInvalidPolicy, "uniform policy needs one threshold >= 1");
      }
      return std::vector<int>(static_cast<size_t>(n), policy.thresholds[0]);
    }
    case SimPolicy::Kind::kRandomSampling: {
      if (!(policy.xi >= 0.0 && policy.xi <= 1.0)) {
        fail(ErrorCode::kInvalidPolicy,
             "random sampling rate must lie in [0,1], got " +
                 format_double(policy.xi));
      }
      return {};
    }
  }
  fail(ErrorCode::kInvalidPolicy, "unknown policy kind");
}

struct FlatChain {
  int n = 0;
  std::vector<double> rows;  // row-major n x n

  explicit FlatChain(const Matrix& m) : n(static_cast<int>(m.rows())) {
    rows.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        rows[static_cast<size_t>(i) * n + j] = m(i, j);
  }

  int step(int i, RandomStream& rng) const {
    const double u = rng.next_double();
    const double* row = rows.data() + static_cast<size_t>(i) * n;
    double cum = 0.0;
    int last_positive = -1;
    for (int k = 0; k < n; ++k) {
      if (row[k] > 0.0) {
        last_positive = k;
        cum += row[k];
        if (u < cum) return k;
      }
    }
    assert(last_positive >= 0);
    return last_positive;
  }
};

// Channel slot step: outcome in [0, M) is the next phase, M is delivery.
struct FlatChannel {
  int m = 0;
  std::vector<double> rows;  // row-major m x (m+1), last column is h
  std::vector<double> gamma;

  FlatChannel(const ChannelModel& channel) : m(channel.phases()) {
    rows.resize(static_cast<size_t>(m) * (m + 1));
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k)
        rows[static_cast<size_t>(i) * (m + 1) + k] = channel.g()(i, k);
      rows[static_cast<size_t>(i) * (m + 1) + m] = channel.h()(i);
    }
    gamma.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) gamma[static_cast<size_t>(i)] = channel.gamma()(i);
  }

  int start(RandomStream& rng) const {
    const double u = rng.next_double();
    double cum = 0.0;
    int last_positive = -1;
    for (int k = 0; k < m; ++k) {
      if (gamma[static_cast<size_t>(k)] > 0.0) {
        last_positive = k;
        cum += gamma[static_cast<size_t>(k)];
        if (u < cum) return k;
      }
    }
    assert(last_positive >= 0);
    return last_positive;
  }

  int step(int phase, RandomStream& rng) const {
    const double u = rng.next_double();
    const double* row = rows.data() + static_cast<size_t>(phase) * (m + 1);
    double cum = 0.0;
    int last_positive = -1;
    for (int k = 0; k <= m; ++k) {
      if (row[k] > 0.0) {
        last_positive = k;
        cum += row[k];
        if (u < cum) return k;
      }
    }
    assert(last_positive >= 0);
    return last_positive;
  }
};

struct CycleAccumulator {
  long long cycles = 0;
  double duration_sum = 0.0;
  double tx_sum = 0.0;
  double penalty_sum = 0.0;
  std::vector<long long> next_counts;
};

}  // namespace

SimulationReport simulate(const SourceModel& source,
                          const ChannelModel& channel, const SimPolicy& policy,
                          const SimOptions& options, std::ostream* trace) {
  const int n = source.num_states();
  const std::vector<int> thresholds = resolve_thresholds(policy, n);
  const bool random_sampling = policy.kind == SimPolicy::Kind::kRandomSampling;
  if (options.horizon < 100) {
    fail(ErrorCode::kArgumentOutOfRange,
         "horizon must be at least 100 slots, got " +
             std::to_string(options.horizon));
  }
  if (options.replications < 1) {
    fail(ErrorCode::kArgumentOutOfRange, "replications must be >= 1");
  }
  if (options.lambda < 0.0) {
    fail(ErrorCode::kArgumentOutOfRange, "lambda must be nonnegative");
  }

  const FlatChain q(source.q().entries());
  const FlatChannel chan(channel);
  const std::vector<Polynomial>& penalties = source.penalties();

  const long long warmup =
      static_cast<long long>(options.warmup_fraction * options.horizon);
  const long long counted = options.horizon - warmup;

  SimulationReport report;
  report.horizon = options.horizon;
  report.replications = options.replications;
  report.seed = options.seed;
  report.lambda = options.lambda;
  report.slots_counted = counted;

  std::vector<CycleAccumulator> cycle_acc(static_cast<size_t>(n));
  for (auto& acc : cycle_acc) acc.next_counts.assign(static_cast<size_t>(n), 0);

  if (trace != nullptr) {
    *trace << "slot,x,xhat,aoii,channel_phase,penalty,delta\n";
  }

  double penalty_fraction_sum = 0.0;
  double tx_fraction_sum = 0.0;

  for (int rep = 0; rep < options.replications; ++rep) {
    RandomStream rng = RandomStream::substream(options.seed, static_cast<std::uint64_t>(rep));
    int x = 0;
    int xhat = 0;
    long long aoii = 0;
    int phase = -1;  // -1 = idle
    double penalty_sum = 0.0;
    long long tx_slots = 0;

    // Open cycle bookkeeping (per replication, after warmup).
    int open_ev = -1;
    long long open_slot = 0;
    double open_penalty = 0.0;
    long long open_tx = 0;

    const bool tracing = trace != nullptr && rep == 0;

    for (long long t = 0; t < options.horizon; ++t) {
      // 1. Policy step: a mismatch with an idle channel may start a
      //    transmission with a fresh phase.
      if (x != xhat && phase < 0) {
        bool fire;
        if (random_sampling) {
          fire = rng.next_double() < policy.xi;
        } else if (options.exclusive_trigger) {
          fire = aoii > thresholds[static_cast<size_t>(xhat)];
        } else {
          fire = aoii >= thresholds[static_cast<size_t>(xhat)];
        }
        if (fire) phase = chan.start(rng);
      }
      const bool transmitting = phase >= 0;

      const double penalty =
          (aoii > 0 || options.charge_in_sync_penalty)
              ? penalties[static_cast<size_t>(xhat)](static_cast<double>(aoii))
              : 0.0;
      if (t >= warmup) {
        penalty_sum += penalty;
        if (transmitting) ++tx_slots;
        if (open_ev >= 0) {
          open_penalty += penalty;
          if (transmitting) ++open_tx;
        }
      }

      if (tracing && t < options.trace_limit) {
        *trace << t << "," << (x + 1) << "," << (xhat + 1) << "," << aoii
               << ",";
        if (transmitting) {
          *trace << (phase + 1);
        } else {
          *trace << "idle";
        }
        *trace << "," << format_double(penalty) << ","
               << (transmitting ? 1 : 0) << "\n";
      }

      // 2. Channel step.
      bool delivered = false;
      if (transmitting) {
        const int outcome = chan.step(phase, rng);
        if (outcome == chan.m) {
          delivered = true;
        } else {
          phase = outcome;
        }
      }

      // 3. Source step; a state change preempts the transmission and voids a
      //    delivery happening in the same slot.
      const int x_next = q.step(x, rng);
      if (x_next != x && transmitting) {
        phase = -1;
        delivered = false;
      }

      // 4. Commit.
      if (delivered) {
        xhat = x;
        phase = -1;
      }
      const long long aoii_prev = aoii;
      x = x_next;
      aoii = (x == xhat) ? 0 : aoii + 1;
      assert(aoii == ((x == xhat) ? 0 : aoii_prev + 1));

      // Sync re-established: cycle boundary.
      if (aoii == 0 && aoii_prev > 0 && t >= warmup) {
        if (open_ev >= 0) {
          CycleAccumulator& acc = cycle_acc[static_cast<size_t>(open_ev)];
          ++acc.cycles;
          acc.duration_sum += static_cast<double>(t - open_slot);
          acc.tx_sum += static_cast<double>(open_tx);
          acc.penalty_sum += open_penalty;
          ++acc.next_counts[static_cast<size_t>(x)];
        }
        open_ev = x;
        open_slot = t;
        open_penalty = 0.0;
        open_tx = 0;
      }
    }

    const double pen_frac = penalty_sum / static_cast<double>(counted);
    const double tx_frac =
        static_cast<double>(tx_slots) / static_cast<double>(counted);
    penalty_fraction_sum += pen_frac;
    tx_fraction_sum += tx_frac;
    report.rep_costs.push_back(pen_frac + options.lambda * tx_frac);
  }

  const int reps = options.replications;
  report.avg_penalty = penalty_fraction_sum / reps;
  report.avg_tx_fraction = tx_fraction_sum / reps;
  report.avg_cost = report.avg_penalty + options.lambda * report.avg_tx_fraction;

  if (reps >= 2) {
    double mean = 0.0;
    for (double c : report.rep_costs) mean += c;
    mean /= reps;
    double ss = 0.0;
    for (double c : report.rep_costs) ss += (c - mean) * (c - mean);
    const double sd = std::sqrt(ss / (reps - 1));
    boost::math::students_t_distribution<double> dist(reps - 1);
    const double tq = boost::math::quantile(dist, 0.975);
    report.ci_half_width = tq * sd / std::sqrt(static_cast<double>(reps));
  } else {
    report.ci_half_width = 0.0;
    report.warnings.push_back(
        "confidence interval unavailable with a single replication");
  }

  for (int j = 0; j < n; ++j) {
    const CycleAccumulator& acc = cycle_acc[static_cast<size_t>(j)];
    CycleStats stats;
    stats.ev = j;
    stats.cycles = acc.cycles;
    if (acc.cycles > 0) {
      stats.mean_duration = acc.duration_sum / static_cast<double>(acc.cycles);
      stats.mean_tx_slots = acc.tx_sum / static_cast<double>(acc.cycles);
      stats.mean_penalty = acc.penalty_sum / static_cast<double>(acc.cycles);
      stats.next_ev_freq.resize(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        stats.next_ev_freq[static_cast<size_t>(i)] =
            static_cast<double>(acc.next_counts[static_cast<size_t>(i)]) /
            static_cast<double>(acc.cycles);
      }
    } else {
      stats.next_ev_freq.assign(static_cast<size_t>(n), 0.0);
    }
    report.cycle_stats.push_back(std::move(stats));
  }

  return report;
}

CycleParameterEstimate estimate_cycle_parameters(const SourceModel& source,
                                                 const ChannelModel& channel,
                                                 int j, int tau,
                                                 long long cycles,
                                                 std::uint64_t seed) {
  const int n = source.num_states();
  if (j < 0 || j >= n) {
    fail(ErrorCode::kArgumentOutOfRange,
         "state index out of range: " + std::to_string(j));
  }
  if (tau < 1) {
    fail(ErrorCode::kArgumentOutOfRange,
         "threshold must be >= 1, got " + std::to_string(tau));
  }
  if (cycles < 10000) {
    fail(ErrorCode::kMinimumSampleSize,
         "cycle-parameter estimation needs at least 10^4 cycles, got " +
             std::to_string(cycles));
  }

  const FlatChain q(source.q().entries());
  const FlatChannel chan(channel);
  const Polynomial& f = source.penalty(j);
  const double q_jj = source.q()(j, j);

  // First-mismatch distribution over the N-1 other states.
  std::vector<double> beta(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    beta[static_cast<size_t>(i)] = i == j ? 0.0 : q.rows[static_cast<size_t>(j) * n + i] / (1.0 - q_jj);

  RandomStream rng(seed);
  double sum_a = 0.0, sum_a2 = 0.0;
  double sum_c = 0.0, sum_c2 = 0.0;
  double sum_d = 0.0, sum_d2 = 0.0;
  std::vector<long long> landing(static_cast<size_t>(n), 0);

  for (long long it = 0; it < cycles; ++it) {
    long long dwell = 1;
    while (rng.next_double() < q_jj) ++dwell;

    int x = rng.categorical(beta);
    long long aoii = 1;
    int phase = -1;
    double pen = 0.0;
    long long txs = 0;
    int land = j;
    for (;;) {
      if (phase < 0 && aoii >= tau) phase = chan.start(rng);
      const bool transmitting = phase >= 0;
      if (transmitting) ++txs;
      pen += f(static_cast<double>(aoii));
      bool delivered = false;
      if (transmitting) {
        const int outcome = chan.step(phase, rng);
        if (outcome == chan.m) {
          delivered = true;
        } else {
          phase = outcome;
        }
      }
      const int x_next = q.step(x, rng);
      if (x_next != x && transmitting) {
        phase = -1;
        delivered = false;
      }
      if (delivered) {
        land = x;
        break;
      }
      if (x_next == j) {
        land = j;
        break;
      }
      x = x_next;
      ++aoii;
    }

    const double d = static_cast<double>(dwell + aoii);
    sum_a += pen;
    sum_a2 += pen * pen;
    sum_c += static_cast<double>(txs);
    sum_c2 += static_cast<double>(txs) * static_cast<double>(txs);
    sum_d += d;
    sum_d2 += d * d;
    ++landing[static_cast<size_t>(land)];
  }

  const double nn = static_cast<double>(cycles);
  auto mean_se = [nn](double s, double s2) {
    const double mean = s / nn;
    const double var = (s2 - nn * mean * mean) / (nn - 1.0);
    return std::pair<double, double>(mean, std::sqrt(std::max(var, 0.0) / nn));
  };

  CycleParameterEstimate est;
  est.cycles = cycles;
  std::tie(est.age_cost, est.age_cost_se) = mean_se(sum_a, sum_a2);
  std::tie(est.tx_cost, est.tx_cost_se) = mean_se(sum_c, sum_c2);
  std::tie(est.duration, est.duration_se) = mean_se(sum_d, sum_d2);
  est.rho.resize(static_cast<size_t>(n));
  est.rho_se.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = static_cast<double>(landing[static_cast<size_t>(i)]) / nn;
    est.rho[static_cast<size_t>(i)] = p;
    est.rho_se[static_cast<size_t>(i)] = std::sqrt(p * (1.0 - p) / nn);
  }
  return est;
}

std::pair<double, SimulationReport> rs_line_search(
    const SourceModel& source, const ChannelModel& channel,
    const std::vector<double>& xi_grid, const SimOptions& options) {
  if (xi_grid.empty()) {
    fail(ErrorCode::kArgumentOutOfRange, "xi grid must be nonempty");
  }
  double best_xi = xi_grid.front();
  SimulationReport best_report;
  bool have = false;
  for (double xi : xi_grid) {
    SimulationReport report =
        simulate(source, channel, SimPolicy::random_sampling(xi), options);
    // <= so that exact ties resolve toward the larger xi.
    if (!have || report.avg_cost <= best_report.avg_cost) {
      best_xi = xi;
      best_report = std::move(report);
      have = true;
    }
  }
  return {best_xi, best_report};
}

}  // namespace aoii
