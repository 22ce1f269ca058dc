// Acceptance battery. Seven criteria, each printing detail lines followed by
// one [PASS]/[FAIL] summary line; the exit status is the number of failed
// criteria, so 0 means the battery is clean.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aoii/dr_dph.hpp"
#include "aoii/experiments.hpp"
#include "aoii/simulator.hpp"
#include "aoii/smdp_solver.hpp"
#include "oracles.hpp"

namespace {

using namespace aoii;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string policy_string(const std::vector<int>& thresholds) {
  std::string out = "(";
  for (size_t j = 0; j < thresholds.size(); ++j) {
    if (j > 0) out += ",";
    out += std::to_string(thresholds[j]);
  }
  return out + ")";
}

// 1. Analytic gain versus simulated average cost of the same policy, for the
// tuned multi-threshold solution and for the best uniform threshold.
bool criterion_agreement() {
  const Scenario sc = scenario_two();
  const SmdpParameters params =
      smdp_parameters(sc.source, sc.channel, sc.tau_max);
  const double lambdas[] = {0.0, 0.5, 1.0, 2.0, 5.0};
  bool ok = true;
  int k = 0;
  for (double lambda : lambdas) {
    SimOptions options;
    options.lambda = lambda;

    const SolverResult solved = policy_iteration(params, lambda);
    options.seed = 9100 + 17 * static_cast<std::uint64_t>(k);
    SimulationReport report =
        simulate(sc.source, sc.channel,
                 SimPolicy::multi(solved.policy.thresholds), options);
    double tol = std::max(0.02 * std::abs(solved.gain), report.ci_half_width);
    bool pass = std::abs(report.avg_cost - solved.gain) <= tol;
    ok = ok && pass;
    std::printf("  lambda %-4g smdp %-12s gain %.6f  sim %.6f +- %.6f%s\n",
                lambda, policy_string(solved.policy.thresholds).c_str(),
                solved.gain, report.avg_cost, report.ci_half_width,
                pass ? "" : "  MISMATCH");

    const auto [tau, st_gain] = uniform_threshold_search(params, lambda);
    options.seed = 9100 + 17 * static_cast<std::uint64_t>(k) + 7;
    report = simulate(sc.source, sc.channel, SimPolicy::uniform(tau), options);
    tol = std::max(0.02 * std::abs(st_gain), report.ci_half_width);
    pass = std::abs(report.avg_cost - st_gain) <= tol;
    ok = ok && pass;
    std::printf("  lambda %-4g st   tau=%-9d gain %.6f  sim %.6f +- %.6f%s\n",
                lambda, tau, st_gain, report.avg_cost, report.ci_half_width,
                pass ? "" : "  MISMATCH");
    ++k;
  }
  return ok;
}

// 2. Closed-form cycle parameters versus direct Monte Carlo over 10^6 cycles
// per (j, tau) cell, every quantity within 3 standard errors. The footer
// prints the empirical readings that arbitrate the three formula variants
// kept in the code base.
bool criterion_cycle_oracle() {
  const Scenario sc = scenario_two();
  const int n = sc.source.num_states();
  const std::vector<int> taus{1, 2, 3, 5};
  const long long cycles = 1000000;
  bool ok = true;
  std::vector<CycleParameterEstimate> tau1(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int tau : taus) {
      const CycleChain cycle = build_cycle_chain(sc.source, sc.channel, j, tau);
      const double a = age_cost(cycle, sc.source.penalty(j));
      const double c = transmission_cost(cycle);
      const double d = duration(cycle, sc.source);
      const RowVector rho = transition_row(cycle);
      const std::uint64_t seed =
          20240529u + 7919u * static_cast<std::uint64_t>(j * 10 + tau);
      const CycleParameterEstimate est =
          estimate_cycle_parameters(sc.source, sc.channel, j, tau, cycles, seed);
      if (tau == 1) tau1[static_cast<size_t>(j)] = est;

      double worst_z = 0.0;
      std::string worst_name = "age";
      bool cell = true;
      auto check = [&](const std::string& name, double analytic,
                       double empirical, double se) {
        const double z = (empirical - analytic) / std::max(se, 1e-300);
        if (std::abs(z) > std::abs(worst_z)) {
          worst_z = z;
          worst_name = name;
        }
        if (std::abs(empirical - analytic) > 3.0 * se + 1e-9) {
          std::printf(
              "    j=%d tau=%d %s: analytic %.6f empirical %.6f se %.2e "
              "z=%+.2f OUTSIDE 3 SE\n",
              j + 1, tau, name.c_str(), analytic, empirical, se, z);
          cell = false;
        }
      };
      check("age", a, est.age_cost, est.age_cost_se);
      check("tx", c, est.tx_cost, est.tx_cost_se);
      check("dur", d, est.duration, est.duration_se);
      for (int i = 0; i < n; ++i)
        check("rho_" + std::to_string(i + 1), rho(i), est.rho[static_cast<size_t>(i)],
              est.rho_se[static_cast<size_t>(i)]);
      std::printf("  j=%d tau=%d  %d checks, worst |z| %.2f (%s)%s\n", j + 1,
                  tau, 3 + n, std::abs(worst_z), worst_name.c_str(),
                  cell ? "" : "  FAILED");
      ok = ok && cell;
    }
  }

  std::printf("  arbitration, sync dwell: empirical dwell versus both E[H_j] readings\n");
  for (int j = 0; j < n; ++j) {
    const CycleChain cycle = build_cycle_chain(sc.source, sc.channel, j, 1);
    const double excursion = ordinary_moment(cycle.dist, 1);
    const double qjj = sc.source.q()(j, j);
    const CycleParameterEstimate& est = tau1[static_cast<size_t>(j)];
    const double dwell = est.duration - excursion;
    std::printf(
        "    j=%d  dwell %.4f   1/(1-q_jj)=%.4f z=%+.2f   1/q_jj=%.4f z=%+.2f\n",
        j + 1, dwell, 1.0 / (1.0 - qjj),
        (dwell - 1.0 / (1.0 - qjj)) / est.duration_se, 1.0 / qjj,
        (dwell - 1.0 / qjj) / est.duration_se);
  }

  const Regime2Blocks alt =
      regime2_blocks(sc.source, sc.channel, 0, DeliveryAbsorption::kComplementScaled);
  const ColVector alt_sums =
      alt.tpts.rowwise().sum() + alt.apts.rowwise().sum();
  std::printf(
      "  arbitration, delivery absorption: complement-scaled rows are off by up "
      "to %.3f;\n    the source-hold rows are stochastic and back the rho and "
      "dur checks above\n",
      (alt_sums.array() - 1.0).abs().maxCoeff());

  {
    // The two split transcriptions only differ on the m > tau branch.
    const CycleChain cycle = build_cycle_chain(sc.source, sc.channel, 1, 2);
    const long long draws = 400000;
    RandomStream rng(777001);
    std::vector<long long> samples(static_cast<size_t>(draws));
    for (long long i = 0; i < draws; ++i)
      samples[static_cast<size_t>(i)] =
          drdph_sample(cycle.chain, rng).absorption_time;
    std::printf(
        "  arbitration, regime-2 moment tail (excursion j=2 tau=2, m > tau):\n");
    for (int m = 3; m <= 5; ++m) {
      double sum = 0.0;
      double sumsq = 0.0;
      for (long long t : samples) {
        double ff = 1.0;
        for (int r = 0; r < m; ++r) ff *= static_cast<double>(t - r);
        sum += ff;
        sumsq += ff * ff;
      }
      const double mean = sum / static_cast<double>(draws);
      const double se = std::sqrt(
          std::max(0.0, sumsq / static_cast<double>(draws) - mean * mean) /
          static_cast<double>(draws));
      const double split_m =
          factorial_moment(cycle.dist, m, MomentSeries::kSplitHighOrderM);
      const double split_tau =
          factorial_moment(cycle.dist, m, MomentSeries::kSplitHighOrderTau);
      std::printf(
          "    m=%d  split-m %.4f z=%+.2f   split-tau %.4f z=%+.2f   sampled "
          "%.4f +- %.4f\n",
          m, split_m, (mean - split_m) / se, split_tau, (mean - split_tau) / se,
          mean, se);
    }
  }
  return ok;
}

// 3. Policy iteration against full enumeration at tau_max = 8.
bool criterion_pi_optimality() {
  const Scenario sc = scenario_two();
  const SmdpParameters params = smdp_parameters(sc.source, sc.channel, 8);
  bool ok = true;
  for (double lambda : sc.lambda_grid) {
    const SolverResult pi = policy_iteration(params, lambda);
    const SolverResult ex = exhaustive_search(params, lambda);
    const double gap = std::abs(pi.gain - ex.gain);
    const bool pass = gap <= 1e-10;
    ok = ok && pass;
    std::printf("  lambda %-4g  pi %.12f %-10s exhaustive %.12f %-10s gap %.1e%s\n",
                lambda, pi.gain, policy_string(pi.policy.thresholds).c_str(),
                ex.gain, policy_string(ex.policy.thresholds).c_str(), gap,
                pass ? "" : "  MISMATCH");
  }
  return ok;
}

// 4. Dominance and limit behavior on full sweeps of both scenarios.
bool criterion_dominance() {
  bool ok = true;
  for (const Scenario& sc : {scenario_one(), scenario_two()}) {
    const SweepResult sweep = run_sweep(sc, SweepPolicySet{}, default_xi_grid());

    bool dominance = true;
    for (const SweepRow& row : sweep.rows) {
      if (!row.error.empty()) {
        std::printf("  %s lambda %g failed: %s\n", sc.name.c_str(), row.lambda,
                    row.error.c_str());
        dominance = false;
        continue;
      }
      if (row.smdp->gain > row.st->gain + 1e-12) {
        std::printf("  %s lambda %g: smdp_gain %.9f > st_gain %.9f\n",
                    sc.name.c_str(), row.lambda, row.smdp->gain, row.st->gain);
        dominance = false;
      }
    }
    std::printf("  %s: smdp_gain <= st_gain on all %d rows  %s\n",
                sc.name.c_str(), static_cast<int>(sweep.rows.size()),
                dominance ? "ok" : "VIOLATED");

    const SweepRow& r0 = sweep.rows.front();
    const std::vector<int>& t0 = r0.smdp->policy.thresholds;
    const bool all_ones =
        std::all_of(t0.begin(), t0.end(), [](int t) { return t == 1; });
    const bool st_one = r0.st->tau == 1;
    const bool rs_one = std::abs(r0.rs->xi - 1.0) < 1e-12;
    auto agree = [](double a, double ca, double b, double cb) {
      return std::abs(a - b) <= ca + cb;
    };
    const bool costs_agree =
        agree(r0.smdp->sim_cost, r0.smdp->sim_ci, r0.st->sim_cost,
              r0.st->sim_ci) &&
        agree(r0.smdp->sim_cost, r0.smdp->sim_ci, r0.rs->sim_cost,
              r0.rs->sim_ci) &&
        agree(r0.st->sim_cost, r0.st->sim_ci, r0.rs->sim_cost, r0.rs->sim_ci);
    std::printf(
        "  %s lambda=0: smdp %s all-ones=%s   st tau*=%d (%s)   rs xi*=%.2f "
        "(%s)\n",
        sc.name.c_str(), policy_string(t0).c_str(), all_ones ? "yes" : "NO",
        r0.st->tau, st_one ? "ok" : "NOT 1", r0.rs->xi, rs_one ? "ok" : "NOT 1");
    std::printf(
        "  %s lambda=0 costs: smdp %.4f+-%.4f  st %.4f+-%.4f  rs %.4f+-%.4f  "
        "agree=%s\n",
        sc.name.c_str(), r0.smdp->sim_cost, r0.smdp->sim_ci, r0.st->sim_cost,
        r0.st->sim_ci, r0.rs->sim_cost, r0.rs->sim_ci,
        costs_agree ? "yes" : "NO");
    if (!all_ones || !costs_agree) {
      std::printf(
          "    note: the tuned lambda=0 policy is cheaper than always "
          "transmitting here;\n    a delivery re-syncs the estimate into "
          "states with steeper penalties, so the\n    flattest-penalty state "
          "prefers to ride out the mismatch\n");
    }

    bool separated = false;
    double best_margin = -1e300;
    double best_lambda = 0.0;
    for (size_t i = 1; i + 1 < sweep.rows.size(); ++i) {
      const SweepRow& row = sweep.rows[i];
      if (!row.error.empty()) continue;
      const double margin = (row.rs->sim_cost - row.rs->sim_ci) -
                            (row.smdp->sim_cost + row.smdp->sim_ci);
      if (margin > best_margin) {
        best_margin = margin;
        best_lambda = row.lambda;
      }
      if (margin > 0.0) separated = true;
    }
    std::printf(
        "  %s: smdp beats rs beyond combined CIs at mid lambda=%g (margin "
        "%.4f)  %s\n",
        sc.name.c_str(), best_lambda, best_margin,
        separated ? "ok" : "NOT SEPARATED");

    ok = ok && dominance && all_ones && st_one && rs_one && costs_agree &&
         separated;
  }
  return ok;
}

// 5. Distribution suite over random dual-regime chains plus the degenerate
// reduction to a plain discrete phase-type law.
bool criterion_drdph_suite() {
  RandomStream rng(31001);
  bool ok = true;
  double worst_norm = 0.0;
  double worst_sigma = 0.0;
  double worst_moment = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int k1 = 1 + static_cast<int>(rng.next_u64() % 12);
    const int k2 = 1 + static_cast<int>(rng.next_u64() % 12);
    const int l = 1 + static_cast<int>(rng.next_u64() % 3);
    const int threshold = 1 + static_cast<int>(rng.next_u64() % 10);
    const DualRegimeChain chain = testing::random_chain(rng, k1, k2, l, threshold);
    const DrDphDistribution dist(chain);

    const testing::ForwardFlow flow = testing::forward_flow(chain, 128);
    double mass = flow.residual;
    for (long long t = 1; t <= 128; ++t) mass += drdph_pmf(dist, t);
    worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
    ok = ok && std::abs(mass - 1.0) <= 1e-10;

    const auto [sigma1, sigma2] = absorption_vectors(chain);
    const double total = sigma1.sum() + sigma2.sum();
    const double least = std::min(sigma1.minCoeff(), sigma2.minCoeff());
    worst_sigma = std::max(worst_sigma, std::abs(total - 1.0));
    ok = ok && std::abs(total - 1.0) <= 1e-10 && least >= -1e-10;

    for (int m = 1; m <= 4; ++m) {
      const double lib = ordinary_moment(dist, m);
      const double oracle = testing::truncated_expectation(
          chain, [m](long long t) {
            return std::pow(static_cast<double>(t), m);
          });
      const double rel = std::abs(lib - oracle) / std::max(1.0, std::abs(oracle));
      worst_moment = std::max(worst_moment, rel);
      ok = ok && rel <= 1e-8;
    }
  }
  std::printf(
      "  200 random chains: worst |pmf mass - 1| %.2e, worst |sigma sum - 1| "
      "%.2e,\n    worst moment error (m <= 4, relative) %.2e\n",
      worst_norm, worst_sigma, worst_moment);

  double worst_pmf = 0.0;
  double worst_degen_moment = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 8);
    const int threshold = 1 + static_cast<int>(rng.next_u64() % 10);
    RowVector beta(k);
    for (int i = 0; i < k; ++i) beta(i) = 0.05 + rng.next_double();
    beta /= beta.sum();
    Matrix a(k, k);
    for (int i = 0; i < k; ++i) {
      const double keep = 0.3 + 0.6 * rng.next_double();
      RowVector row(k);
      for (int c = 0; c < k; ++c) row(c) = 0.05 + rng.next_double();
      a.row(i) = keep * row / row.sum();
    }
    const Matrix b = Matrix::Ones(k, 1) - a * Matrix::Ones(k, 1);
    const DphDistribution plain(beta, a);
    const DualRegimeChain degen(beta, threshold, Matrix::Identity(k, k), a, a,
                                b, b);
    const DrDphDistribution dd(degen);
    for (long long t = 1; t <= 100; ++t) {
      const double gap = std::abs(drdph_pmf(dd, t) - dph_pmf(plain, t));
      worst_pmf = std::max(worst_pmf, gap);
      ok = ok && gap <= 1e-12;
    }
    const Matrix inv = inverse_i_minus(a);
    Matrix apow = Matrix::Identity(k, k);
    Matrix invpow = inv;
    double fact = 1.0;
    for (int m = 1; m <= 3; ++m) {
      fact *= m;
      const double truth = fact * (beta * apow * invpow).sum();
      const double lib = factorial_moment(dd, m);
      const double rel = std::abs(lib - truth) / std::max(1.0, std::abs(truth));
      worst_degen_moment = std::max(worst_degen_moment, rel);
      ok = ok && rel <= 1e-12;
      apow *= a;
      invpow *= inv;
    }
  }
  std::printf(
      "  50 degenerate chains: worst |pmf gap| %.2e, worst factorial-moment "
      "gap %.2e\n",
      worst_pmf, worst_degen_moment);
  return ok;
}

// 6. Gain from the evaluation system equals the stationary-weighted
// renewal-reward ratio.
bool criterion_renewal_reward() {
  RandomStream rng(6101);
  bool ok = true;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int tau_max = 1 + static_cast<int>(rng.next_u64() % 5);
    SmdpParameters params;
    params.num_states = n;
    params.tau_max = tau_max;
    params.age = Matrix(n, tau_max);
    params.tx = Matrix(n, tau_max);
    params.dur = Matrix(n, tau_max);
    params.rho.assign(static_cast<size_t>(n), Matrix(tau_max, n));
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < tau_max; ++t) {
        params.age(j, t) = 5.0 * rng.next_double();
        params.tx(j, t) = rng.next_double();
        params.dur(j, t) = 1.0 + 3.0 * rng.next_double();
        RowVector row(n);
        for (int i = 0; i < n; ++i) row(i) = 0.05 + rng.next_double();
        params.rho[static_cast<size_t>(j)].row(t) = row / row.sum();
      }
    }
    Policy policy;
    for (int j = 0; j < n; ++j)
      policy.thresholds.push_back(
          1 + static_cast<int>(rng.next_u64() % tau_max));
    const double lambda = 2.0 * rng.next_double();

    const auto [gain, bias] = policy_evaluate(params, lambda, policy);
    Matrix p(n, n);
    for (int j = 0; j < n; ++j)
      p.row(j) = params.transition_row(j, policy.thresholds[static_cast<size_t>(j)]);
    const RowVector pi = testing::stationary_row(p);
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
      const int tau = policy.thresholds[static_cast<size_t>(j)];
      num += pi(j) * (params.age_cost(j, tau) + lambda * params.tx_cost(j, tau));
      den += pi(j) * params.duration(j, tau);
    }
    const double gap = std::abs(gain - num / den);
    worst = std::max(worst, gap);
    ok = ok && gap <= 1e-10;
  }
  std::printf(
      "  100 random (params, policy, lambda) triples: worst |gain - renewal "
      "ratio| %.2e\n",
      worst);
  return ok;
}

// 7. The CLI sweep is bit-reproducible across runs.
bool criterion_reproducibility() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "aoii_acceptance_sweep";
  std::error_code ec;
  fs::remove_all(base, ec);
  std::vector<std::string> costs(2);
  std::vector<std::string> thresholds(2);
  bool ok = true;
  for (int run = 0; run < 2 && ok; ++run) {
    const fs::path dir = base / (run == 0 ? "a" : "b");
    fs::create_directories(dir);
    const std::string cmd =
        std::string("\"") + AOII_CLI_PATH +
        "\" sweep --scenario scenario2 --seed 20240521 --out \"" +
        dir.string() + "\" > \"" + (dir / "stdout.json").string() + "\" 2> \"" +
        (dir / "stderr.txt").string() + "\"";
    const int rc = std::system(cmd.c_str());
    if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
      std::printf("  sweep run %d did not exit cleanly (status %d)\n", run + 1,
                  rc);
      ok = false;
      break;
    }
    costs[static_cast<size_t>(run)] = slurp(dir / "scenario2_costs.csv");
    thresholds[static_cast<size_t>(run)] = slurp(dir / "scenario2_thresholds.csv");
    if (costs[static_cast<size_t>(run)].empty() ||
        thresholds[static_cast<size_t>(run)].empty()) {
      std::printf("  sweep run %d left empty or missing CSVs\n", run + 1);
      ok = false;
    }
  }
  if (ok) {
    const bool same = costs[0] == costs[1] && thresholds[0] == thresholds[1];
    std::printf(
        "  two cli sweep runs: costs %zu bytes, thresholds %zu bytes, "
        "byte-identical: %s\n",
        costs[0].size(), thresholds[0].size(), same ? "yes" : "NO");
    ok = same;
  }
  fs::remove_all(base, ec);
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    bool (*run)();
  };
  const Criterion criteria[] = {
      {"analytic/simulation agreement, scenario2", &criterion_agreement},
      {"cycle-parameter oracle, 10^6 cycles per cell", &criterion_cycle_oracle},
      {"policy iteration matches exhaustive search", &criterion_pi_optimality},
      {"dominance and lambda -> 0 limit", &criterion_dominance},
      {"dual-regime distribution suite", &criterion_drdph_suite},
      {"renewal-reward identity", &criterion_renewal_reward},
      {"cli sweep reproducibility", &criterion_reproducibility},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    std::printf("criterion %d: %s\n", index, criterion.label);
    std::fflush(stdout);
    bool passed = false;
    try {
      passed = criterion.run();
    } catch (const Error& e) {
      std::printf("  error %s: %s\n", error_code_name(e.code()), e.what());
    } catch (const std::exception& e) {
      std::printf("  error: %s\n", e.what());
    }
    std::printf("[%s] criterion %d: %s\n\n", passed ? "PASS" : "FAIL", index,
                criterion.label);
    std::fflush(stdout);
    failures += passed ? 0 : 1;
  }
  std::printf("acceptance: %d/%d criteria passed\n",
              static_cast<int>(std::size(criteria)) - failures,
              static_cast<int>(std::size(criteria)));
  return failures;
}
