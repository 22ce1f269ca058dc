#pragma once

#include <utility>

#include "aoii/polynomial.hpp"
#include "aoii/stochastic.hpp"

namespace aoii {

// Dual-regime absorbing Markov chain. The chain starts in regime 1 (order K1,
// initial row ipv1, transient block tpts1, absorbing block apts1). If it is
// still transient after threshold - 1 steps it is relabeled into regime 2
// through the row-stochastic bridge btm (K1 x K2, no time advance) and then
// evolves with (tpts2, apts2). Both [tpts|apts] blocks have exactly
// row-stochastic rows and both transient blocks have spectral radius < 1.
struct DualRegimeChain {
  RowVector ipv1;
  int threshold;
  Matrix btm;
  SubStochasticMatrix tpts1;
  SubStochasticMatrix tpts2;
  Matrix apts1;
  Matrix apts2;

  DualRegimeChain(RowVector ipv1_in, int threshold_in, Matrix btm_in,
                  Matrix tpts1_in, Matrix tpts2_in, Matrix apts1_in,
                  Matrix apts2_in);

  int regime1_order() const { return static_cast<int>(ipv1.size()); }
  int regime2_order() const { return static_cast<int>(btm.cols()); }
  int absorbing_count() const { return static_cast<int>(apts1.cols()); }
};

// Distribution view of the chain: absorption time T on {1, 2, ...} with the
// regime-2 entry row ipv2 = ipv1 tpts1^{threshold-1} btm cached at
// construction.
struct DrDphDistribution {
  RowVector ipv1;
  int threshold;
  Matrix btm;
  SubStochasticMatrix tpts1;
  SubStochasticMatrix tpts2;
  RowVector ipv2;

  explicit DrDphDistribution(const DualRegimeChain& chain);
};

// ipv1 tpts1^{threshold-1} btm, the (defective) regime-2 entry row.
RowVector regime2_ipv(const DualRegimeChain& chain);

// P(T = t).
double drdph_pmf(const DrDphDistribution& d, long long t);

// Absorption split by regime: sigma1(l) is the probability of absorbing into
// state l before the regime switch, sigma2(l) after it. sigma1 + sigma2 is a
// probability row summing to 1.
std::pair<RowVector, RowVector> absorption_vectors(const DualRegimeChain& chain);

// Closed forms for the regime-2 tail of the factorial moment. kUnified is the
// reindexed single series valid for every order m and is the default; the two
// split forms are alternative transcriptions of the high-order tail kept for
// numerical comparison (see the moment tests), differing in which base feeds
// the falling factorial that multiplies the geometric part.
enum class MomentSeries { kUnified, kSplitHighOrderM, kSplitHighOrderTau };

// m-th factorial moment E[T (T-1) ... (T-m+1)], 0 <= m <= 10.
double factorial_moment(const DrDphDistribution& d, int m,
                        MomentSeries series = MomentSeries::kUnified);

// m-th ordinary moment E[T^m] via Stirling expansion.
double ordinary_moment(const DrDphDistribution& d, int m);

// E[sum_{t=1}^{T} f(t)] for a polynomial f of degree <= 8.
double expected_penalty_sum(const DrDphDistribution& d, const Polynomial& f);

struct DrDphSampleResult {
  long long absorption_time;
  int absorbing_state;
  long long regime2_slots;  // draws taken under [tpts2|apts2]
};

DrDphSampleResult drdph_sample(const DualRegimeChain& chain, RandomStream& rng);

}  // namespace aoii
