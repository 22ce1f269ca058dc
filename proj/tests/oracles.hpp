#pragma once

// Test-side oracles, written before the library implementations they check
// and kept independent of them: the distribution oracle pushes probability
// mass forward slot by slot instead of using closed forms, the partition
// oracle counts restricted growth strings, and the stationary oracle uses a
// QR least-squares solve rather than the solver's LU path.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "aoii/dr_dph.hpp"
#include "aoii/rng.hpp"
#include "aoii/stochastic.hpp"

namespace aoii::testing {

// Number of partitions of {1..m} into exactly r nonempty blocks, by
// enumerating restricted growth strings. Practical for m <= 10.
inline long long brute_partition_count(int m, int r) {
  if (m == 0) return r == 0 ? 1 : 0;
  long long count = 0;
  std::vector<int> assign(static_cast<size_t>(m), 0);
  std::function<void(int, int)> rec = [&](int pos, int blocks) {
    if (pos == m) {
      if (blocks == r) ++count;
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      assign[static_cast<size_t>(pos)] = b;
      rec(pos + 1, b == blocks ? blocks + 1 : blocks);
    }
  };
  rec(0, 0);
  return count;
}

// Forward mass propagation through the dual-regime chain. pmf[t] for
// t = 1..T and the residual transient mass after T slots.
struct ForwardFlow {
  std::vector<double> pmf;  // pmf[t], index 0 unused
  double residual = 1.0;
};

inline ForwardFlow forward_flow(const DualRegimeChain& chain, long long t_max) {
  ForwardFlow out;
  out.pmf.assign(static_cast<size_t>(t_max) + 1, 0.0);
  RowVector v = chain.ipv1;
  const ColVector ones1 = ColVector::Ones(chain.regime1_order());
  const ColVector ones2 = ColVector::Ones(chain.regime2_order());
  const ColVector a1 = ones1 - chain.tpts1.entries() * ones1;
  const ColVector a2 = ones2 - chain.tpts2.entries() * ones2;
  bool in_regime2 = chain.threshold == 1;
  if (in_regime2) v = v * chain.btm;
  for (long long t = 1; t <= t_max; ++t) {
    if (in_regime2) {
      out.pmf[static_cast<size_t>(t)] = v.dot(a2);
      v = v * chain.tpts2.entries();
    } else {
      out.pmf[static_cast<size_t>(t)] = v.dot(a1);
      v = v * chain.tpts1.entries();
      if (t + 1 == chain.threshold) {
        v = v * chain.btm;
        in_regime2 = true;
      }
    }
  }
  out.residual = v.sum();
  return out;
}

// E[g(T)] by truncated summation, extending the horizon until the transient
// tail cannot move the result at 1e-12 relative even when weighted by t^10.
inline double truncated_expectation(const DualRegimeChain& chain,
                                    const std::function<double(long long)>& g) {
  long long t_max = 256;
  for (;;) {
    ForwardFlow flow = forward_flow(chain, t_max);
    double acc = 0.0;
    for (long long t = 1; t <= t_max; ++t)
      acc += flow.pmf[static_cast<size_t>(t)] * g(t);
    const double guard =
        flow.residual * std::pow(static_cast<double>(t_max), 10);
    if (guard < 1e-12 * std::max(1.0, std::abs(acc)) || t_max > (1 << 22)) {
      return acc;
    }
    t_max *= 2;
  }
}

// E[sum_{t=1}^{T} f(t)] by the same truncation.
inline double truncated_penalty_sum(const DualRegimeChain& chain,
                                    const std::function<double(long long)>& f) {
  long long t_max = 256;
  for (;;) {
    ForwardFlow flow = forward_flow(chain, t_max);
    double acc = 0.0;
    double inner = 0.0;
    for (long long t = 1; t <= t_max; ++t) {
      inner += f(t);
      acc += flow.pmf[static_cast<size_t>(t)] * inner;
    }
    const double guard =
        flow.residual * std::pow(static_cast<double>(t_max), 10);
    if (guard < 1e-12 * std::max(1.0, std::abs(acc)) || t_max > (1 << 22)) {
      return acc;
    }
    t_max *= 2;
  }
}

// Random valid dual-regime chain. Every [A|B] row leaks at least 10% to the
// absorbing states, so both spectral radii stay below 0.9.
inline DualRegimeChain random_chain(RandomStream& rng, int k1, int k2, int l,
                                    int threshold) {
  auto random_simplex = [&rng](int n) {
    RowVector v(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      v(i) = 0.05 + rng.next_double();
      total += v(i);
    }
    v /= total;
    return v;
  };
  RowVector ipv1 = random_simplex(k1);
  Matrix btm(k1, k2);
  for (int i = 0; i < k1; ++i) btm.row(i) = random_simplex(k2);
  auto random_block = [&](int rows, int cols_t) {
    const double keep = 0.3 + 0.6 * rng.next_double();
    Matrix t(rows, cols_t);
    Matrix b(rows, l);
    for (int i = 0; i < rows; ++i) {
      RowVector tr = random_simplex(cols_t);
      RowVector br = random_simplex(l);
      t.row(i) = keep * tr;
      b.row(i) = (1.0 - keep) * br;
    }
    return std::pair<Matrix, Matrix>(t, b);
  };
  auto [a1, b1] = random_block(k1, k1);
  auto [a2, b2] = random_block(k2, k2);
  return DualRegimeChain(ipv1, threshold, btm, a1, a2, b1, b2);
}

// Stationary row of an irreducible stochastic matrix by least squares on
// [P^T - I; 1^T] x = [0; 1].
inline RowVector stationary_row(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  Matrix sys(n + 1, n);
  sys.topRows(n) = p.transpose() - Matrix::Identity(n, n);
  sys.bottomRows(1) = RowVector::Ones(n);
  ColVector rhs = ColVector::Zero(n + 1);
  rhs(n) = 1.0;
  ColVector pi = sys.colPivHouseholderQr().solve(rhs);
  return pi.transpose();
}

}  // namespace aoii::testing
