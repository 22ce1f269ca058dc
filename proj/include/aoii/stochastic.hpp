#pragma once

#include <Eigen/Dense>

#include "aoii/errors.hpp"
#include "aoii/rng.hpp"

namespace aoii {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using ColVector = Eigen::VectorXd;

// Validation tolerance for probability inputs.
inline constexpr double kProbabilityTol = 1e-12;
// Tolerance for internally derived quantities (row sums of assembled blocks,
// complements, cross-checked identities).
inline constexpr double kDerivedTol = 1e-10;
// Reciprocal-condition floor below which a dense LU solve is rejected.
inline constexpr double kRcondFloor = 1e-12;

Matrix kron(const Matrix& a, const Matrix& b);

// Row-stochastic matrix: entries nonnegative, every row sums to 1 within
// kProbabilityTol. Errors name the offending entry or row.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Substochastic matrix with spectral radius strictly below 1, so that
// (I - A)^{-1} = sum_k A^k exists. The radius condition is certified by a
// conditioning check on I - A plus a repeated-squaring probe on the row sums
// of A^(2^k); a matrix whose probe never drops below 1 is rejected.
class SubStochasticMatrix {
 public:
  explicit SubStochasticMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

StochasticMatrix validate_stochastic(const Matrix& entries);
SubStochasticMatrix validate_substochastic(const Matrix& entries);

// (I - A)^{-1} by dense un-pivoted-free LU; rejects reciprocal condition
// estimates below kRcondFloor.
Matrix inverse_i_minus(const Matrix& a);

// Discrete phase-type distribution (beta, A) on {1, 2, ...} with
// pmf(t) = beta A^{t-1} (1 - A 1).
struct DphDistribution {
  RowVector ipv;             // beta
  SubStochasticMatrix tpts;  // A
  ColVector absorption;      // 1 - A 1

  DphDistribution(RowVector ipv_in, Matrix tpts_in);

  int order() const { return static_cast<int>(ipv.size()); }
};

double dph_pmf(const DphDistribution& d, long long t);
long long dph_sample(const DphDistribution& d, RandomStream& rng);

}  // namespace aoii
