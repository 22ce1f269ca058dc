#include "aoii/stochastic.hpp"

#include <cmath>
#include <string>

namespace aoii {

namespace {

void check_finite_nonnegative(const Matrix& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v)) {
        fail(ErrorCode::kValidationFailure,
             std::string(what) + " entry (" + std::to_string(i) + "," +
                 std::to_string(j) + ") is not finite");
      }
      if (v < 0.0) {
        fail(ErrorCode::kNegativeEntry,
             std::string(what) + " entry (" + std::to_string(i) + "," +
                 std::to_string(j) + ") = " + std::to_string(v) +
                 " is negative");
      }
    }
  }
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    fail(ErrorCode::kValidationFailure,
         std::string(what) + " must be square and nonempty, got " +
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

StochasticMatrix::StochasticMatrix(Matrix entries) : entries_(std::move(entries)) {
  check_square(entries_, "stochastic matrix");
  check_finite_nonnegative(entries_, "stochastic matrix");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    const double s = entries_.row(i).sum();
    if (std::abs(s - 1.0) > kProbabilityTol) {
      fail(ErrorCode::kRowSumViolation,
           "stochastic matrix row " + std::to_string(i) + " sums to " +
               std::to_string(s) + ", expected 1");
    }
  }
}

SubStochasticMatrix::SubStochasticMatrix(Matrix entries)
    : entries_(std::move(entries)) {
  check_square(entries_, "substochastic matrix");
  check_finite_nonnegative(entries_, "substochastic matrix");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    const double s = entries_.row(i).sum();
    if (s > 1.0 + kProbabilityTol) {
      fail(ErrorCode::kRowSumViolation,
           "substochastic matrix row " + std::to_string(i) + " sums to " +
               std::to_string(s) + ", expected <= 1");
    }
  }

  const Eigen::Index n = entries_.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> lu(eye - entries_);
  if (lu.rcond() < kRcondFloor) {
    fail(ErrorCode::kNotStrictlySubstochastic,
         "I - A is numerically singular (rcond below " +
             std::to_string(kRcondFloor) + "); spectral radius is not "
             "strictly below 1");
  }
  // Repeated squaring: row sums of A^(2^k) below 1 - 1e-9 certify that the
  // spectral radius of A is strictly below 1. A matrix with radius 1 keeps a
  // row sum at (or blows up past) 1 forever.
  Matrix probe = entries_;
  bool certified = false;
  for (int k = 0; k < 64; ++k) {
    const double worst = (probe * ColVector::Ones(n)).maxCoeff();
    if (!std::isfinite(worst)) break;
    if (worst < 1.0 - 1e-9) {
      certified = true;
      break;
    }
    probe = probe * probe;
  }
  if (!certified) {
    fail(ErrorCode::kNotStrictlySubstochastic,
         "substochastic matrix has spectral radius >= 1: A^(2^k) row sums "
         "never drop below 1");
  }
}

StochasticMatrix validate_stochastic(const Matrix& entries) {
  return StochasticMatrix(entries);
}

SubStochasticMatrix validate_substochastic(const Matrix& entries) {
  return SubStochasticMatrix(entries);
}

Matrix inverse_i_minus(const Matrix& a) {
  check_square(a, "matrix");
  const Eigen::Index n = a.rows();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - a);
  if (lu.rcond() < kRcondFloor) {
    fail(ErrorCode::kSingularMatrix,
         "I - A is numerically singular (rcond = " + std::to_string(lu.rcond()) +
             ")");
  }
  return lu.inverse();
}

DphDistribution::DphDistribution(RowVector ipv_in, Matrix tpts_in)
    : ipv(std::move(ipv_in)), tpts(std::move(tpts_in)), absorption() {
  if (ipv.size() != tpts.size()) {
    fail(ErrorCode::kValidationFailure,
         "initial vector length " + std::to_string(ipv.size()) +
             " does not match transient matrix order " +
             std::to_string(tpts.size()));
  }
  for (Eigen::Index i = 0; i < ipv.size(); ++i) {
    if (ipv(i) < 0.0) {
      fail(ErrorCode::kNegativeEntry, "initial vector entry " +
                                          std::to_string(i) + " = " +
                                          std::to_string(ipv(i)) +
                                          " is negative");
    }
  }
  const double s = ipv.sum();
  if (std::abs(s - 1.0) > kProbabilityTol) {
    fail(ErrorCode::kRowSumViolation,
         "initial vector sums to " + std::to_string(s) + ", expected 1");
  }
  absorption = ColVector::Ones(tpts.size()) - tpts.entries() * ColVector::Ones(tpts.size());
  for (Eigen::Index i = 0; i < absorption.size(); ++i) {
    if (absorption(i) < -kProbabilityTol || absorption(i) > 1.0 + kProbabilityTol) {
      fail(ErrorCode::kRowSumViolation,
           "absorption probability from phase " + std::to_string(i) + " is " +
               std::to_string(absorption(i)));
    }
    if (absorption(i) < 0.0) absorption(i) = 0.0;
  }
}

double dph_pmf(const DphDistribution& d, long long t) {
  if (t < 1) {
    fail(ErrorCode::kArgumentOutOfRange,
         "dph_pmf requires t >= 1, got t=" + std::to_string(t));
  }
  RowVector row = d.ipv;
  for (long long s = 1; s < t; ++s) row = row * d.tpts.entries();
  return row.dot(d.absorption);
}

long long dph_sample(const DphDistribution& d, RandomStream& rng) {
  const Matrix& a = d.tpts.entries();
  const int order = d.order();
  int phase = rng.categorical(d.ipv);
  long long t = 1;
  for (;;) {
    // Combined categorical over [A(phase,:) | absorption(phase)]; rounding
    // slack falls on the last positive cell, as in RandomStream::categorical.
    const double u = rng.next_double();
    double cum = 0.0;
    int pick = -1;
    int last_positive = -1;
    for (int l = 0; l < order; ++l) {
      const double p = a(phase, l);
      if (p > 0.0) {
        last_positive = l;
        cum += p;
        if (u < cum) {
          pick = l;
          break;
        }
      }
    }
    if (pick < 0 && d.absorption(phase) > 0.0) {
      last_positive = order;
      cum += d.absorption(phase);
      if (u < cum) pick = order;
    }
    if (pick < 0) pick = last_positive;
    if (pick < 0 || pick == order) return t;
    phase = pick;
    ++t;
  }
}

}  // namespace aoii
