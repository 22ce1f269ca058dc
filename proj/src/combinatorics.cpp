#include "aoii/combinatorics.hpp"

#include <string>
#include <vector>

#include "aoii/errors.hpp"

namespace aoii {

BigInt stirling2(int m, int r) {
  if (r < 0 || m < 0 || r > m || m > 64) {
    fail(ErrorCode::kArgumentOutOfRange,
         "stirling2 requires 0 <= r <= m <= 64, got m=" + std::to_string(m) +
             " r=" + std::to_string(r));
  }
  if (m == 0) return 1;  // S(0,0)
  if (r == 0) return 0;
  // Row-by-row recurrence S(m,r) = r S(m-1,r) + S(m-1,r-1).
  std::vector<BigInt> row(static_cast<size_t>(m) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= m; ++i) {
    for (int j = i; j >= 1; --j) row[j] = j * row[j] + row[j - 1];
    row[0] = 0;
  }
  return row[r];
}

BigInt falling_factorial(long long t, int m) {
  if (m < 0) {
    fail(ErrorCode::kArgumentOutOfRange,
         "falling_factorial requires m >= 0, got m=" + std::to_string(m));
  }
  BigInt out = 1;
  for (int i = 0; i < m; ++i) out *= BigInt(t - i);
  return out;
}

BigInt binomial(int n, int k) {
  if (n < 0 || k < 0) {
    fail(ErrorCode::kArgumentOutOfRange,
         "binomial requires n, k >= 0, got n=" + std::to_string(n) +
             " k=" + std::to_string(k));
  }
  if (k > n) return 0;
  BigInt out = 1;
  for (int i = 1; i <= k; ++i) {
    out *= BigInt(n - k + i);
    out /= i;
  }
  return out;
}

double stirling2_d(int m, int r) { return stirling2(m, r).convert_to<double>(); }

double falling_factorial_d(long long t, int m) {
  return falling_factorial(t, m).convert_to<double>();
}

double binomial_d(int n, int k) { return binomial(n, k).convert_to<double>(); }

}  // namespace aoii
