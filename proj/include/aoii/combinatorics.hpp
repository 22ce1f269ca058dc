#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace aoii {

using BigInt = boost::multiprecision::cpp_int;

// Stirling number of the second kind S(m, r): the number of partitions of an
// m-set into r nonempty blocks. Exact for 0 <= r <= m <= 64; out-of-range
// arguments raise ArgumentOutOfRange.
BigInt stirling2(int m, int r);

// Falling factorial t^(m) = t (t-1) ... (t-m+1); the empty product (m = 0)
// is 1. Requires m >= 0.
BigInt falling_factorial(long long t, int m);

BigInt binomial(int n, int k);

double stirling2_d(int m, int r);
double falling_factorial_d(long long t, int m);
double binomial_d(int n, int k);

}  // namespace aoii
