#pragma once

#include <vector>

namespace aoii {

// Polynomial with nonnegative-degree real coefficients, lowest degree first:
// p(t) = coeffs[0] + coeffs[1] t + ... + coeffs[K] t^K.
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

  int degree() const {
    int d = static_cast<int>(coeffs.size()) - 1;
    while (d > 0 && coeffs[static_cast<size_t>(d)] == 0.0) --d;
    return d < 0 ? 0 : d;
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (size_t k = coeffs.size(); k-- > 0;) acc = acc * t + coeffs[k];
    return acc;
  }
};

}  // namespace aoii
