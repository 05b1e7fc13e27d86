#pragma once

#include <cmath>

namespace sparsefix {

// Summable inner-loop error bound e^{k+1} := M / k^exponent, exponent > 1.
struct ErrorSequence {
  double scale = 1e16;
  double exponent = 2.0;

  static ErrorSequence inverse_square(double m) { return {m, 2.0}; }
  static ErrorSequence inverse_power(double m, double expo = 1.01) {
    return {m, expo};
  }

  // Bound used while computing step k+1 from step k (outer index k >= 1).
  double at(int k) const { return scale / std::pow(static_cast<double>(k), exponent); }
};

}  // namespace sparsefix
