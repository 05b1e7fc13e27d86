#pragma once

#include <Eigen/Core>

#include "sparsefix/rng.hpp"

namespace testutil {

inline Eigen::VectorXd random_vector(sparsefix::SplitMix64& rng, Eigen::Index n,
                                     double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.next_gaussian();
  return v;
}

inline Eigen::MatrixXd random_matrix(sparsefix::SplitMix64& rng, Eigen::Index r,
                                     Eigen::Index c, double scale = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * rng.next_gaussian();
  return m;
}

inline Eigen::VectorXd random_uniform_vector(sparsefix::SplitMix64& rng, Eigen::Index n,
                                             double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.next_uniform();
  return v;
}

}  // namespace testutil
