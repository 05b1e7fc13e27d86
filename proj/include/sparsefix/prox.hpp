#pragma once

#include <Eigen/Core>
#include <vector>

namespace sparsefix {

using Vector = Eigen::VectorXd;

// Sorted, duplicate-free 0-based indices of nonzero entries.
using SupportSet = std::vector<Eigen::Index>;

// Hard thresholding: componentwise minimizer of (1/2t)(x - u_i)^2 + |x|_0.
// Entries with |u_i| > sqrt(2t) survive, everything else becomes exactly 0.
// At |u_i| = sqrt(2t) the minimizer set is {u_i, 0}; this returns 0.
Vector hard_threshold(const Vector& u, double t);

// Soft thresholding: componentwise sign(y_i) * max(|y_i| - s, 0).
Vector soft_threshold(const Vector& y, double s);

// Indices of entries that are exactly nonzero. Exact comparison is intended:
// hard_threshold writes literal zeros.
SupportSet support(const Vector& x);

int nnz(const Vector& x);

// Keep the entries indexed by `keep`, zero the rest.
Vector project_support(const Vector& x, const SupportSet& keep);

}  // namespace sparsefix
