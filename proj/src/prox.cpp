#include "sparsefix/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsefix {

Vector hard_threshold(const Vector& u, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("hard_threshold: t must be positive");
  const double thresh = std::sqrt(2.0 * t);
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    out[i] = std::abs(u[i]) > thresh ? u[i] : 0.0;
  }
  return out;
}

Vector soft_threshold(const Vector& y, double s) {
  if (s < 0.0) throw std::invalid_argument("soft_threshold: s must be nonnegative");
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double mag = std::abs(y[i]) - s;
    out[i] = mag > 0.0 ? (y[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

SupportSet support(const Vector& x) {
  SupportSet s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) s.push_back(i);
  }
  return s;
}

int nnz(const Vector& x) {
  int count = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) ++count;
  }
  return count;
}

Vector project_support(const Vector& x, const SupportSet& keep) {
  Vector out = Vector::Zero(x.size());
  for (Eigen::Index i : keep) {
    if (i < 0 || i >= x.size()) {
      throw std::invalid_argument("project_support: index out of range");
    }
    out[i] = x[i];
  }
  return out;
}

}  // namespace sparsefix
