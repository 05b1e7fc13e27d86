#include "sparsefix/fidelity.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsefix {

namespace {
constexpr double kPoissonFloor = 1e-12;

void check_dim(const Vector& z, Eigen::Index expected, const char* who) {
  if (z.size() != expected) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}
}  // namespace

Fidelity::Fidelity(FidelityKind kind, Vector anchor)
    : kind_(kind), anchor_(std::move(anchor)) {
  if (kind_ == FidelityKind::PoissonKL) {
    for (Eigen::Index i = 0; i < anchor_.size(); ++i) {
      if (anchor_[i] < 0.0) {
        throw std::invalid_argument("poisson_kl: anchor entries must be >= 0");
      }
    }
  }
}

Fidelity Fidelity::squared_loss(Vector anchor) {
  return Fidelity(FidelityKind::SquaredLoss, std::move(anchor));
}
Fidelity Fidelity::squared_hinge(Vector anchor) {
  return Fidelity(FidelityKind::SquaredHinge, std::move(anchor));
}
Fidelity Fidelity::poisson_kl(Vector anchor) {
  return Fidelity(FidelityKind::PoissonKL, std::move(anchor));
}

double Fidelity::value(const Vector& z) const {
  check_dim(z, anchor_.size(), "psi_value");
  switch (kind_) {
    case FidelityKind::SquaredLoss:
      return 0.5 * (z - anchor_).squaredNorm();
    case FidelityKind::SquaredHinge: {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        double m = 1.0 - z[j];
        if (m > 0.0) acc += m * m;
      }
      return 0.5 * acc;
    }
    case FidelityKind::PoissonKL: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] <= 0.0) {
          throw std::domain_error("poisson_kl: psi requires z > 0");
        }
        acc += z[i] - anchor_[i] * std::log(z[i]);
      }
      return acc;
    }
  }
  return 0.0;
}

Vector Fidelity::gradient(const Vector& z) const {
  check_dim(z, anchor_.size(), "psi_gradient");
  Vector g(z.size());
  switch (kind_) {
    case FidelityKind::SquaredLoss:
      g = z - anchor_;
      break;
    case FidelityKind::SquaredHinge:
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        double m = 1.0 - z[j];
        g[j] = m > 0.0 ? -m : 0.0;
      }
      break;
    case FidelityKind::PoissonKL:
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] <= 0.0) {
          throw std::domain_error("poisson_kl: gradient requires z > 0");
        }
        g[i] = 1.0 - anchor_[i] / z[i];
      }
      break;
  }
  return g;
}

Vector Fidelity::resolvent(const Vector& z, double q) const {
  if (!(q > 0.0)) throw std::invalid_argument("psi_resolvent: q must be positive");
  check_dim(z, anchor_.size(), "psi_resolvent");
  Vector w(z.size());
  switch (kind_) {
    case FidelityKind::SquaredLoss:
      w = (z + q * anchor_) / (1.0 + q);
      break;
    case FidelityKind::SquaredHinge:
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        w[j] = z[j] >= 1.0 ? z[j] : (z[j] + q) / (1.0 + q);
      }
      break;
    case FidelityKind::PoissonKL:
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        // positive root of w^2 + (q - z) w - q a = 0
        double half = 0.5 * (z[i] - q);
        double root = half + std::sqrt(half * half + q * anchor_[i]);
        w[i] = root > kPoissonFloor ? root : kPoissonFloor;
      }
      break;
  }
  return w;
}

}  // namespace sparsefix
