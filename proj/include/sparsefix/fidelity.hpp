#pragma once

#include <Eigen/Core>

#include "sparsefix/prox.hpp"

namespace sparsefix {

enum class FidelityKind { SquaredLoss, SquaredHinge, PoissonKL };

// Smooth convex data-fit term psi with a closed-form resolvent (I + q*grad)^-1.
//
//   squared_loss:  psi(z) = 1/2 ||z - a||^2
//   squared_hinge: psi(z) = 1/2 sum_j max(1 - z_j, 0)^2   (anchor kept for dims)
//   poisson_kl:    psi(z) = <z, 1> - <ln z, a>,  domain z > 0, anchor a >= 0
class Fidelity {
 public:
  static Fidelity squared_loss(Vector anchor);
  static Fidelity squared_hinge(Vector anchor);
  static Fidelity poisson_kl(Vector anchor);

  double value(const Vector& z) const;
  Vector gradient(const Vector& z) const;

  // The unique w with w + q * gradient(w) = z, componentwise. For poisson_kl
  // with anchor_i = 0 the limit is max(z_i - q, 0), floored at 1e-12 so the
  // iterate stays inside the domain of ln.
  Vector resolvent(const Vector& z, double q) const;

  FidelityKind kind() const { return kind_; }
  const Vector& anchor() const { return anchor_; }
  Eigen::Index dim() const { return anchor_.size(); }

 private:
  Fidelity(FidelityKind kind, Vector anchor);

  FidelityKind kind_;
  Vector anchor_;
};

}  // namespace sparsefix
