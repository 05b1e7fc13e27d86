#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "sparsefix/prox.hpp"

namespace sparsefix {

using Matrix = Eigen::MatrixXd;

// Linear map R^in -> R^out with a matching adjoint. Operators are immutable
// after construction and safe for concurrent reads.
class LinearOp {
 public:
  virtual ~LinearOp() = default;

  Eigen::Index in_dim() const { return in_; }
  Eigen::Index out_dim() const { return out_; }

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

 protected:
  LinearOp(Eigen::Index out, Eigen::Index in) : out_(out), in_(in) {}

  virtual void apply_impl(const Vector& x, Vector& out) const = 0;
  virtual void adjoint_impl(const Vector& y, Vector& out) const = 0;

 private:
  Eigen::Index out_;
  Eigen::Index in_;
};

class DenseOp final : public LinearOp {
 public:
  explicit DenseOp(Matrix m);
  const Matrix& matrix() const { return m_; }

 private:
  void apply_impl(const Vector& x, Vector& out) const override;
  void adjoint_impl(const Vector& y, Vector& out) const override;
  Matrix m_;
};

class IdentityOp final : public LinearOp {
 public:
  explicit IdentityOp(Eigen::Index n) : LinearOp(n, n) {}

 private:
  void apply_impl(const Vector& x, Vector& out) const override { out = x; }
  void adjoint_impl(const Vector& y, Vector& out) const override { out = y; }
};

// Gram matrix of the Gaussian kernel exp(-||x_j - x_k||^2 / (2 sigma^2)).
// Symmetric with unit diagonal by construction.
DenseOp gaussian_kernel_matrix(const std::vector<Vector>& points, double sigma);

// 2-D correlation with a normalized motion-blur kernel: a length/angle line
// segment rasterized with anti-aliased weights max(0, 1 - dist), forced to
// 180-degree rotational symmetry and unit sum. Boundary handling is symmetric
// reflection without edge repeat (x[-1] = x[1]); the adjoint folds reflected
// contributions back so <Kx, y> = <x, K^T y> holds exactly.
class MotionBlurOp final : public LinearOp {
 public:
  MotionBlurOp(int img_w, int img_h, int length, double angle_deg);
  const Matrix& kernel() const { return kernel_; }

 private:
  void apply_impl(const Vector& x, Vector& out) const override;
  void adjoint_impl(const Vector& y, Vector& out) const override;

  int w_, h_;
  Matrix kernel_;  // odd-sized, centered
};

// Undecimated 2-D filter bank built from the orthonormal block-point DCT-II
// basis (block^2 separable filters, periodic extension, scaled by 1/block) so
// that D^T D = I holds exactly. Output is subband-major: block^2 planes of
// img_h x img_w coefficients.
class DctFrameletOp final : public LinearOp {
 public:
  DctFrameletOp(int img_w, int img_h, int block = 7);
  int block() const { return b_; }

 private:
  void apply_impl(const Vector& x, Vector& out) const override;
  void adjoint_impl(const Vector& y, Vector& out) const override;

  int w_, h_, b_;
  Matrix basis_;  // b x b, row k = k-th DCT-II filter scaled by 1/sqrt(b)
};

// Horizontal and vertical forward differences with periodic wrap, stacked
// [horizontal; vertical]. ||D||_2^2 <= 8.
class FirstDifferenceOp final : public LinearOp {
 public:
  FirstDifferenceOp(int img_w, int img_h);

 private:
  void apply_impl(const Vector& x, Vector& out) const override;
  void adjoint_impl(const Vector& y, Vector& out) const override;

  int w_, h_;
};

struct SpectralEstimate {
  double value = 0.0;
  bool converged = false;
};

// Power iteration on op^T op from a fixed-seed (0) random start. Returns the
// square root of the dominant eigenvalue once the relative change between
// iterates drops below tol, or the best estimate with converged=false.
SpectralEstimate estimate_spectral_norm(const LinearOp& op, double tol = 1e-9,
                                        int max_iter = 10000);

}  // namespace sparsefix
