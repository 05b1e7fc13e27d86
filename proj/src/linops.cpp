#include "sparsefix/linops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsefix/rng.hpp"

namespace sparsefix {

Vector LinearOp::apply(const Vector& x) const {
  if (x.size() != in_) throw std::invalid_argument("LinearOp::apply: dimension mismatch");
  Vector out(out_);
  apply_impl(x, out);
  return out;
}

Vector LinearOp::adjoint(const Vector& y) const {
  if (y.size() != out_) throw std::invalid_argument("LinearOp::adjoint: dimension mismatch");
  Vector out(in_);
  adjoint_impl(y, out);
  return out;
}

DenseOp::DenseOp(Matrix m) : LinearOp(m.rows(), m.cols()), m_(std::move(m)) {}

void DenseOp::apply_impl(const Vector& x, Vector& out) const { out.noalias() = m_ * x; }
void DenseOp::adjoint_impl(const Vector& y, Vector& out) const {
  out.noalias() = m_.transpose() * y;
}

DenseOp gaussian_kernel_matrix(const std::vector<Vector>& points, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel_matrix: sigma must be positive");
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  Eigen::Index d = m > 0 ? points.front().size() : 0;
  for (const Vector& pt : points) {
    if (pt.size() != d) {
      throw std::invalid_argument("gaussian_kernel_matrix: points have mixed dimensions");
    }
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Matrix k(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      double v = std::exp(-(points[i] - points[j]).squaredNorm() * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return DenseOp(std::move(k));
}

namespace {

// Whole-sample reflection: index -1 maps to 1, n maps to n-2.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    else i = 2 * n - 2 - i;
  }
  return i;
}

inline int wrap_index(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

Matrix build_motion_kernel(int length, double angle_deg) {
  const double half = 0.5 * (length - 1);
  const double rad = angle_deg * (3.14159265358979323846 / 180.0);
  const double cx = std::cos(rad);
  const double cy = std::sin(rad);
  const int radius = static_cast<int>(std::ceil(half)) + 1;
  const int size = 2 * radius + 1;

  Matrix k = Matrix::Zero(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      // cell center in kernel coordinates, y pointing up
      double x = c - radius;
      double y = radius - r;
      double t = std::clamp(x * cx + y * cy, -half, half);
      double dist = std::hypot(x - t * cx, y - t * cy);
      k(r, c) = std::max(0.0, 1.0 - dist);
    }
  }

  // force 180-degree rotational symmetry
  Matrix sym = 0.5 * (k + k.reverse().eval());
  k = sym;

  // trim all-zero border rows/columns, keeping the kernel odd and centered
  int trim = 0;
  while (trim < radius) {
    double edge = k.row(trim).lpNorm<1>() + k.row(size - 1 - trim).lpNorm<1>() +
                  k.col(trim).lpNorm<1>() + k.col(size - 1 - trim).lpNorm<1>();
    if (edge > 0.0) break;
    ++trim;
  }
  if (trim > 0) {
    k = k.block(trim, trim, size - 2 * trim, size - 2 * trim).eval();
  }

  double total = k.sum();
  k /= total;
  return k;
}

}  // namespace

MotionBlurOp::MotionBlurOp(int img_w, int img_h, int length, double angle_deg)
    : LinearOp(static_cast<Eigen::Index>(img_w) * img_h,
               static_cast<Eigen::Index>(img_w) * img_h),
      w_(img_w),
      h_(img_h) {
  if (length < 1) throw std::invalid_argument("motion_blur_operator: length must be >= 1");
  if (angle_deg < 0.0 || angle_deg >= 360.0) {
    throw std::invalid_argument("motion_blur_operator: angle must be in [0, 360)");
  }
  if (length > std::min(img_w, img_h)) {
    throw std::invalid_argument("motion_blur_operator: length exceeds image dimensions");
  }
  kernel_ = build_motion_kernel(length, angle_deg);
}

void MotionBlurOp::apply_impl(const Vector& x, Vector& out) const {
  const int kh = static_cast<int>(kernel_.rows());
  const int kw = static_cast<int>(kernel_.cols());
  const int cr = kh / 2;
  const int cc = kw / 2;
  for (int r = 0; r < h_; ++r) {
    for (int c = 0; c < w_; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kh; ++i) {
        int rr = reflect_index(r + i - cr, h_);
        for (int j = 0; j < kw; ++j) {
          int ccol = reflect_index(c + j - cc, w_);
          acc += kernel_(i, j) * x[static_cast<Eigen::Index>(rr) * w_ + ccol];
        }
      }
      out[static_cast<Eigen::Index>(r) * w_ + c] = acc;
    }
  }
}

void MotionBlurOp::adjoint_impl(const Vector& y, Vector& out) const {
  const int kh = static_cast<int>(kernel_.rows());
  const int kw = static_cast<int>(kernel_.cols());
  const int cr = kh / 2;
  const int cc = kw / 2;
  out.setZero();
  for (int r = 0; r < h_; ++r) {
    for (int c = 0; c < w_; ++c) {
      const double yv = y[static_cast<Eigen::Index>(r) * w_ + c];
      for (int i = 0; i < kh; ++i) {
        int rr = reflect_index(r + i - cr, h_);
        for (int j = 0; j < kw; ++j) {
          int ccol = reflect_index(c + j - cc, w_);
          out[static_cast<Eigen::Index>(rr) * w_ + ccol] += kernel_(i, j) * yv;
        }
      }
    }
  }
}

DctFrameletOp::DctFrameletOp(int img_w, int img_h, int block)
    : LinearOp(static_cast<Eigen::Index>(block) * block * img_w * img_h,
               static_cast<Eigen::Index>(img_w) * img_h),
      w_(img_w),
      h_(img_h),
      b_(block) {
  if (block < 3 || block % 2 == 0) {
    throw std::invalid_argument("dct_framelet_operator: block must be odd and >= 3");
  }
  if (img_w < block || img_h < block) {
    throw std::invalid_argument("dct_framelet_operator: image dimensions must be >= block");
  }
  // Orthonormal DCT-II rows, scaled by 1/sqrt(b) so that the full filter bank
  // satisfies D^T D = I (each 2-D filter carries a 1/b factor overall).
  basis_.resize(b_, b_);
  const double scale0 = std::sqrt(1.0 / b_);
  const double scalek = std::sqrt(2.0 / b_);
  for (int k = 0; k < b_; ++k) {
    for (int t = 0; t < b_; ++t) {
      double c = std::cos(3.14159265358979323846 * (2.0 * t + 1.0) * k / (2.0 * b_));
      basis_(k, t) = (k == 0 ? scale0 : scalek) * c;
    }
  }
  basis_ /= std::sqrt(static_cast<double>(b_));
}

void DctFrameletOp::apply_impl(const Vector& x, Vector& out) const {
  const int o = b_ / 2;
  const Eigen::Index plane = static_cast<Eigen::Index>(w_) * h_;
  // stage 1: row correlations, one intermediate plane per row filter
  Matrix tmp(static_cast<Eigen::Index>(b_) * h_, w_);
  for (int l = 0; l < b_; ++l) {
    for (int r = 0; r < h_; ++r) {
      for (int c = 0; c < w_; ++c) {
        double acc = 0.0;
        for (int t = 0; t < b_; ++t) {
          acc += basis_(l, t) * x[static_cast<Eigen::Index>(r) * w_ + wrap_index(c + t - o, w_)];
        }
        tmp(static_cast<Eigen::Index>(l) * h_ + r, c) = acc;
      }
    }
  }
  // stage 2: column correlations producing subband (k, l)
  for (int k = 0; k < b_; ++k) {
    for (int l = 0; l < b_; ++l) {
      Eigen::Index base = (static_cast<Eigen::Index>(k) * b_ + l) * plane;
      for (int r = 0; r < h_; ++r) {
        for (int c = 0; c < w_; ++c) {
          double acc = 0.0;
          for (int s = 0; s < b_; ++s) {
            acc += basis_(k, s) * tmp(static_cast<Eigen::Index>(l) * h_ + wrap_index(r + s - o, h_), c);
          }
          out[base + static_cast<Eigen::Index>(r) * w_ + c] = acc;
        }
      }
    }
  }
}

void DctFrameletOp::adjoint_impl(const Vector& y, Vector& out) const {
  const int o = b_ / 2;
  const Eigen::Index plane = static_cast<Eigen::Index>(w_) * h_;
  Matrix tmp = Matrix::Zero(static_cast<Eigen::Index>(b_) * h_, w_);
  for (int k = 0; k < b_; ++k) {
    for (int l = 0; l < b_; ++l) {
      Eigen::Index base = (static_cast<Eigen::Index>(k) * b_ + l) * plane;
      for (int r = 0; r < h_; ++r) {
        for (int c = 0; c < w_; ++c) {
          const double yv = y[base + static_cast<Eigen::Index>(r) * w_ + c];
          for (int s = 0; s < b_; ++s) {
            tmp(static_cast<Eigen::Index>(l) * h_ + wrap_index(r + s - o, h_), c) += basis_(k, s) * yv;
          }
        }
      }
    }
  }
  out.setZero();
  for (int l = 0; l < b_; ++l) {
    for (int r = 0; r < h_; ++r) {
      for (int c = 0; c < w_; ++c) {
        const double tv = tmp(static_cast<Eigen::Index>(l) * h_ + r, c);
        for (int t = 0; t < b_; ++t) {
          out[static_cast<Eigen::Index>(r) * w_ + wrap_index(c + t - o, w_)] += basis_(l, t) * tv;
        }
      }
    }
  }
}

FirstDifferenceOp::FirstDifferenceOp(int img_w, int img_h)
    : LinearOp(2 * static_cast<Eigen::Index>(img_w) * img_h,
               static_cast<Eigen::Index>(img_w) * img_h),
      w_(img_w),
      h_(img_h) {
  if (img_w < 2 || img_h < 2) {
    throw std::invalid_argument("first_difference_operator: image dimensions must be >= 2");
  }
}

void FirstDifferenceOp::apply_impl(const Vector& x, Vector& out) const {
  const Eigen::Index plane = static_cast<Eigen::Index>(w_) * h_;
  for (int r = 0; r < h_; ++r) {
    for (int c = 0; c < w_; ++c) {
      Eigen::Index i = static_cast<Eigen::Index>(r) * w_ + c;
      out[i] = x[static_cast<Eigen::Index>(r) * w_ + (c + 1) % w_] - x[i];
      out[plane + i] = x[static_cast<Eigen::Index>((r + 1) % h_) * w_ + c] - x[i];
    }
  }
}

void FirstDifferenceOp::adjoint_impl(const Vector& y, Vector& out) const {
  const Eigen::Index plane = static_cast<Eigen::Index>(w_) * h_;
  out.setZero();
  for (int r = 0; r < h_; ++r) {
    for (int c = 0; c < w_; ++c) {
      Eigen::Index i = static_cast<Eigen::Index>(r) * w_ + c;
      double yh = y[i];
      double yv = y[plane + i];
      out[static_cast<Eigen::Index>(r) * w_ + (c + 1) % w_] += yh;
      out[i] -= yh;
      out[static_cast<Eigen::Index>((r + 1) % h_) * w_ + c] += yv;
      out[i] -= yv;
    }
  }
}

SpectralEstimate estimate_spectral_norm(const LinearOp& op, double tol, int max_iter) {
  SplitMix64 rng(0);
  Vector v(op.in_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.next_gaussian();
  double vn = v.norm();
  if (vn == 0.0) return {0.0, true};
  v /= vn;

  double est = 0.0;
  double prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector av = op.apply(v);
    est = av.norm();
    if (est == 0.0) return {0.0, true};  // start vector in the null space
    Vector atav = op.adjoint(av);
    double n = atav.norm();
    if (n == 0.0) return {est, true};
    v = atav / n;
    if (prev >= 0.0 && std::abs(est - prev) <= tol * std::max(est, 1e-300)) {
      return {est, true};
    }
    prev = est;
  }
  return {est, false};
}

}  // namespace sparsefix
