#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsefix/prox.hpp"

namespace sparsefix {

// Row-major grayscale image. Intensities live in [0, 255] at I/O boundaries;
// solvers operate on unclamped real values.
struct Image {
  int width = 0;
  int height = 0;
  Vector pixels;  // width * height, row-major

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(Vector::Zero(static_cast<Eigen::Index>(w) * h)) {}

  double& at(int r, int c) { return pixels[static_cast<Eigen::Index>(r) * width + c]; }
  double at(int r, int c) const { return pixels[static_cast<Eigen::Index>(r) * width + c]; }
};

struct LabeledDataset {
  std::vector<Vector> features;
  std::vector<double> labels;

  std::size_t size() const { return features.size(); }
  Eigen::Index dim() const { return features.empty() ? 0 : features.front().size(); }
};

// libsvm text format: `label idx:val idx:val ...` with 1-based sparse indices.
// Feature dimension is the largest index seen; missing entries are 0.
LabeledDataset read_libsvm(const std::string& path);

// IDX image/label pair (big-endian, magics 0x00000803 / 0x00000801). Pixels
// scaled to [0, 1] by /255; features flattened row-major.
LabeledDataset read_idx(const std::string& images_path,
                        const std::string& labels_path);

// Binary PGM (P5), maxval 255 only. The writer clamps to [0, 255] and rounds
// half away from zero; integer-valued images round-trip byte for byte.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);

// Adds i.i.d. N(0, sigma^2) per pixel (Box-Muller, SplitMix64 seeded).
// No clamping.
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

// Per-pixel Poisson draw with mean = pixel value: inversion by sequential
// search below mean 30, rounded normal approximation (clamped at 0) above.
Image sample_poisson(const Image& img, std::uint64_t seed);

double mse(const Vector& pred, const Vector& truth);
double accuracy(const Vector& pred_labels, const Vector& truth);

// 20 log10(255 sqrt(N) / ||clean - restored||_2); +infinity when identical.
double psnr(const Image& clean, const Image& restored);

}  // namespace sparsefix
