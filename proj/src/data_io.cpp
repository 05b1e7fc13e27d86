#include "sparsefix/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sparsefix/rng.hpp"

namespace sparsefix {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) fail(path + ": truncated file");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset read_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open");

  struct Row {
    double label;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Row> rows;
  int max_index = 0;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    Row row;
    if (!(ls >> row.label)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank
      fail(path + ":" + std::to_string(lineno) + ": malformed label");
    }
    if (!std::isfinite(row.label)) {
      fail(path + ":" + std::to_string(lineno) + ": non-finite label");
    }
    std::string tok;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) {
        fail(path + ":" + std::to_string(lineno) + ": malformed feature '" + tok + "'");
      }
      int idx;
      double val;
      try {
        std::size_t used;
        idx = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
        val = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(path + ":" + std::to_string(lineno) + ": malformed feature '" + tok + "'");
      }
      if (idx < 1) fail(path + ":" + std::to_string(lineno) + ": indices are 1-based");
      if (!std::isfinite(val)) {
        fail(path + ":" + std::to_string(lineno) + ": non-finite feature value");
      }
      row.entries.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }

  LabeledDataset ds;
  ds.features.reserve(rows.size());
  ds.labels.reserve(rows.size());
  for (const Row& row : rows) {
    Vector x = Vector::Zero(max_index);
    for (auto [idx, val] : row.entries) x[idx - 1] = val;
    ds.features.push_back(std::move(x));
    ds.labels.push_back(row.label);
  }
  return ds;
}

LabeledDataset read_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) fail(images_path + ": cannot open");
  std::ifstream labs(labels_path, std::ios::binary);
  if (!labs) fail(labels_path + ": cannot open");

  if (read_be_u32(imgs, images_path) != 0x00000803u) {
    fail(images_path + ": bad magic, expected IDX image file (0x00000803)");
  }
  std::uint32_t count = read_be_u32(imgs, images_path);
  std::uint32_t rows = read_be_u32(imgs, images_path);
  std::uint32_t cols = read_be_u32(imgs, images_path);

  if (read_be_u32(labs, labels_path) != 0x00000801u) {
    fail(labels_path + ": bad magic, expected IDX label file (0x00000801)");
  }
  std::uint32_t label_count = read_be_u32(labs, labels_path);
  if (label_count != count) {
    fail(images_path + ": image/label count mismatch (" + std::to_string(count) +
         " vs " + std::to_string(label_count) + ")");
  }

  const std::size_t dim = std::size_t(rows) * cols;
  std::vector<unsigned char> buf(dim);
  LabeledDataset ds;
  ds.features.reserve(count);
  ds.labels.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!imgs.read(reinterpret_cast<char*>(buf.data()), std::streamsize(dim))) {
      fail(images_path + ": truncated pixel data");
    }
    Vector x(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) x[static_cast<Eigen::Index>(j)] = buf[j] / 255.0;
    ds.features.push_back(std::move(x));
    char lb;
    if (!labs.read(&lb, 1)) fail(labels_path + ": truncated label data");
    ds.labels.push_back(static_cast<double>(static_cast<unsigned char>(lb)));
  }
  return ds;
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path + ": cannot open");

  auto next_token = [&]() -> std::string {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {  // comment to end of line
        while ((c = in.get()) != EOF && c != '\n') {}
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };

  std::string magic = next_token();
  if (magic == "P2") fail(path + ": ASCII PGM (P2) is not supported, use binary P5");
  if (magic != "P5") fail(path + ": not a binary PGM (P5) file");

  std::string ws = next_token(), hs = next_token(), ms = next_token();
  if (ws.empty() || hs.empty() || ms.empty()) fail(path + ": truncated header");
  int w, h, maxval;
  try {
    w = std::stoi(ws);
    h = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    fail(path + ": malformed header");
  }
  if (w < 1 || h < 1) fail(path + ": invalid dimensions");
  if (maxval != 255) fail(path + ": unsupported maxval (only 255)");

  Image img(w, h);
  std::vector<unsigned char> buf(std::size_t(w) * h);
  if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()))) {
    fail(path + ": truncated pixel data");
  }
  for (std::size_t i = 0; i < buf.size(); ++i) {
    img.pixels[static_cast<Eigen::Index>(i)] = buf[i];
  }
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<Eigen::Index>(img.width) * img.height) {
    throw std::invalid_argument("write_pgm: inconsistent image");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path + ": cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> buf(std::size_t(img.width) * img.height);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    long v = std::lround(img.pixels[static_cast<Eigen::Index>(i)]);  // half away from zero
    buf[i] = static_cast<unsigned char>(std::clamp(v, 0L, 255L));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!out) fail(path + ": write failed");
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  Image out = img;
  if (sigma == 0.0) return out;
  SplitMix64 rng(seed);
  for (Eigen::Index i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] += sigma * rng.next_gaussian();
  }
  return out;
}

namespace {

double poisson_draw(double mean, SplitMix64& rng) {
  if (mean == 0.0) return 0.0;
  if (mean < 30.0) {
    // inversion by sequential search
    double p = std::exp(-mean);
    double f = p;
    double u = rng.next_uniform();
    double k = 0.0;
    while (u > f && k < 1e6) {
      k += 1.0;
      p *= mean / k;
      f += p;
    }
    return k;
  }
  double k = std::round(mean + std::sqrt(mean) * rng.next_gaussian());
  return k < 0.0 ? 0.0 : k;
}

}  // namespace

Image sample_poisson(const Image& img, std::uint64_t seed) {
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
    if (img.pixels[i] < 0.0) {
      throw std::invalid_argument("sample_poisson: negative mean pixel");
    }
  }
  Image out(img.width, img.height);
  SplitMix64 rng(seed);
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
    out.pixels[i] = poisson_draw(img.pixels[i], rng);
  }
  return out;
}

double mse(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("mse: dimension mismatch");
  if (pred.size() == 0) return 0.0;
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double accuracy(const Vector& pred_labels, const Vector& truth) {
  if (pred_labels.size() != truth.size()) {
    throw std::invalid_argument("accuracy: dimension mismatch");
  }
  if (pred_labels.size() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (pred_labels[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double psnr(const Image& clean, const Image& restored) {
  if (clean.width != restored.width || clean.height != restored.height) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  double err = (clean.pixels - restored.pixels).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  double n = static_cast<double>(clean.pixels.size());
  return 20.0 * std::log10(255.0 * std::sqrt(n) / err);
}

}  // namespace sparsefix
