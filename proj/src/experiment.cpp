#include "sparsefix/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "sparsefix/fidelity.hpp"
#include "sparsefix/linops.hpp"
#include "sparsefix/rng.hpp"
#include "sparsefix/solver_l0.hpp"
#include "sparsefix/solver_l1.hpp"

namespace sparsefix {

namespace {

using nlohmann::json;

void fetch(const json& j, const char* key, double& into) {
  if (j.contains(key)) into = j.at(key).get<double>();
}
void fetch(const json& j, const char* key, int& into) {
  if (j.contains(key)) into = j.at(key).get<int>();
}
void fetch(const json& j, const char* key, std::uint64_t& into) {
  if (j.contains(key)) into = j.at(key).get<std::uint64_t>();
}
void fetch(const json& j, const char* key, std::string& into) {
  if (j.contains(key)) into = j.at(key).get<std::string>();
}

struct TaskDefaults {
  double tol;
  int max_outer;
  double sigma;
  double error_M;
  double error_exponent;
};

TaskDefaults defaults_for(const ExperimentConfig& cfg) {
  if (cfg.task == "regress") return {1e-6, 100000, std::sqrt(10.0), 1e16, 2.0};
  if (cfg.task == "classify") return {1e-4, 50000, 4.0, 1e16, 2.0};
  if (cfg.task == "deblur") {
    if (cfg.noise == "poisson") return {1e-5, 2000, 0.0, 1e8, 1.01};
    // Gaussian-noise defaults; the l1 transforms use larger error scales.
    double m = 1e6;
    if (cfg.model == "l1-tf") m = 1e8;
    if (cfg.model == "l1-tv") m = 1e7;
    return {1e-5, 2000, 0.0, m, 2.0};
  }
  throw std::invalid_argument("unknown task '" + cfg.task + "'");
}

struct Resolved {
  double lambda, gamma, alpha, rho_prime, p, q, p1, q1, p2, q2, tol;
  ErrorSequence error_seq;
  int max_outer, max_inner;
};

Resolved resolve(const ExperimentConfig& cfg) {
  TaskDefaults d = defaults_for(cfg);
  Resolved r{};
  r.lambda = cfg.lambda > 0.0 ? cfg.lambda : 0.1;
  r.gamma = cfg.gamma > 0.0 ? cfg.gamma : r.lambda / 2.0;
  r.alpha = cfg.alpha;
  r.rho_prime = cfg.rho_prime;
  r.p = cfg.p > 0.0 ? cfg.p : 1.0;
  r.q = cfg.q;
  r.p1 = cfg.p1 > 0.0 ? cfg.p1 : (cfg.p > 0.0 ? cfg.p : 0.1);
  r.q1 = cfg.q1;
  r.p2 = cfg.p2 > 0.0 ? cfg.p2 : r.p1;
  r.q2 = cfg.q2;
  r.tol = cfg.tol > 0.0 ? cfg.tol : d.tol;
  r.max_outer = cfg.max_outer > 0 ? cfg.max_outer : d.max_outer;
  r.max_inner = cfg.max_inner > 0 ? cfg.max_inner : 100000;
  r.error_seq.scale = cfg.error_M > 0.0 ? cfg.error_M : d.error_M;
  r.error_seq.exponent = cfg.error_exponent > 0.0 ? cfg.error_exponent : d.error_exponent;
  return r;
}

L0Config make_l0_config(const Resolved& r, bool keep_support) {
  L0Config c;
  c.lambda = r.lambda;
  c.gamma = r.gamma;
  c.alpha = r.alpha;
  c.rho_prime = r.rho_prime;
  c.p = r.p;
  c.q = r.q;
  c.error_seq = r.error_seq;
  c.outer_tol = r.tol;
  c.max_outer = r.max_outer;
  c.max_inner = r.max_inner;
  c.keep_support = keep_support;
  return c;
}

L1Config make_l1_config(const Resolved& r) {
  L1Config c;
  c.lambda = r.lambda;
  c.p = r.p;
  c.q = r.q;
  c.p1 = r.p1;
  c.q1 = r.q1;
  c.p2 = r.p2;
  c.q2 = r.q2;
  c.error_seq = r.error_seq;
  c.tol = r.tol;
  c.max_outer = r.max_outer;
  c.max_inner = r.max_inner;
  return c;
}

json config_echo(const ExperimentConfig& cfg, const Resolved& r) {
  json j;
  j["task"] = cfg.task;
  j["model"] = cfg.model;
  j["lambda"] = r.lambda;
  j["gamma"] = r.gamma;
  j["alpha"] = r.alpha;
  j["p"] = r.p;
  j["p1"] = r.p1;
  j["p2"] = r.p2;
  j["tol"] = r.tol;
  j["max_outer"] = r.max_outer;
  j["max_inner"] = r.max_inner;
  j["error_M"] = r.error_seq.scale;
  j["error_exponent"] = r.error_seq.exponent;
  j["seed"] = cfg.seed;
  if (cfg.task == "deblur") {
    j["blur_length"] = cfg.blur_length;
    j["blur_angle"] = cfg.blur_angle;
    j["noise"] = cfg.noise;
    j["noise_sigma"] = cfg.noise_sigma;
    j["block"] = cfg.block;
  }
  return j;
}

json finite_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

// Out-of-theory parameter choices are allowed but flagged (soft warning).
void warn_if_unguaranteed(const L0Result& res) {
  if (!res.descent_guaranteed) {
    std::fprintf(stderr,
                 "warning: alpha/rho' outside the guaranteed-descent range; "
                 "the F trace may be non-monotone\n");
  }
  if (res.non_monotone) {
    std::fprintf(stderr, "warning: objective trace was non-monotone\n");
  }
}

struct TraceRow {
  int k;
  double F;
  double du_norm;
  double gradH_norm;
  int nnz;
  int inner_iters;
};

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  std::fputs("k,F,du_norm,gradH_norm,nnz,inner_iters\n", f);
  for (const TraceRow& r : rows) {
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%d,%d\n", r.k, r.F, r.du_norm, r.gradH_norm,
                 r.nnz, r.inner_iters);
  }
  std::fclose(f);
}

std::vector<TraceRow> rows_from_l0(const std::vector<IterationRecord>& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.size());
  for (const IterationRecord& rec : trace) {
    rows.push_back({rec.k, rec.F_value, rec.u_step_norm, rec.grad_H_norm, rec.nnz,
                    rec.inner_iters});
  }
  return rows;
}

std::vector<TraceRow> rows_from_l1(const std::vector<L1IterationRecord>& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.size());
  for (const L1IterationRecord& rec : trace) {
    rows.push_back({rec.k, rec.objective, rec.step_norm, rec.grad_T_norm, rec.nnz,
                    rec.inner_iters});
  }
  return rows;
}

void write_result_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

// Seeded index shuffle used to split a single dataset into train/test.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

void split_dataset(const LabeledDataset& all, std::size_t train_count, std::uint64_t seed,
                   LabeledDataset& train, LabeledDataset& test) {
  auto idx = shuffled_indices(all.size(), seed);
  for (std::size_t i = 0; i < all.size(); ++i) {
    LabeledDataset& dst = i < train_count ? train : test;
    dst.features.push_back(all.features[idx[i]]);
    dst.labels.push_back(all.labels[idx[i]]);
  }
}

void load_tabular(const ExperimentConfig& cfg, LabeledDataset& train, LabeledDataset& test) {
  if (!cfg.train_images.empty()) {
    LabeledDataset tr = read_idx(cfg.train_images, cfg.train_labels);
    LabeledDataset te = cfg.test_images.empty() ? LabeledDataset{}
                                                : read_idx(cfg.test_images, cfg.test_labels);
    // keep only the two requested digits, mapped to +/-1
    auto filter = [&](const LabeledDataset& src, LabeledDataset& dst) {
      for (std::size_t i = 0; i < src.size(); ++i) {
        int lab = static_cast<int>(src.labels[i]);
        if (lab == cfg.positive_digit) {
          dst.features.push_back(src.features[i]);
          dst.labels.push_back(1.0);
        } else if (lab == cfg.negative_digit) {
          dst.features.push_back(src.features[i]);
          dst.labels.push_back(-1.0);
        }
      }
    };
    filter(tr, train);
    filter(te, test);
    return;
  }
  if (!cfg.train_data.empty()) {
    train = read_libsvm(cfg.train_data);
    if (!cfg.test_data.empty()) test = read_libsvm(cfg.test_data);
    return;
  }
  if (!cfg.data.empty()) {
    LabeledDataset all = read_libsvm(cfg.data);
    std::size_t tc = cfg.train_count > 0 ? static_cast<std::size_t>(cfg.train_count)
                                         : (all.size() * 3) / 4;
    if (tc > all.size()) tc = all.size();
    split_dataset(all, tc, cfg.seed, train, test);
    return;
  }
  throw std::runtime_error("no dataset configured (set data, train_data, or train_images)");
}

Vector labels_vector(const LabeledDataset& ds) {
  Vector y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) y[static_cast<Eigen::Index>(i)] = ds.labels[i];
  return y;
}

int finish(const ExperimentConfig& cfg, const Resolved& r, json result,
           const std::vector<TraceRow>& rows, bool converged, double wall_ms) {
  std::filesystem::create_directories(cfg.out_dir);
  result["iterations"] = rows.empty() ? 0 : rows.back().k;
  result["converged"] = converged;
  result["wall_ms"] = wall_ms;
  write_trace_csv(cfg.out_dir + "/trace.csv", rows);
  write_result_json(cfg.out_dir + "/result.json", result);
  (void)r;
  return converged ? 0 : 2;
}

int run_regress(const ExperimentConfig& cfg, const Resolved& r) {
  auto t0 = std::chrono::steady_clock::now();
  LabeledDataset train, test;
  load_tabular(cfg, train, test);
  if (train.size() == 0) throw std::runtime_error("empty training set");
  double sigma = cfg.sigma > 0.0 ? cfg.sigma : defaults_for(cfg).sigma;

  DenseOp B = gaussian_kernel_matrix(train.features, sigma);
  Vector y = labels_vector(train);
  Fidelity psi = Fidelity::squared_loss(y);
  const Eigen::Index m = B.in_dim();

  Vector v_final;
  std::vector<TraceRow> rows;
  bool converged = false;
  int solution_nnz = 0;

  if (cfg.model == "l0") {
    IdentityOp D(m);
    L0Config c = make_l0_config(r, true);
    L0Result res = solve_l0(B, D, psi, c, default_l0_state(B, D, Vector::Zero(m)));
    v_final = res.state.v;
    rows = rows_from_l0(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.state.u);
    warn_if_unguaranteed(res);
  } else if (cfg.model == "l1-identity") {
    L1Result res = solve_l1_identity(B, psi, make_l1_config(r), Vector::Zero(m));
    v_final = res.v;
    rows = rows_from_l1(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.v);
  } else {
    throw std::runtime_error("task 'regress' supports models l0 and l1-identity");
  }

  Vector train_pred = B.apply(v_final);
  double mse_train = mse(train_pred, y);
  json result;
  result["config"] = config_echo(cfg, r);
  result["config"]["sigma"] = sigma;
  result["mse_train"] = mse_train;
  if (test.size() > 0) {
    Vector test_pred(static_cast<Eigen::Index>(test.size()));
    Vector test_y = labels_vector(test);
    for (std::size_t i = 0; i < test.size(); ++i) {
      test_pred[static_cast<Eigen::Index>(i)] =
          predict_regression(v_final, train.features, sigma, test.features[i]);
    }
    result["mse_test"] = mse(test_pred, test_y);
  }
  result["nnz"] = solution_nnz;
  double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return finish(cfg, r, std::move(result), rows, converged, wall);
}

int run_classify(const ExperimentConfig& cfg, const Resolved& r) {
  auto t0 = std::chrono::steady_clock::now();
  LabeledDataset train, test;
  load_tabular(cfg, train, test);
  if (train.size() == 0) throw std::runtime_error("empty training set");
  for (double lab : train.labels) {
    if (lab != 1.0 && lab != -1.0) {
      throw std::runtime_error("classification labels must be +1 or -1");
    }
  }
  double sigma = cfg.sigma > 0.0 ? cfg.sigma : defaults_for(cfg).sigma;

  DenseOp K = gaussian_kernel_matrix(train.features, sigma);
  Vector y = labels_vector(train);
  Matrix yk = y.asDiagonal() * K.matrix();
  DenseOp B(std::move(yk));
  Fidelity psi = Fidelity::squared_hinge(y);
  const Eigen::Index m = B.in_dim();

  Vector v_final;
  std::vector<TraceRow> rows;
  bool converged = false;
  int solution_nnz = 0;

  if (cfg.model == "l0") {
    IdentityOp D(m);
    L0Config c = make_l0_config(r, true);
    L0Result res = solve_l0(B, D, psi, c, default_l0_state(B, D, Vector::Zero(m)));
    v_final = res.state.v;
    rows = rows_from_l0(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.state.u);
    warn_if_unguaranteed(res);
  } else if (cfg.model == "l1-identity") {
    L1Result res = solve_l1_identity(B, psi, make_l1_config(r), Vector::Zero(m));
    v_final = res.v;
    rows = rows_from_l1(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.v);
  } else {
    throw std::runtime_error("task 'classify' supports models l0 and l1-identity");
  }

  auto eval_accuracy = [&](const LabeledDataset& ds) {
    Vector pred(static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      pred[static_cast<Eigen::Index>(i)] =
          predict_classification(v_final, train.features, sigma, ds.features[i]);
    }
    return accuracy(pred, labels_vector(ds));
  };

  json result;
  result["config"] = config_echo(cfg, r);
  result["config"]["sigma"] = sigma;
  result["accuracy_train"] = eval_accuracy(train);
  if (test.size() > 0) result["accuracy_test"] = eval_accuracy(test);
  result["nnz"] = solution_nnz;
  double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return finish(cfg, r, std::move(result), rows, converged, wall);
}

int run_deblur(const ExperimentConfig& cfg, const Resolved& r) {
  auto t0 = std::chrono::steady_clock::now();
  if (cfg.image.empty()) throw std::runtime_error("deblur requires an input image");
  Image clean = read_pgm(cfg.image);
  const int w = clean.width, h = clean.height;
  const Eigen::Index m = static_cast<Eigen::Index>(w) * h;

  MotionBlurOp B(w, h, cfg.blur_length, cfg.blur_angle);

  Image observed(w, h);
  bool poisson = cfg.noise == "poisson";
  if (poisson) {
    // scale to peak 255, blur, then sample counts
    double peak = clean.pixels.maxCoeff();
    if (peak > 0.0) clean.pixels *= 255.0 / peak;
    Image blurred(w, h);
    blurred.pixels = B.apply(clean.pixels);
    observed = sample_poisson(blurred, cfg.seed);
  } else if (cfg.noise == "gaussian") {
    Image blurred(w, h);
    blurred.pixels = B.apply(clean.pixels);
    observed = add_gaussian_noise(blurred, cfg.noise_sigma, cfg.seed);
  } else {
    throw std::runtime_error("noise must be 'gaussian' or 'poisson'");
  }

  Fidelity psi = poisson ? Fidelity::poisson_kl(observed.pixels)
                         : Fidelity::squared_loss(observed.pixels);

  // Poisson fidelity needs strictly positive blurred intensities.
  Vector v0 = observed.pixels;
  if (poisson) {
    for (Eigen::Index i = 0; i < v0.size(); ++i) v0[i] = std::max(v0[i], 1.0);
  }

  Vector v_final;
  std::vector<TraceRow> rows;
  bool converged = false;
  int solution_nnz = 0;

  if (cfg.model == "l0") {
    DctFrameletOp D(w, h, cfg.block);
    L0Config c = make_l0_config(r, false);
    L0Result res = solve_l0(B, D, psi, c, default_l0_state(B, D, v0));
    v_final = res.state.v;
    rows = rows_from_l0(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.state.u);
    warn_if_unguaranteed(res);
  } else if (cfg.model == "l1-tf") {
    DctFrameletOp D(w, h, cfg.block);
    L1Result res = solve_l1_general(B, D, psi, make_l1_config(r), v0);
    v_final = res.v;
    rows = rows_from_l1(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.v);
  } else if (cfg.model == "l1-tv") {
    FirstDifferenceOp D(w, h);
    L1Result res = solve_l1_general(B, D, psi, make_l1_config(r), v0);
    v_final = res.v;
    rows = rows_from_l1(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.v);
  } else if (cfg.model == "l1-identity") {
    L1Result res = solve_l1_identity(B, psi, make_l1_config(r), v0);
    v_final = res.v;
    rows = rows_from_l1(res.trace);
    converged = res.converged;
    solution_nnz = nnz(res.v);
  } else {
    throw std::runtime_error("unknown deblur model '" + cfg.model + "'");
  }

  Image restored(w, h);
  restored.pixels = v_final;
  (void)m;

  json result;
  result["config"] = config_echo(cfg, r);
  result["psnr"] = finite_or_inf(psnr(clean, restored));
  result["psnr_corrupted"] = finite_or_inf(psnr(clean, observed));
  result["nnz"] = solution_nnz;

  std::filesystem::create_directories(cfg.out_dir);
  write_pgm(restored, cfg.out_dir + "/restored.pgm");
  write_pgm(observed, cfg.out_dir + "/corrupted.pgm");
  double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return finish(cfg, r, std::move(result), rows, converged, wall);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON (" + e.what() + ")");
  }
  ExperimentConfig cfg;
  fetch(j, "task", cfg.task);
  fetch(j, "model", cfg.model);
  fetch(j, "lambda", cfg.lambda);
  fetch(j, "gamma", cfg.gamma);
  fetch(j, "alpha", cfg.alpha);
  fetch(j, "rho_prime", cfg.rho_prime);
  fetch(j, "p", cfg.p);
  fetch(j, "q", cfg.q);
  fetch(j, "p1", cfg.p1);
  fetch(j, "q1", cfg.q1);
  fetch(j, "p2", cfg.p2);
  fetch(j, "q2", cfg.q2);
  fetch(j, "error_M", cfg.error_M);
  fetch(j, "error_exponent", cfg.error_exponent);
  fetch(j, "tol", cfg.tol);
  fetch(j, "outer_tol", cfg.tol);
  fetch(j, "max_outer", cfg.max_outer);
  fetch(j, "max_inner", cfg.max_inner);
  fetch(j, "data", cfg.data);
  fetch(j, "train_data", cfg.train_data);
  fetch(j, "test_data", cfg.test_data);
  fetch(j, "train_images", cfg.train_images);
  fetch(j, "train_labels", cfg.train_labels);
  fetch(j, "test_images", cfg.test_images);
  fetch(j, "test_labels", cfg.test_labels);
  fetch(j, "train_count", cfg.train_count);
  fetch(j, "sigma", cfg.sigma);
  fetch(j, "positive_digit", cfg.positive_digit);
  fetch(j, "negative_digit", cfg.negative_digit);
  fetch(j, "image", cfg.image);
  fetch(j, "blur_length", cfg.blur_length);
  fetch(j, "blur_angle", cfg.blur_angle);
  fetch(j, "noise", cfg.noise);
  fetch(j, "noise_sigma", cfg.noise_sigma);
  fetch(j, "block", cfg.block);
  fetch(j, "seed", cfg.seed);
  fetch(j, "out", cfg.out_dir);
  return cfg;
}

double predict_regression(const Vector& v, const std::vector<Vector>& train_points,
                          double sigma, const Vector& x) {
  if (static_cast<std::size_t>(v.size()) != train_points.size()) {
    throw std::invalid_argument("predict_regression: dimension mismatch");
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double acc = 0.0;
  for (std::size_t j = 0; j < train_points.size(); ++j) {
    acc += v[static_cast<Eigen::Index>(j)] *
           std::exp(-(train_points[j] - x).squaredNorm() * inv);
  }
  return acc;
}

int predict_classification(const Vector& v, const std::vector<Vector>& train_points,
                           double sigma, const Vector& x) {
  double s = predict_regression(v, train_points, sigma, x);
  return s < 0.0 ? -1 : 1;
}

int run_experiment(const ExperimentConfig& cfg) {
  try {
    Resolved r = resolve(cfg);
    if (cfg.task == "regress") return run_regress(cfg, r);
    if (cfg.task == "classify") return run_classify(cfg, r);
    if (cfg.task == "deblur") return run_deblur(cfg, r);
    std::fprintf(stderr, "error: unknown task '%s'\n", cfg.task.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace sparsefix
