#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsefix/data_io.hpp"
#include "sparsefix/prox.hpp"

namespace sparsefix {

// Flat experiment description. JSON config files use these field names as
// keys; command-line flags override file values. Negative numeric values mean
// "use the task default".
struct ExperimentConfig {
  std::string task;           // regress | classify | deblur
  std::string model = "l0";   // l0 | l1-identity | l1-tf | l1-tv

  // solver parameters
  double lambda = -1.0;
  double gamma = -1.0;
  double alpha = 0.99;
  double rho_prime = -1.0;
  double p = -1.0;
  double q = -1.0;
  double p1 = -1.0;
  double q1 = -1.0;
  double p2 = -1.0;
  double q2 = -1.0;
  double error_M = -1.0;
  double error_exponent = -1.0;
  double tol = -1.0;
  int max_outer = -1;
  int max_inner = 100000;

  // regression / classification data
  std::string data;        // single libsvm file, split by seeded shuffle
  std::string train_data;  // explicit libsvm train file
  std::string test_data;   // explicit libsvm test file
  std::string train_images, train_labels;  // IDX pair
  std::string test_images, test_labels;
  int train_count = -1;       // used with `data`
  double sigma = -1.0;        // Gaussian kernel width
  int positive_digit = 7;     // IDX label mapped to +1
  int negative_digit = 9;     // IDX label mapped to -1

  // deblurring
  std::string image;  // clean PGM
  int blur_length = 9;
  double blur_angle = 45.0;
  std::string noise = "gaussian";  // gaussian | poisson
  double noise_sigma = 3.0;
  int block = 7;

  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

ExperimentConfig load_experiment_config(const std::string& path);

// f(x) = sum_j v_j K(x_j, x) with the Gaussian kernel.
double predict_regression(const Vector& v, const std::vector<Vector>& train_points,
                          double sigma, const Vector& x);

// sign(sum_j v_j K(x_j, x)), sign(0) = +1.
int predict_classification(const Vector& v, const std::vector<Vector>& train_points,
                           double sigma, const Vector& x);

// Runs one experiment and writes trace.csv, result.json and (for deblurring)
// restored.pgm / corrupted.pgm under cfg.out_dir.
// Returns 0 on convergence, 2 on iteration-cap exit, 1 on error.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace sparsefix
