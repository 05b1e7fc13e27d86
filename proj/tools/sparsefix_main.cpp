#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "sparsefix/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sparsefix: sparse regularization experiments (l0 and l1 models)"};
  app.require_subcommand(1);

  std::string config_path;
  double lambda = -1.0, gamma = -1.0, alpha = -1.0, p = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--lambda", lambda, "regularization weight");
    sub->add_option("--gamma", gamma, "envelope parameter (l0 model)");
    sub->add_option("--alpha", alpha, "relaxation parameter (l0 model)");
    sub->add_option("--p", p, "primal step parameter");
    sub->add_option("--seed", seed, "PRNG seed")->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_dir, "output directory");
  };

  CLI::App* regress = app.add_subcommand("regress", "kernel regression");
  CLI::App* classify = app.add_subcommand("classify", "kernel classification");
  CLI::App* deblur = app.add_subcommand("deblur", "image deblurring");
  add_common(regress);
  add_common(classify);
  add_common(deblur);

  CLI11_PARSE(app, argc, argv);

  sparsefix::ExperimentConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = sparsefix::load_experiment_config(config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }

  if (regress->parsed()) cfg.task = "regress";
  if (classify->parsed()) cfg.task = "classify";
  if (deblur->parsed()) cfg.task = "deblur";

  // flags override config-file values
  if (lambda > 0.0) cfg.lambda = lambda;
  if (gamma > 0.0) cfg.gamma = gamma;
  if (alpha > 0.0) cfg.alpha = alpha;
  if (p > 0.0) cfg.p = p;
  if (seed_set) cfg.seed = seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;

  return sparsefix::run_experiment(cfg);
}
