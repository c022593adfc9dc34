// bdc: simulate data, select hyperparameters, fit, score and summarize.
//
// Exit codes: 0 success, 2 argument error, 3 data validation error,
// 4 runtime numeric error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdc/error.hpp"
#include "commands.hpp"

#ifndef BDC_VERSION
#define BDC_VERSION "0.0.0"
#endif

namespace {

using bdc::ErrorCode;
using bdc::cli::Settings;

constexpr int kArgumentError = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidConfig:
  case ErrorCode::OutOfRangeProbability:
  case ErrorCode::NonPositiveArgument:
  case ErrorCode::DegenerateRange:
  case ErrorCode::InvalidMedoidSet:
    return kArgumentError;
  case ErrorCode::NonConvergentQuadrature:
  case ErrorCode::NonFiniteDistance:
    return kNumericError;
  default:
    return kDataError;
  }
}

// Each option writes its raw text into `flags` under `key`.
CLI::Option *setting(CLI::App *app, Settings &flags, const std::string &name,
                     const std::string &key, const std::string &help) {
  return app->add_option_function<std::string>(
      name, [&flags, key](const std::string &v) { flags.set(key, v); }, help);
}

void switch_pair(CLI::App *app, Settings &flags, const std::string &name,
                 const std::string &key, const std::string &help) {
  app->add_flag_callback("--" + name, [&flags, key] { flags.set(key, "true"); }, help);
  app->add_flag_callback("--no-" + name, [&flags, key] { flags.set(key, "false"); });
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bayesian distance clustering with medoid tessellation priors"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", BDC_VERSION);

  Settings flags;
  std::string config_path;
  bool quiet = false;
  std::vector<std::string> batch;

  app.add_flag("-q,--quiet", quiet, "Suppress progress lines on stderr");

  auto *sim = app.add_subcommand("simulate", "Generate two-layer synthetic data");
  setting(sim, flags, "--n", "n", "Number of objects (100)");
  setting(sim, flags, "--sigma", "sigma", "Within-cluster standard deviation (0.1)");
  setting(sim, flags, "--alpha", "alpha", "Share of layer-2 labels copied from layer 1 (1)");
  setting(sim, flags, "--clusters", "clusters", "Mixture components (10)");
  setting(sim, flags, "--dim", "dim", "Dimension (10)");
  setting(sim, flags, "--dirichlet", "dirichlet", "Dirichlet parameter of the weights (1)");
  setting(sim, flags, "--seed", "seed", "Random seed (1)");
  setting(sim, flags, "--format", "format", "csv or binary (csv)");
  switch_pair(sim, flags, "transform", "transform",
              "Apply the standardize + gamma-quantile transform to distances");
  setting(sim, flags, "--out", "out", "Output directory")->required();

  auto *hyper = app.add_subcommand("hyper", "Select likelihood hyperparameters");
  setting(hyper, flags, "--d1", "d1", "Layer-1 distance matrix")->required();
  setting(hyper, flags, "--d2", "d2", "Layer-2 distance matrix");
  setting(hyper, flags, "--k-min", "k_min", "Smallest K of the elbow sweep (2)");
  setting(hyper, flags, "--k-max", "k_max", "Largest K of the elbow sweep (min(30, N/2))");
  setting(hyper, flags, "--out", "out", "Config file to write (stdout if absent)");

  auto *fit = app.add_subcommand("fit", "Run a sampler and write the posterior summaries");
  fit->add_option("--config", config_path, "key = value settings file; flags override it")
      ->check(CLI::ExistingFile);
  setting(fit, flags, "--model", "model",
          "tess-indep | tess-nested | tess-joint | py-indep | py-joint | kmedoids");
  setting(fit, flags, "--likelihood", "likelihood", "quadratic | linear (quadratic)");
  switch_pair(fit, flags, "repulsion", "repulsion", "Include the between-cluster term (on)");
  setting(fit, flags, "--d1", "d1", "Layer-1 distance matrix (CSV or BDCM)");
  setting(fit, flags, "--d2", "d2", "Layer-2 distance matrix");
  setting(fit, flags, "--truth1", "truth1", "Reference labels for layer 1");
  setting(fit, flags, "--truth2", "truth2", "Reference labels for layer 2");
  setting(fit, flags, "--iters", "iters", "Iterations per chain (10000)");
  setting(fit, flags, "--burnin", "burnin", "Burn-in iterations (2500)");
  setting(fit, flags, "--thin", "thin", "Keep every n-th draw (1)");
  setting(fit, flags, "--seed", "seed", "Master seed (1)");
  setting(fit, flags, "--chains", "chains", "Independent chains (1)");
  setting(fit, flags, "--k", "k", "K for kmedoids, or the initial K (elbow when absent)");
  setting(fit, flags, "--init", "init", "pam | random (pam)");
  setting(fit, flags, "--p", "p", "Truncated-geometric parameter of the medoid prior (0.5)");
  setting(fit, flags, "--py-m", "py_m", "PY concentration (1)");
  setting(fit, flags, "--py-discount", "py_discount", "PY discount (0.01)");
  setting(fit, flags, "--alpha-a", "alpha_a", "Beta prior a on alpha (1)");
  setting(fit, flags, "--alpha-b", "alpha_b", "Beta prior b on alpha (1)");
  setting(fit, flags, "--singleton-threshold", "singleton_threshold",
          "Prefilter objects whose distance quantile exceeds this");
  setting(fit, flags, "--singleton-quantile", "singleton_quantile",
          "Quantile used by the prefilter (0.01)");
  setting(fit, flags, "--out", "out", "Output directory");

  auto *score = app.add_subcommand("score", "Compare estimated and reference labels");
  setting(score, flags, "--estimate", "estimate", "Estimated labels");
  setting(score, flags, "--truth", "truth", "Reference labels");
  switch_pair(score, flags, "json", "json", "Print JSON instead of a table");
  score->add_option("--batch", batch, "Run directories; prints median and quartiles");
  setting(score, flags, "--estimate-name", "estimate_name",
          "Estimate file inside each batch directory (estimate1.csv)");
  setting(score, flags, "--truth-name", "truth_name",
          "Reference file inside each batch directory (truth1.csv)");
  setting(score, flags, "--out", "out", "Write the batch table as JSON");

  auto *summarize = app.add_subcommand("summarize", "Summaries from an existing trace");
  setting(summarize, flags, "--trace", "trace", "NDJSON trace")->required();
  setting(summarize, flags, "--truth1", "truth1", "Reference labels for layer 1");
  setting(summarize, flags, "--truth2", "truth2", "Reference labels for layer 2");
  setting(summarize, flags, "--out", "out", "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kArgumentError;
  }

  try {
    bdc::cli::Context ctx;
    ctx.version = BDC_VERSION;
    ctx.quiet = quiet;
    if (!config_path.empty()) ctx.settings.merge_file(config_path);
    ctx.settings.overlay(flags);
    if (*sim) return bdc::cli::cmd_simulate(ctx);
    if (*hyper) return bdc::cli::cmd_hyper(ctx);
    if (*fit) return bdc::cli::cmd_fit(ctx);
    if (*score) {
      return bdc::cli::cmd_score(ctx, {batch.begin(), batch.end()});
    }
    return bdc::cli::cmd_summarize(ctx);
  } catch (const bdc::cli::ArgumentError &e) {
    std::cerr << "bdc: " << e.what() << '\n';
    return kArgumentError;
  } catch (const bdc::Error &e) {
    std::cerr << "bdc: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception &e) {
    std::cerr << "bdc: " << e.what() << '\n';
    return kNumericError;
  }
}
