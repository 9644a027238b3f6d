// Copyright 2026 The privcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privcal/harness.hpp"
#include "privcal/verify.hpp"

namespace {

using namespace privcal;

// PRIVCAL_SEED overrides --seed everywhere when set.
std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("PRIVCAL_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::stoull(value);
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const auto s = env_seed()) return *s;
  return flag_seed;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

Accounting parse_accounting(const std::string& name) {
  if (name == "paper") return Accounting::kPaperLiteral;
  if (name == "worstcase") return Accounting::kWorstCase;
  throw CLI::ValidationError("--accounting must be 'paper' or 'worstcase'");
}

void print_model(const RecalOutcome& outcome) {
  std::cout << "method=" << method_name(outcome.report.method) << "\n";
  if (outcome.report.temperature) {
    std::cout << "temperature=" << format_double(*outcome.report.temperature)
              << "\n";
  }
  if (const auto* remap =
          std::get_if<BinRemap>(&outcome.model.transform)) {
    for (int b = 0; b < remap->scheme.bins; ++b) {
      std::cout << "bin_" << b << "=";
      if (remap->active[b]) {
        std::cout << format_double(remap->values[b]);
      } else {
        std::cout << "keep";
      }
      std::cout << "\n";
    }
  }
}

int run_generate(const std::string& out, int classes, int samples,
                 double spread, double scale, std::uint64_t seed) {
  SynthConfig config{classes, samples, spread, scale, effective_seed(seed)};
  save_logits(out, generate_synthetic(config));
  std::cout << "wrote " << samples << " samples (" << classes
            << " classes) to " << out << "\n";
  return 0;
}

struct CalibrateArgs {
  std::string input;
  std::string method = "acc_t";
  std::string epsilon = "inf";
  int iterations = 5;
  int sources = 100;
  int samples = 50;
  int bins = 15;
  double t_min = 0.5;
  double t_max = 3.0;
  std::uint64_t seed = 0;
  std::string accounting = "worstcase";
};

int run_calibrate(const CalibrateArgs& args) {
  const Dataset data = load_logits(args.input);
  TrialConfig config;
  config.recal.method = parse_method(args.method);
  config.recal.epsilon_total = parse_epsilon(args.epsilon);
  config.recal.search.t_min = args.t_min;
  config.recal.search.t_max = args.t_max;
  config.recal.search.iterations = args.iterations;
  config.recal.scheme = BinningScheme(args.bins);
  config.recal.accounting = parse_accounting(args.accounting);
  config.eval_scheme = BinningScheme(args.bins);
  config.n_sources = args.sources;
  config.n_samples = args.samples;

  SourceSplit split =
      split_sources(data, args.sources, args.samples, effective_seed(args.seed),
                    config.recal.epsilon_total);
  RecalOutcome outcome = recalibrate(split.sources, config.recal);
  print_model(outcome);
  std::cout << "test_ece="
            << format_double(
                   model_ece(outcome.model, split.test, config.eval_scheme))
            << "\n";
  std::cout << "queries_per_source=" << outcome.report.queries_per_source
            << "\n";
  if (!outcome.report.budgets.empty()) {
    std::cout << "epsilon_spent="
              << format_double(outcome.report.budgets.front().epsilon_spent)
              << "\n";
  }
  std::cout << "overdraft=" << (outcome.report.overdraft ? "true" : "false")
            << "\n";
  return 0;
}

struct SweepArgs {
  std::string input;
  std::string factor;
  std::string grid;
  std::string methods = "none,one_source,hist_bin,nll_t,ece_t,acc_t";
  std::string out;
  int trials = 100;
  int sources = 100;
  int samples = 50;
  std::string epsilon = "1.0";
  int bins = 15;
  int iterations = 5;
  double t_min = 0.5;
  double t_max = 3.0;
  std::uint64_t seed = 0;
  std::string accounting = "worstcase";
  bool use_paper_grid = false;
};

int run_sweep_cmd(const SweepArgs& args, bool trials_given, bool grid_given) {
  const Dataset data = load_logits(args.input);
  SweepConfig config;
  config.factor = parse_factor(args.factor);
  config.fixed_sources = args.sources;
  config.fixed_samples = args.samples;
  config.fixed_epsilon = parse_epsilon(args.epsilon);
  config.trials = args.trials;
  config.master_seed = effective_seed(args.seed);
  config.scheme = BinningScheme(args.bins);
  config.search.t_min = args.t_min;
  config.search.t_max = args.t_max;
  config.search.iterations = args.iterations;
  config.accounting = parse_accounting(args.accounting);

  if (grid_given) {
    for (const auto& token : split_list(args.grid)) {
      config.grid.push_back(config.factor == SweepFactor::kEpsilon
                                ? parse_epsilon(token)
                                : std::stod(token));
    }
  } else if (args.use_paper_grid) {
    config.grid = paper_grid(config.factor);
  } else {
    config.grid = default_grid(config.factor);
  }
  if (args.use_paper_grid && !trials_given) config.trials = 500;

  for (const auto& name : split_list(args.methods)) {
    config.methods.push_back(parse_method(name));
  }

  const std::vector<SweepRow> rows = run_sweep(config, data);
  const std::string csv = sweep_csv(rows);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << args.out << "\n";
    return 1;
  }
  out << csv;
  std::cout << "wrote " << rows.size() << " rows to " << args.out << "\n";
  return 0;
}

int run_verify(std::uint64_t seed, int datasets) {
  const auto results = run_all_checks(effective_seed(seed), datasets);
  bool all_passed = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.name << ": "
              << r.detail << "\n";
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Recalibrates classifier confidence scores over multiple private data "
      "sources under epsilon-differential privacy. The PRIVCAL_SEED "
      "environment variable overrides --seed for every subcommand."};
  app.require_subcommand(1);

  // generate
  int gen_classes = 10;
  int gen_samples = 60000;
  double gen_spread = 2.0;
  double gen_scale = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand(
      "generate", "Write a synthetic miscalibrated logit CSV");
  generate->add_option("-m,--classes", gen_classes, "Class count")
      ->capture_default_str();
  generate->add_option("-n,--samples", gen_samples, "Sample count")
      ->capture_default_str();
  generate->add_option("--spread", gen_spread, "Std of the true logit draw")
      ->capture_default_str();
  generate
      ->add_option("--scale", gen_scale,
                   "Miscalibration scale s (observed = s * true; recovery "
                   "temperature is s)")
      ->capture_default_str();
  generate->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  generate->add_option("-o,--out", gen_out, "Output CSV path")->required();

  // calibrate
  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Run one recalibration and report the model and test ECE");
  calibrate->add_option("--input", cal.input, "Logit CSV path")->required();
  calibrate
      ->add_option("--method", cal.method,
                   "none|one_source|hist_bin|nll_t|ece_t|acc_t")
      ->capture_default_str();
  calibrate
      ->add_option("--epsilon", cal.epsilon,
                   "Per-source epsilon budget, a number or 'inf'")
      ->capture_default_str();
  calibrate->add_option("--k", cal.iterations, "Golden-section iterations")
      ->capture_default_str();
  calibrate->add_option("--sources", cal.sources, "Number of private sources")
      ->capture_default_str();
  calibrate->add_option("--samples", cal.samples, "Samples per source")
      ->capture_default_str();
  calibrate->add_option("--bins", cal.bins, "Confidence bins")
      ->capture_default_str();
  calibrate->add_option("--tmin", cal.t_min, "Search lower bound")
      ->capture_default_str();
  calibrate->add_option("--tmax", cal.t_max, "Search upper bound")
      ->capture_default_str();
  calibrate->add_option("--seed", cal.seed, "Trial seed")
      ->capture_default_str();
  calibrate->add_option("--accounting", cal.accounting, "paper|worstcase")
      ->capture_default_str();

  // sweep
  SweepArgs sw;
  auto* sweep = app.add_subcommand(
      "sweep", "Sweep one factor over a grid and write a results CSV");
  sweep->add_option("--input", sw.input, "Logit CSV path")->required();
  sweep->add_option("--factor", sw.factor, "sources|samples|epsilon")
      ->required();
  auto* grid_opt = sweep->add_option(
      "--grid", sw.grid, "Comma-separated grid values ('inf' allowed for "
      "epsilon); default is the desk-scale grid");
  auto* trials_opt = sweep->add_option("--trials", sw.trials, "Trials per cell")
                         ->capture_default_str();
  sweep->add_option("--methods", sw.methods, "Comma-separated method list")
      ->capture_default_str();
  sweep->add_option("--sources", sw.sources, "Fixed source count")
      ->capture_default_str();
  sweep->add_option("--samples", sw.samples, "Fixed samples per source")
      ->capture_default_str();
  sweep->add_option("--epsilon", sw.epsilon, "Fixed epsilon")
      ->capture_default_str();
  sweep->add_option("--bins", sw.bins, "Confidence bins")
      ->capture_default_str();
  sweep->add_option("--k", sw.iterations, "Golden-section iterations")
      ->capture_default_str();
  sweep->add_option("--tmin", sw.t_min, "Search lower bound")
      ->capture_default_str();
  sweep->add_option("--tmax", sw.t_max, "Search upper bound")
      ->capture_default_str();
  sweep->add_option("--seed", sw.seed, "Master seed")->capture_default_str();
  sweep->add_option("--accounting", sw.accounting, "paper|worstcase")
      ->capture_default_str();
  sweep->add_flag("--paper-grid", sw.use_paper_grid,
                  "Use the full-paper grid (and 500 trials unless --trials "
                  "is given)");
  sweep->add_option("-o,--out", sw.out, "Output CSV path")->required();

  // verify
  std::uint64_t verify_seed = kDefaultVerifySeed;
  int verify_datasets = 100;
  auto* verify = app.add_subcommand(
      "verify",
      "Run the DP statistical checks and unimodality scans; nonzero exit on "
      "failure");
  verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();
  verify->add_option("--datasets", verify_datasets, "Datasets per scan")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return run_generate(gen_out, gen_classes, gen_samples, gen_spread,
                          gen_scale, gen_seed);
    }
    if (calibrate->parsed()) return run_calibrate(cal);
    if (sweep->parsed()) {
      return run_sweep_cmd(sw, trials_opt->count() > 0, grid_opt->count() > 0);
    }
    if (verify->parsed()) return run_verify(verify_seed, verify_datasets);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
