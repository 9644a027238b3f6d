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

#ifndef PRIVCAL_HARNESS_HPP
#define PRIVCAL_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "privcal/recalibrate.hpp"

namespace privcal {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV with header `label,logit_0,...,logit_{m-1}`, one sample per row.
// Parse failures name the offending line.
Dataset load_logits(const std::string& path);

// Writes the same format with shortest round-trip float formatting, so a
// save/load cycle reproduces the dataset exactly.
void save_logits(const std::string& path, const Dataset& data);

// Synthetic miscalibrated data: true logits are drawn Normal(0, spread^2),
// the label is drawn from softmax(true logits), and the stored logits are
// scale * true logits. scale > 1 yields an overconfident model whose
// recovery temperature is scale itself.
struct SynthConfig {
  int classes;
  int samples;
  double logit_spread = 2.0;
  double miscal_scale = 1.0;
  std::uint64_t seed = 0;
};

Dataset generate_synthetic(const SynthConfig& config);

struct ShardSplit {
  std::vector<Dataset> shards;
  Dataset test;
};

// Uniform shuffle under the seed, then the first n_sources * n_samples
// samples form equal shards and the remainder is the test split.
ShardSplit split_shards(const Dataset& data, int n_sources, int n_samples,
                        std::uint64_t seed);

struct SourceSplit {
  std::vector<PrivateSource> sources;
  Dataset test;
};

// As split_shards, wrapping each shard into a PrivateSource with the given
// per-source budget and a noise stream derived from the same seed.
SourceSplit split_sources(const Dataset& data, int n_sources, int n_samples,
                          std::uint64_t seed, double epsilon_total);

struct TrialConfig {
  RecalConfig recal;
  int n_sources = 100;
  int n_samples = 50;
  BinningScheme eval_scheme{15};
};

struct TrialResult {
  double ece_test;
  RecalReport report;
};

// One full experiment: split, recalibrate on the sources, evaluate ECE on
// the held-out test split. Both the split and the noise streams derive from
// the single trial seed.
TrialResult run_trial(const Dataset& data, const TrialConfig& config,
                      std::uint64_t trial_seed);

enum class SweepFactor { kSources, kSamples, kEpsilon };

struct SweepConfig {
  SweepFactor factor = SweepFactor::kEpsilon;
  std::vector<double> grid;
  int fixed_sources = 100;
  int fixed_samples = 50;
  double fixed_epsilon = 1.0;
  int trials = 500;
  std::vector<Method> methods;
  std::uint64_t master_seed = 0;
  BinningScheme scheme{15};
  SearchConfig search;
  Accounting accounting = Accounting::kWorstCase;
};

struct SweepRow {
  Method method;
  SweepFactor factor;
  double value;
  int trials;
  double ece_mean;
  double ece_median;
  double ece_std;
};

// Runs trials for every (method, grid value) pair with per-trial seeds
// derived from (master_seed, method, value, trial index).
std::vector<SweepRow> run_sweep(const SweepConfig& config, const Dataset& data);

// Header `method,factor,value,trials,ece_mean,ece_median,ece_std`; float
// columns use shortest round-trip formatting, so output is byte-stable.
std::string sweep_csv(const std::vector<SweepRow>& rows);

const char* factor_name(SweepFactor factor);
SweepFactor parse_factor(const std::string& name);
Method parse_method(const std::string& name);
// Accepts "inf" (case-insensitive) or a positive number.
double parse_epsilon(const std::string& text);

// Desk-scale grids used by default, and the full-paper grids behind a flag.
std::vector<double> default_grid(SweepFactor factor);
std::vector<double> paper_grid(SweepFactor factor);

std::string format_double(double value);

}  // namespace privcal

#endif  // PRIVCAL_HARNESS_HPP
