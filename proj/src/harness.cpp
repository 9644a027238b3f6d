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

#include "privcal/harness.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace privcal {

namespace {

constexpr std::uint64_t kSplitSalt = 0x53504C4954ULL;
constexpr std::uint64_t kNoiseSalt = 0x4E4F495345ULL;

std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(context + "cannot parse number '" + text + "'");
  }
  return value;
}

long parse_field_long(const std::string& text, const std::string& context) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(context + "cannot parse integer '" + text + "'");
  }
  return value;
}

// Unbiased integer in [0, n) by rejection.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = -n % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng.next_u64();
    if (x >= threshold) return x % n;
  }
}

}  // namespace

Dataset load_logits(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError(location(path, 1) + "missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 3 || header[0] != "label") {
    throw ParseError(location(path, line_no) + "malformed header '" + line +
                     "'");
  }
  const int classes = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < classes; ++i) {
    if (header[i + 1] != "logit_" + std::to_string(i)) {
      throw ParseError(location(path, line_no) + "malformed header column '" +
                       header[i + 1] + "'");
    }
  }

  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = location(path, line_no);
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(context + "expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const long label = parse_field_long(fields[0], context);
    if (label < 0 || label >= classes) {
      throw ParseError(context + "label " + std::to_string(label) +
                       " out of range for " + std::to_string(classes) +
                       " classes");
    }
    std::vector<double> logits(classes);
    for (int i = 0; i < classes; ++i) {
      logits[i] = parse_field_double(fields[i + 1], context);
      if (!std::isfinite(logits[i])) {
        throw ParseError(context + "non-finite logit '" + fields[i + 1] + "'");
      }
    }
    data.push_back(LabeledLogits(std::move(logits), static_cast<int>(label)));
  }
  return data;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void save_logits(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << "label";
  for (int i = 0; i < data.num_classes(); ++i) out << ",logit_" << i;
  out << "\n";
  for (const auto& s : data) {
    out << s.label();
    for (double v : s.logits()) out << "," << format_double(v);
    out << "\n";
  }
}

Dataset generate_synthetic(const SynthConfig& config) {
  if (config.classes < 2) {
    throw std::invalid_argument("generate_synthetic: need at least 2 classes");
  }
  if (config.samples < 1) {
    throw std::invalid_argument("generate_synthetic: need at least 1 sample");
  }
  if (!(config.logit_spread > 0.0) || !(config.miscal_scale > 0.0)) {
    throw std::invalid_argument(
        "generate_synthetic: spread and scale must be positive");
  }
  Rng rng(config.seed);
  Dataset data;
  std::vector<double> true_logits(config.classes);
  std::vector<double> weights(config.classes);
  for (int i = 0; i < config.samples; ++i) {
    double max_logit = -1.0;
    for (int j = 0; j < config.classes; ++j) {
      true_logits[j] = config.logit_spread * rng.normal();
      if (j == 0 || true_logits[j] > max_logit) max_logit = true_logits[j];
    }
    double denom = 0.0;
    for (int j = 0; j < config.classes; ++j) {
      weights[j] = std::exp(true_logits[j] - max_logit);
      denom += weights[j];
    }
    // Inverse-CDF walk over softmax(true logits).
    const double target = rng.uniform01() * denom;
    double cum = 0.0;
    int label = config.classes - 1;
    for (int j = 0; j < config.classes; ++j) {
      cum += weights[j];
      if (cum >= target) {
        label = j;
        break;
      }
    }
    std::vector<double> observed(config.classes);
    for (int j = 0; j < config.classes; ++j) {
      observed[j] = config.miscal_scale * true_logits[j];
    }
    data.push_back(LabeledLogits(std::move(observed), label));
  }
  return data;
}

ShardSplit split_shards(const Dataset& data, int n_sources, int n_samples,
                        std::uint64_t seed) {
  if (n_sources < 1 || n_samples < 1) {
    throw std::invalid_argument("split_shards: counts must be positive");
  }
  const std::size_t needed =
      static_cast<std::size_t>(n_sources) * static_cast<std::size_t>(n_samples);
  if (needed >= data.size()) {
    throw std::invalid_argument(
        "split_shards: need n_sources * n_samples < dataset size");
  }
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = uniform_index(rng, i + 1);
    std::swap(order[i], order[j]);
  }

  ShardSplit split;
  split.shards.reserve(n_sources);
  std::size_t pos = 0;
  for (int s = 0; s < n_sources; ++s) {
    Dataset shard;
    for (int i = 0; i < n_samples; ++i) shard.push_back(data[order[pos++]]);
    split.shards.push_back(std::move(shard));
  }
  for (; pos < order.size(); ++pos) split.test.push_back(data[order[pos]]);
  return split;
}

SourceSplit split_sources(const Dataset& data, int n_sources, int n_samples,
                          std::uint64_t seed, double epsilon_total) {
  ShardSplit shards = split_shards(data, n_sources, n_samples,
                                   derive_seed(seed, kSplitSalt));
  SourceSplit split;
  split.sources.reserve(shards.shards.size());
  for (std::size_t i = 0; i < shards.shards.size(); ++i) {
    split.sources.emplace_back(static_cast<int>(i),
                               std::move(shards.shards[i]),
                               PrivacyBudget(epsilon_total),
                               derive_seed(seed, kNoiseSalt, i));
  }
  split.test = std::move(shards.test);
  return split;
}

TrialResult run_trial(const Dataset& data, const TrialConfig& config,
                      std::uint64_t trial_seed) {
  SourceSplit split = split_sources(data, config.n_sources, config.n_samples,
                                    trial_seed, config.recal.epsilon_total);
  RecalOutcome outcome = recalibrate(split.sources, config.recal);
  const double test_ece =
      model_ece(outcome.model, split.test, config.eval_scheme);
  return TrialResult{test_ece, std::move(outcome.report)};
}

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

void check_integral_grid_value(double value, SweepFactor factor) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw std::invalid_argument(std::string("run_sweep: ") +
                                factor_name(factor) +
                                " grid values must be positive integers");
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const Dataset& data) {
  if (config.grid.empty()) {
    throw std::invalid_argument("run_sweep: empty grid");
  }
  if (config.methods.empty()) {
    throw std::invalid_argument("run_sweep: no methods");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("run_sweep: trials must be positive");
  }

  std::vector<SweepRow> rows;
  for (const Method method : config.methods) {
    for (const double value : config.grid) {
      TrialConfig trial;
      trial.recal.method = method;
      trial.recal.epsilon_total = config.fixed_epsilon;
      trial.recal.search = config.search;
      trial.recal.scheme = config.scheme;
      trial.recal.accounting = config.accounting;
      trial.eval_scheme = config.scheme;
      trial.n_sources = config.fixed_sources;
      trial.n_samples = config.fixed_samples;
      switch (config.factor) {
        case SweepFactor::kSources:
          check_integral_grid_value(value, config.factor);
          trial.n_sources = static_cast<int>(value);
          break;
        case SweepFactor::kSamples:
          check_integral_grid_value(value, config.factor);
          trial.n_samples = static_cast<int>(value);
          break;
        case SweepFactor::kEpsilon:
          trial.recal.epsilon_total = value;
          break;
      }

      std::vector<double> eces;
      eces.reserve(config.trials);
      for (int t = 0; t < config.trials; ++t) {
        const std::uint64_t seed = derive_seed(
            config.master_seed, static_cast<std::uint64_t>(method),
            std::bit_cast<std::uint64_t>(value), static_cast<std::uint64_t>(t));
        try {
          eces.push_back(run_trial(data, trial, seed).ece_test);
        } catch (const std::exception& e) {
          throw std::runtime_error(
              std::string("run_sweep: trial failed (method=") +
              method_name(method) + ", " + factor_name(config.factor) + "=" +
              format_double(value) + ", trial=" + std::to_string(t) +
              "): " + e.what());
        }
      }

      double mean = 0.0;
      for (double e : eces) mean += e;
      mean /= static_cast<double>(eces.size());
      double var = 0.0;
      for (double e : eces) var += (e - mean) * (e - mean);
      var /= static_cast<double>(eces.size());

      rows.push_back(SweepRow{method, config.factor, value, config.trials,
                              mean, median_of(eces), std::sqrt(var)});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "method,factor,value,trials,ece_mean,ece_median,ece_std\n";
  for (const auto& r : rows) {
    out += method_name(r.method);
    out += ',';
    out += factor_name(r.factor);
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += format_double(r.ece_mean);
    out += ',';
    out += format_double(r.ece_median);
    out += ',';
    out += format_double(r.ece_std);
    out += '\n';
  }
  return out;
}

const char* factor_name(SweepFactor factor) {
  switch (factor) {
    case SweepFactor::kSources:
      return "sources";
    case SweepFactor::kSamples:
      return "samples";
    case SweepFactor::kEpsilon:
      return "epsilon";
  }
  return "unknown";
}

SweepFactor parse_factor(const std::string& name) {
  if (name == "sources") return SweepFactor::kSources;
  if (name == "samples") return SweepFactor::kSamples;
  if (name == "epsilon") return SweepFactor::kEpsilon;
  throw std::invalid_argument("unknown sweep factor '" + name + "'");
}

Method parse_method(const std::string& name) {
  if (name == "none") return Method::kNone;
  if (name == "one_source") return Method::kOneSource;
  if (name == "hist_bin") return Method::kHistBin;
  if (name == "nll_t") return Method::kNllT;
  if (name == "ece_t") return Method::kEceT;
  if (name == "acc_t") return Method::kAccT;
  throw std::invalid_argument("unknown method '" + name + "'");
}

double parse_epsilon(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity") return kInfiniteEpsilon;
  const double value = parse_field_double(text, "epsilon: ");
  if (!(value > 0.0)) {
    throw std::invalid_argument("epsilon must be positive or 'inf'");
  }
  return value;
}

std::vector<double> default_grid(SweepFactor factor) {
  switch (factor) {
    case SweepFactor::kSources:
      return {10, 25, 50, 100};
    case SweepFactor::kSamples:
      return {10, 30, 50};
    case SweepFactor::kEpsilon:
      return {0.2, 0.5, 1.0, 2.0};
  }
  return {};
}

std::vector<double> paper_grid(SweepFactor factor) {
  std::vector<double> grid;
  switch (factor) {
    case SweepFactor::kSources:
      for (int v = 100; v <= 2000; v += 100) grid.push_back(v);
      break;
    case SweepFactor::kSamples:
      for (int v = 5; v <= 100; v += 5) grid.push_back(v);
      break;
    case SweepFactor::kEpsilon:
      for (int v = 1; v <= 10; ++v) grid.push_back(0.2 * v);
      break;
  }
  return grid;
}

}  // namespace privcal
