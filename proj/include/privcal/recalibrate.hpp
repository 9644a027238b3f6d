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

#ifndef PRIVCAL_RECALIBRATE_HPP
#define PRIVCAL_RECALIBRATE_HPP

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "privcal/calibration.hpp"
#include "privcal/golden.hpp"
#include "privcal/protocol.hpp"

namespace privcal {

enum class Method { kNone, kOneSource, kHistBin, kNllT, kEceT, kAccT };

// How the epsilon budget is split across the K+2 golden-section evaluations
// of a temperature method. kPaperLiteral spends eps/(K+1) per query, which
// overdraws the ledger by one share (recorded, not an error). kWorstCase
// spends eps/(K+2) so the ledger provably never overdraws.
enum class Accounting { kPaperLiteral, kWorstCase };

struct TemperatureScale {
  double temperature;
};

// Per-bin confidence remap; inactive bins keep the original confidence.
struct BinRemap {
  BinningScheme scheme;
  std::vector<double> values;  // clamped to [0, 1]
  std::vector<bool> active;
};

struct RecalibratedModel {
  std::variant<TemperatureScale, BinRemap> transform;

  bool is_temperature() const {
    return std::holds_alternative<TemperatureScale>(transform);
  }
  double temperature() const {
    return std::get<TemperatureScale>(transform).temperature;
  }
};

struct RecalConfig {
  Method method = Method::kAccT;
  double epsilon_total = kInfiniteEpsilon;  // per source
  SearchConfig search;
  BinningScheme scheme{15};
  Accounting accounting = Accounting::kWorstCase;
  Method one_source_inner = Method::kEceT;
};

struct SourceBudgetReport {
  int source_id;
  double epsilon_spent;
  int charges;
  bool overdrawn;
};

struct RecalReport {
  Method method;
  std::optional<double> temperature;  // set by temperature methods
  int queries_per_source = 0;         // ledger charges issued per source
  bool overdraft = false;             // any source ledger overdrawn
  std::vector<SourceBudgetReport> budgets;
};

struct RecalOutcome {
  RecalibratedModel model;
  RecalReport report;
};

struct Prediction {
  int label;
  double confidence;
};

// Applies a recalibrated model to one sample. The predicted label is never
// altered; only the confidence is transformed.
Prediction apply(const RecalibratedModel& model, const LabeledLogits& sample);

// Binned ECE of the model's transformed confidences over a dataset.
double model_ece(const RecalibratedModel& model, const Dataset& data,
                 BinningScheme scheme);

// Builds the per-bin remap from an aggregated (possibly noised) tally vector
// of length 2k: correct counts then bin counts. Bins whose averaged count is
// at or below 0.5 stay inactive; ratios are clamped to [0, 1].
RecalibratedModel bin_remap_from_tallies(const std::vector<double>& tallies,
                                         BinningScheme scheme);

// The four private recalibration algorithms plus baselines. Temperature
// methods issue K+2 queries per source through golden-section search.
RecalOutcome acc_t(std::span<PrivateSource> sources, const RecalConfig& config);
RecalOutcome nll_t(std::span<PrivateSource> sources, const RecalConfig& config);
RecalOutcome ece_t(std::span<PrivateSource> sources, const RecalConfig& config);
RecalOutcome hist_bin(std::span<PrivateSource> sources,
                      const RecalConfig& config);

// Runs config.one_source_inner noiselessly on source 0 only, without
// charging any ledger.
RecalOutcome one_source(std::span<PrivateSource> sources,
                        const RecalConfig& config);

// Identity transform.
RecalibratedModel none_baseline();

// Dispatch on config.method.
RecalOutcome recalibrate(std::span<PrivateSource> sources,
                         const RecalConfig& config);

// Reference implementations that bypass the protocol layer entirely: no
// sources, no ledgers, no noise machinery. With an infinite budget the
// protocol-backed methods must match these bit for bit.
namespace direct {

double fit_temperature_nll(std::span<const Dataset> shards,
                           const SearchConfig& search);
double fit_temperature_ece(std::span<const Dataset> shards,
                           BinningScheme scheme, const SearchConfig& search);
double fit_temperature_acc(std::span<const Dataset> shards,
                           const SearchConfig& search);
RecalibratedModel hist_bin(std::span<const Dataset> shards,
                           BinningScheme scheme);

}  // namespace direct

const char* method_name(Method method);

}  // namespace privcal

#endif  // PRIVCAL_RECALIBRATE_HPP
