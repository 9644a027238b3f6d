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

#include "privcal/recalibrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace privcal {

namespace {

// Averaged bin counts at or below this are treated as empty.
constexpr double kEmptyBinThreshold = 0.5;

double sum_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// Issues one query (at some temperature) and returns the aggregated vector.
using QueryFn = std::function<std::vector<double>(QueryKind, double)>;

std::function<double(double)> make_objective(Method method, const QueryFn& q) {
  switch (method) {
    case Method::kNllT:
      return [&q](double t) { return q(QueryKind::kNllSum, t)[0]; };
    case Method::kEceT:
      return [&q](double t) {
        return sum_abs(q(QueryKind::kEceBinResiduals, t));
      };
    case Method::kAccT:
      return [&q](double t) {
        return std::abs(q(QueryKind::kAccConfGap, t)[0]);
      };
    default:
      throw std::invalid_argument("make_objective: not a temperature method");
  }
}

RecalReport snapshot_report(Method method, std::span<PrivateSource> sources,
                            std::optional<double> temperature,
                            int queries_per_source) {
  RecalReport report;
  report.method = method;
  report.temperature = temperature;
  report.queries_per_source = queries_per_source;
  for (const auto& s : sources) {
    report.budgets.push_back({s.id(), s.budget().spent(), s.budget().charges(),
                              s.budget().overdrawn()});
    if (s.budget().overdrawn()) report.overdraft = true;
  }
  return report;
}

RecalOutcome temperature_method(std::span<PrivateSource> sources,
                                const RecalConfig& config, Method method) {
  config.search.validate();
  if (sources.empty()) {
    throw std::invalid_argument("recalibrate: no sources");
  }
  const int k = config.search.iterations;
  const int denom =
      config.accounting == Accounting::kPaperLiteral ? k + 1 : k + 2;
  const double share = config.epsilon_total / static_cast<double>(denom);
  const bool allow_overdraft = config.accounting == Accounting::kPaperLiteral;

  int iteration = 0;
  const QueryFn query = [&](QueryKind kind, double t) {
    const QuerySpec spec = QuerySpec::make(kind, t, config.scheme, share);
    std::vector<QueryResponse> responses;
    responses.reserve(sources.size());
    for (auto& s : sources) {
      responses.push_back(allow_overdraft ? s.respond_overdraft(spec, iteration)
                                          : s.respond(spec, iteration));
    }
    ++iteration;
    return aggregate(responses);
  };

  const SearchResult result =
      golden_section(make_objective(method, query), config.search);
  return {RecalibratedModel{TemperatureScale{result.optimum}},
          snapshot_report(method, sources, result.optimum,
                          result.evaluations)};
}

}  // namespace

Prediction apply(const RecalibratedModel& model, const LabeledLogits& sample) {
  const int label = predict_label(sample);
  if (const auto* ts = std::get_if<TemperatureScale>(&model.transform)) {
    return {label, confidence(sample, ts->temperature)};
  }
  const auto& remap = std::get<BinRemap>(model.transform);
  const double c = confidence(sample, 1.0);
  const int b = bin_index(c, remap.scheme);
  return {label, remap.active[b] ? remap.values[b] : c};
}

double model_ece(const RecalibratedModel& model, const Dataset& data,
                 BinningScheme scheme) {
  if (data.empty()) {
    throw std::invalid_argument("model_ece: empty dataset");
  }
  ConfidenceStats stats(scheme);
  for (const auto& s : data) {
    const Prediction p = apply(model, s);
    stats.add(p.label == s.label(), p.confidence);
  }
  return stats.ece();
}

RecalibratedModel bin_remap_from_tallies(const std::vector<double>& tallies,
                                         BinningScheme scheme) {
  if (tallies.size() != static_cast<std::size_t>(2 * scheme.bins)) {
    throw std::invalid_argument("bin_remap_from_tallies: bad tally length");
  }
  BinRemap remap{scheme, std::vector<double>(scheme.bins, 0.0),
                 std::vector<bool>(scheme.bins, false)};
  for (int b = 0; b < scheme.bins; ++b) {
    const double count = tallies[scheme.bins + b];
    if (count <= kEmptyBinThreshold) continue;
    remap.values[b] = std::clamp(tallies[b] / count, 0.0, 1.0);
    remap.active[b] = true;
  }
  return RecalibratedModel{std::move(remap)};
}

RecalOutcome acc_t(std::span<PrivateSource> sources,
                   const RecalConfig& config) {
  return temperature_method(sources, config, Method::kAccT);
}

RecalOutcome nll_t(std::span<PrivateSource> sources,
                   const RecalConfig& config) {
  return temperature_method(sources, config, Method::kNllT);
}

RecalOutcome ece_t(std::span<PrivateSource> sources,
                   const RecalConfig& config) {
  return temperature_method(sources, config, Method::kEceT);
}

RecalOutcome hist_bin(std::span<PrivateSource> sources,
                      const RecalConfig& config) {
  if (sources.empty()) {
    throw std::invalid_argument("recalibrate: no sources");
  }
  const QuerySpec spec = QuerySpec::make(QueryKind::kHistTallies, 1.0,
                                         config.scheme, config.epsilon_total);
  std::vector<QueryResponse> responses;
  responses.reserve(sources.size());
  for (auto& s : sources) responses.push_back(s.respond(spec, 0));
  RecalibratedModel model =
      bin_remap_from_tallies(aggregate(responses), config.scheme);
  return {std::move(model),
          snapshot_report(Method::kHistBin, sources, std::nullopt, 1)};
}

RecalOutcome one_source(std::span<PrivateSource> sources,
                        const RecalConfig& config) {
  if (sources.empty()) {
    throw std::invalid_argument("one_source: no sources");
  }
  const PrivateSource& src = sources[0];
  int iteration = 0;
  const QueryFn query = [&](QueryKind kind, double t) {
    const QuerySpec spec =
        QuerySpec::make(kind, t, config.scheme, kInfiniteEpsilon);
    const std::vector<QueryResponse> responses{
        src.respond_local(spec, iteration)};
    ++iteration;
    return aggregate(responses);
  };

  RecalibratedModel model = none_baseline();
  std::optional<double> temperature;
  switch (config.one_source_inner) {
    case Method::kNone:
      temperature = 1.0;
      break;
    case Method::kNllT:
    case Method::kEceT:
    case Method::kAccT: {
      config.search.validate();
      const SearchResult result = golden_section(
          make_objective(config.one_source_inner, query), config.search);
      model = RecalibratedModel{TemperatureScale{result.optimum}};
      temperature = result.optimum;
      break;
    }
    case Method::kHistBin:
      model = bin_remap_from_tallies(query(QueryKind::kHistTallies, 1.0),
                                     config.scheme);
      break;
    case Method::kOneSource:
      throw std::invalid_argument("one_source: inner method cannot recurse");
  }
  RecalReport report =
      snapshot_report(Method::kOneSource, sources, temperature, 0);
  return {std::move(model), std::move(report)};
}

RecalibratedModel none_baseline() {
  return RecalibratedModel{TemperatureScale{1.0}};
}

RecalOutcome recalibrate(std::span<PrivateSource> sources,
                         const RecalConfig& config) {
  switch (config.method) {
    case Method::kNone:
      return {none_baseline(), snapshot_report(Method::kNone, sources, 1.0, 0)};
    case Method::kOneSource:
      return one_source(sources, config);
    case Method::kHistBin:
      return hist_bin(sources, config);
    case Method::kNllT:
      return nll_t(sources, config);
    case Method::kEceT:
      return ece_t(sources, config);
    case Method::kAccT:
      return acc_t(sources, config);
  }
  throw std::invalid_argument("recalibrate: unknown method");
}

namespace direct {

namespace {

std::vector<double> mean_over_shards(
    std::span<const Dataset> shards,
    const std::function<std::vector<double>(const Dataset&)>& statistic) {
  if (shards.empty()) {
    throw std::invalid_argument("direct: no shards");
  }
  std::vector<double> out;
  for (const auto& shard : shards) {
    const std::vector<double> v = statistic(shard);
    if (out.empty()) out.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  const double d = static_cast<double>(shards.size());
  for (double& x : out) x /= d;
  return out;
}

double gap_sum(const Dataset& data, double temperature) {
  double gap = 0.0;
  for (const auto& s : data) {
    const double correct = predict_label(s) == s.label() ? 1.0 : 0.0;
    gap += correct - confidence(s, temperature);
  }
  return gap;
}

std::vector<double> tally_vector(const Dataset& data, BinningScheme scheme) {
  const ConfidenceStats stats = confidence_stats(data, 1.0, scheme);
  std::vector<double> out(2 * scheme.bins);
  for (int b = 0; b < scheme.bins; ++b) {
    out[b] = static_cast<double>(stats.correct_count(b));
    out[scheme.bins + b] = static_cast<double>(stats.bin_count(b));
  }
  return out;
}

}  // namespace

double fit_temperature_nll(std::span<const Dataset> shards,
                           const SearchConfig& search) {
  const double clip = query_sensitivity(QueryKind::kNllSum);
  const auto objective = [&](double t) {
    return mean_over_shards(shards, [&](const Dataset& d) {
      return std::vector<double>{nll_sum(d, t, clip)};
    })[0];
  };
  return golden_section(objective, search).optimum;
}

double fit_temperature_ece(std::span<const Dataset> shards,
                           BinningScheme scheme, const SearchConfig& search) {
  const auto objective = [&](double t) {
    return sum_abs(mean_over_shards(shards, [&](const Dataset& d) {
      return confidence_stats(d, t, scheme).residuals();
    }));
  };
  return golden_section(objective, search).optimum;
}

double fit_temperature_acc(std::span<const Dataset> shards,
                           const SearchConfig& search) {
  const auto objective = [&](double t) {
    return std::abs(mean_over_shards(shards, [&](const Dataset& d) {
      return std::vector<double>{gap_sum(d, t)};
    })[0]);
  };
  return golden_section(objective, search).optimum;
}

RecalibratedModel hist_bin(std::span<const Dataset> shards,
                           BinningScheme scheme) {
  return bin_remap_from_tallies(
      mean_over_shards(
          shards,
          [&](const Dataset& d) { return tally_vector(d, scheme); }),
      scheme);
}

}  // namespace direct

const char* method_name(Method method) {
  switch (method) {
    case Method::kNone:
      return "none";
    case Method::kOneSource:
      return "one_source";
    case Method::kHistBin:
      return "hist_bin";
    case Method::kNllT:
      return "nll_t";
    case Method::kEceT:
      return "ece_t";
    case Method::kAccT:
      return "acc_t";
  }
  return "unknown";
}

}  // namespace privcal
