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

#include "privcal/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace privcal {

double query_sensitivity(QueryKind kind) {
  switch (kind) {
    case QueryKind::kNllSum:
      return 10.0;  // the per-sample NLL clip
    case QueryKind::kEceBinResiduals:
      return 1.0;  // one sample moves one bin's residual by at most 1
    case QueryKind::kHistTallies:
      return 2.0;  // one sample moves one bin's count and correct count
    case QueryKind::kAccConfGap:
      return 1.0;  // the gap summand lies in (-1, 1]
  }
  throw std::invalid_argument("query_sensitivity: unknown kind");
}

int query_length(QueryKind kind, BinningScheme scheme) {
  switch (kind) {
    case QueryKind::kNllSum:
    case QueryKind::kAccConfGap:
      return 1;
    case QueryKind::kEceBinResiduals:
      return scheme.bins;
    case QueryKind::kHistTallies:
      return 2 * scheme.bins;
  }
  throw std::invalid_argument("query_length: unknown kind");
}

QuerySpec QuerySpec::make(QueryKind kind, double temperature,
                          BinningScheme scheme, double epsilon_share) {
  QuerySpec q{kind, temperature, scheme, query_sensitivity(kind),
              epsilon_share};
  q.validate();
  return q;
}

void QuerySpec::validate() const {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("QuerySpec: temperature must be positive");
  }
  if (sensitivity != query_sensitivity(kind)) {
    throw std::invalid_argument(
        "QuerySpec: sensitivity does not match query kind");
  }
  if (std::isnan(epsilon_share) || epsilon_share <= 0.0) {
    throw std::invalid_argument("QuerySpec: epsilon_share must be positive");
  }
}

std::vector<double> evaluate_query(const Dataset& data,
                                   const QuerySpec& query) {
  query.validate();
  if (data.empty()) {
    throw std::invalid_argument("evaluate_query: empty shard");
  }
  switch (query.kind) {
    case QueryKind::kNllSum:
      return {nll_sum(data, query.temperature, query.sensitivity)};
    case QueryKind::kEceBinResiduals:
      return confidence_stats(data, query.temperature, query.scheme)
          .residuals();
    case QueryKind::kHistTallies: {
      const ConfidenceStats stats = confidence_stats(data, 1.0, query.scheme);
      std::vector<double> out(2 * query.scheme.bins);
      for (int b = 0; b < query.scheme.bins; ++b) {
        out[b] = static_cast<double>(stats.correct_count(b));
        out[query.scheme.bins + b] = static_cast<double>(stats.bin_count(b));
      }
      return out;
    }
    case QueryKind::kAccConfGap: {
      double gap = 0.0;
      for (const auto& s : data) {
        const double correct = predict_label(s) == s.label() ? 1.0 : 0.0;
        gap += correct - confidence(s, query.temperature);
      }
      return {gap};
    }
  }
  throw std::invalid_argument("evaluate_query: unknown kind");
}

PrivateSource::PrivateSource(int id, Dataset data, PrivacyBudget budget,
                             std::uint64_t noise_seed)
    : id_(id), data_(std::move(data)), budget_(budget), rng_(noise_seed) {
  if (data_.empty()) {
    throw std::invalid_argument("PrivateSource: empty dataset");
  }
}

QueryResponse PrivateSource::answer(const QuerySpec& query, int iteration) {
  std::vector<double> values = mechanize(
      evaluate_query(data_, query),
      NoiseSpec(query.sensitivity, query.epsilon_share), rng_);
  return QueryResponse{std::move(values), id_, iteration, query.kind};
}

QueryResponse PrivateSource::respond(const QuerySpec& query, int iteration) {
  budget_.charge(query.epsilon_share);
  return answer(query, iteration);
}

QueryResponse PrivateSource::respond_overdraft(const QuerySpec& query,
                                               int iteration) {
  budget_.charge_overdraft(query.epsilon_share);
  return answer(query, iteration);
}

QueryResponse PrivateSource::respond_local(const QuerySpec& query,
                                           int iteration) const {
  return QueryResponse{evaluate_query(data_, query), id_, iteration,
                       query.kind};
}

std::vector<double> aggregate(const std::vector<QueryResponse>& responses) {
  if (responses.empty()) {
    throw std::invalid_argument("aggregate: no responses");
  }
  const std::size_t len = responses.front().values.size();
  std::vector<double> out(len, 0.0);
  for (const auto& r : responses) {
    if (r.values.size() != len || r.kind != responses.front().kind ||
        r.iteration != responses.front().iteration) {
      throw std::invalid_argument("aggregate: mismatched responses");
    }
    for (std::size_t i = 0; i < len; ++i) out[i] += r.values[i];
  }
  const double d = static_cast<double>(responses.size());
  for (double& v : out) v /= d;
  return out;
}

}  // namespace privcal
