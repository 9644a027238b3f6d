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

#ifndef PRIVCAL_PROTOCOL_HPP
#define PRIVCAL_PROTOCOL_HPP

#include <cstdint>
#include <vector>

#include "privcal/calibration.hpp"
#include "privcal/dp.hpp"
#include "privcal/random.hpp"

namespace privcal {

// The statistic a calibrator may request from a source in one query.
enum class QueryKind {
  kNllSum,           // scalar: summed clipped NLL at a temperature
  kEceBinResiduals,  // per bin: n_correct - sum of confidences
  kHistTallies,      // per bin: n_correct, then per bin: n_bin (at T = 1)
  kAccConfGap,       // scalar: sum of (correct indicator - confidence)
};

// Fixed L1 sensitivity of each query kind: the worst-case change of the
// statistic vector when one sample is added or removed.
double query_sensitivity(QueryKind kind);

// Expected response length for a kind under a binning scheme.
int query_length(QueryKind kind, BinningScheme scheme);

// A calibrator-issued statistic request. `temperature` is ignored for
// kHistTallies (tallies are always taken at T = 1); `scheme` is ignored for
// the scalar kinds.
struct QuerySpec {
  QueryKind kind;
  double temperature;
  BinningScheme scheme;
  double sensitivity;
  double epsilon_share;

  // Builds a spec with the sensitivity pinned by kind.
  static QuerySpec make(QueryKind kind, double temperature,
                        BinningScheme scheme, double epsilon_share);

  void validate() const;
};

struct QueryResponse {
  std::vector<double> values;
  int source_id;
  int iteration;
  QueryKind kind;
};

// The exact (noiseless) statistic vector for a dataset.
std::vector<double> evaluate_query(const Dataset& data, const QuerySpec& query);

// A dataset shard behind a privacy ledger. Raw samples never leave the
// source; the only outputs are mechanized statistic vectors.
class PrivateSource {
 public:
  PrivateSource(int id, Dataset data, PrivacyBudget budget,
                std::uint64_t noise_seed);

  int id() const { return id_; }
  const PrivacyBudget& budget() const { return budget_; }

  // Charges the ledger, then answers through the Laplace mechanism.
  // Propagates BudgetExhausted.
  QueryResponse respond(const QuerySpec& query, int iteration);

  // As respond(), but records an overdraw instead of throwing.
  QueryResponse respond_overdraft(const QuerySpec& query, int iteration);

  // Noiseless, uncharged evaluation on the source's own behalf. Models a
  // source acting as its own calibrator (the one-source baseline); the
  // result never crosses to another party in a real deployment.
  QueryResponse respond_local(const QuerySpec& query, int iteration) const;

 private:
  QueryResponse answer(const QuerySpec& query, int iteration);

  int id_;
  Dataset data_;
  PrivacyBudget budget_;
  Rng rng_;
};

// Coordinate-wise mean across sources. All responses must share kind,
// iteration and length.
std::vector<double> aggregate(const std::vector<QueryResponse>& responses);

}  // namespace privcal

#endif  // PRIVCAL_PROTOCOL_HPP
