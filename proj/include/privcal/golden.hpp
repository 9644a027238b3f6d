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

#ifndef PRIVCAL_GOLDEN_HPP
#define PRIVCAL_GOLDEN_HPP

#include <functional>

namespace privcal {

enum class SearchMode { kMinimize, kMaximize };

struct SearchConfig {
  double t_min = 0.5;
  double t_max = 3.0;
  int iterations = 5;
  SearchMode mode = SearchMode::kMinimize;

  void validate() const;
};

struct SearchResult {
  double optimum;       // midpoint of the final interval
  double interval_low;  // final bracketing interval
  double interval_high;
  int evaluations;  // always iterations + 2
};

// Golden-section search over a unimodal scalar objective, using the literal
// ratio 0.618. Two interior evaluations up front, then exactly one new
// evaluation per iteration; ties discard the left segment. The evaluation
// count is iterations + 2 regardless of objective values, which is what the
// privacy accounting upstream relies on.
//
// The truncated ratio means retained interior points sit slightly off the
// exact golden positions, so the final interval width tracks
// (t_max - t_min) * 0.618^K only approximately (within 0.05% at K = 5; the
// drift grows with K). The bracketing guarantee is unaffected.
SearchResult golden_section(const std::function<double(double)>& objective,
                            const SearchConfig& config);

}  // namespace privcal

#endif  // PRIVCAL_GOLDEN_HPP
