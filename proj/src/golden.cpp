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

#include "privcal/golden.hpp"

#include <stdexcept>

namespace privcal {

namespace {
constexpr double kRatio = 0.618;
}

void SearchConfig::validate() const {
  if (!(t_min > 0.0) || !(t_max > t_min)) {
    throw std::invalid_argument(
        "SearchConfig: need 0 < t_min < t_max");
  }
  if (iterations < 1) {
    throw std::invalid_argument("SearchConfig: need at least one iteration");
  }
}

SearchResult golden_section(const std::function<double(double)>& objective,
                            const SearchConfig& config) {
  config.validate();
  const auto eval = [&](double t) {
    const double v = objective(t);
    return config.mode == SearchMode::kMaximize ? -v : v;
  };

  double lo = config.t_min;
  double hi = config.t_max;
  double t0 = hi - (hi - lo) * kRatio;
  double t1 = lo + (hi - lo) * kRatio;
  double v0 = eval(t0);
  double v1 = eval(t1);
  int evaluations = 2;

  for (int k = 0; k < config.iterations; ++k) {
    if (v0 >= v1) {
      // Ties keep the right segment.
      lo = t0;
      t0 = t1;
      v0 = v1;
      t1 = lo + (hi - lo) * kRatio;
      v1 = eval(t1);
    } else {
      hi = t1;
      t1 = t0;
      v1 = v0;
      t0 = hi - (hi - lo) * kRatio;
      v0 = eval(t0);
    }
    ++evaluations;
  }

  return SearchResult{(lo + hi) / 2.0, lo, hi, evaluations};
}

}  // namespace privcal
