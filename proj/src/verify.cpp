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

#include "privcal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "privcal/dp.hpp"
#include "privcal/random.hpp"

namespace privcal {

namespace {

constexpr int kDraws = 1000000;
constexpr int kRatioCells = 41;
constexpr double kRatioLow = -10.0;
constexpr double kRatioHigh = 10.0;
constexpr double kRatioSlack = 1.05;
constexpr int kMinCellHits = 1000;

constexpr int kGridPoints = 200;
constexpr double kGridLow = 0.05;
constexpr double kGridHigh = 20.0;
constexpr double kDiffTolerance = 1e-9;

std::vector<double> temperature_grid() {
  std::vector<double> grid(kGridPoints);
  const double step = (kGridHigh - kGridLow) / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = kGridLow + step * i;
  return grid;
}

}  // namespace

int sign_changes(const std::vector<double>& values, double tolerance) {
  int changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int sign = d > tolerance ? 1 : (d < -tolerance ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return changes;
}

Dataset random_scan_dataset(std::uint64_t seed) {
  Rng rng(seed);
  const int classes = 2 + static_cast<int>(rng.next_u64() % 9);    // 2..10
  const int samples = 5 + static_cast<int>(rng.next_u64() % 196);  // 5..200
  const double spread = 0.5 + 2.0 * rng.uniform01();
  Dataset data;
  std::vector<double> logits(classes);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < classes; ++j) logits[j] = spread * rng.normal();
    int label;
    if (rng.uniform01() < 0.6) {
      label = 0;
      for (int j = 1; j < classes; ++j) {
        if (logits[j] > logits[label]) label = j;
      }
    } else {
      label = static_cast<int>(rng.next_u64() % classes);
    }
    data.push_back(LabeledLogits(logits, label));
  }
  return data;
}

CheckResult check_laplace_moments(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x4C41504C41434531ULL));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = laplace_sample(1.0, rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / kDraws;
  const double var = sum_sq / kDraws - mean * mean;
  const bool passed = std::abs(mean) <= 0.01 && var >= 1.9 && var <= 2.1;
  std::ostringstream detail;
  detail << "mean=" << mean << " (|.|<=0.01), var=" << var << " (in [1.9,2.1])";
  return {"laplace_moments", passed, detail.str()};
}

CheckResult check_dp_ratio(std::uint64_t seed) {
  // f counts database elements: f(D) = 0, f(D') = 1, sensitivity 1. Both
  // sides are mechanized at epsilon = 1, so densities may differ by at most
  // a factor of e anywhere.
  Rng rng(derive_seed(seed, 0x4450524154494F31ULL));
  const NoiseSpec spec(1.0, 1.0);
  std::vector<std::int64_t> hits_a(kRatioCells, 0);
  std::vector<std::int64_t> hits_b(kRatioCells, 0);
  const double cell_width = (kRatioHigh - kRatioLow) / kRatioCells;
  const auto tally = [&](double x, std::vector<std::int64_t>& hits) {
    if (x < kRatioLow || x >= kRatioHigh) return;
    const int cell = static_cast<int>((x - kRatioLow) / cell_width);
    ++hits[std::min(cell, kRatioCells - 1)];
  };
  for (int i = 0; i < kDraws; ++i) {
    tally(mechanize({0.0}, spec, rng)[0], hits_a);
    tally(mechanize({1.0}, spec, rng)[0], hits_b);
  }

  const double bound = std::exp(1.0) * kRatioSlack;
  double worst = 0.0;
  int cells_checked = 0;
  for (int c = 0; c < kRatioCells; ++c) {
    if (hits_a[c] < kMinCellHits || hits_b[c] < kMinCellHits) continue;
    ++cells_checked;
    const double ratio = static_cast<double>(hits_a[c]) / hits_b[c];
    worst = std::max(worst, std::max(ratio, 1.0 / ratio));
  }
  const bool passed = cells_checked > 0 && worst <= bound;
  std::ostringstream detail;
  detail << "worst ratio " << worst << " over " << cells_checked
         << " cells (bound " << bound << ")";
  return {"dp_neighbor_ratio", passed, detail.str()};
}

namespace {

CheckResult scan_check(const std::string& name, std::uint64_t seed,
                       int num_datasets, bool nll_scan) {
  const std::vector<double> grid = temperature_grid();
  constexpr double kNoClip = std::numeric_limits<double>::infinity();
  int violations = 0;
  int worst = 0;
  for (int i = 0; i < num_datasets; ++i) {
    const Dataset data = random_scan_dataset(derive_seed(seed, 0x5343414EULL, i));
    std::vector<double> values(grid.size());
    if (nll_scan) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        values[g] = nll_sum(data, grid[g], kNoClip);
      }
    } else {
      const double acc = accuracy(data);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        values[g] = std::abs(acc - average_confidence(data, grid[g]));
      }
    }
    const int changes = sign_changes(values, kDiffTolerance);
    worst = std::max(worst, changes);
    if (changes > 1) ++violations;
  }
  std::ostringstream detail;
  detail << violations << "/" << num_datasets
         << " datasets exceed one sign change (worst " << worst << ")";
  return {name, violations == 0, detail.str()};
}

}  // namespace

CheckResult check_nll_unimodality(std::uint64_t seed, int num_datasets) {
  return scan_check("nll_unimodality", seed, num_datasets, true);
}

CheckResult check_gap_unimodality(std::uint64_t seed, int num_datasets) {
  return scan_check("gap_unimodality", seed, num_datasets, false);
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed, int num_datasets) {
  return {check_laplace_moments(seed), check_dp_ratio(seed),
          check_nll_unimodality(seed, num_datasets),
          check_gap_unimodality(seed, num_datasets)};
}

}  // namespace privcal
