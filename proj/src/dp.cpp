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

#include "privcal/dp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace privcal {

namespace {
constexpr double kAdmissionSlack = 1e-9;
}

PrivacyBudget::PrivacyBudget(double epsilon_total) : total_(epsilon_total) {
  if (std::isnan(total_) || total_ < 0.0) {
    throw std::invalid_argument("PrivacyBudget: epsilon_total must be >= 0");
  }
}

void PrivacyBudget::check_share(double epsilon_share) {
  if (std::isnan(epsilon_share) || epsilon_share <= 0.0) {
    throw std::invalid_argument("PrivacyBudget: epsilon_share must be > 0");
  }
}

void PrivacyBudget::charge(double epsilon_share) {
  check_share(epsilon_share);
  const double slack = kAdmissionSlack * std::max(1.0, total_);
  if (std::isfinite(total_) && spent_ + epsilon_share > total_ + slack) {
    throw BudgetExhausted("privacy budget exhausted: spent " +
                          std::to_string(spent_) + " + share " +
                          std::to_string(epsilon_share) + " exceeds total " +
                          std::to_string(total_));
  }
  spent_ = std::min(spent_ + epsilon_share, total_);
  ++charges_;
}

void PrivacyBudget::charge_overdraft(double epsilon_share) {
  check_share(epsilon_share);
  spent_ += epsilon_share;
  ++charges_;
}

NoiseSpec::NoiseSpec(double sensitivity, double epsilon_share)
    : sensitivity(sensitivity), epsilon_share(epsilon_share) {
  if (std::isnan(sensitivity) || sensitivity < 0.0) {
    throw std::invalid_argument("NoiseSpec: sensitivity must be >= 0");
  }
  if (std::isnan(epsilon_share) || epsilon_share <= 0.0) {
    throw std::invalid_argument("NoiseSpec: epsilon_share must be > 0");
  }
}

double laplace_sample(double scale, Rng& rng) {
  if (std::isnan(scale) || scale < 0.0) {
    throw std::invalid_argument("laplace_sample: scale must be >= 0");
  }
  if (scale == 0.0) return 0.0;
  const double u = rng.uniform01();  // strictly inside (0, 1)
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

std::vector<double> mechanize(std::vector<double> values, const NoiseSpec& spec,
                              Rng& rng) {
  const double scale = spec.scale();
  if (scale == 0.0) return values;
  for (double& v : values) v += laplace_sample(scale, rng);
  return values;
}

}  // namespace privcal
