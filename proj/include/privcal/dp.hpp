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

#ifndef PRIVCAL_DP_HPP
#define PRIVCAL_DP_HPP

#include <limits>
#include <stdexcept>
#include <vector>

#include "privcal/random.hpp"

namespace privcal {

// Noiseless mode: an infinite budget makes every Laplace scale zero, so the
// private and non-private experiments share one code path.
constexpr double kInfiniteEpsilon = std::numeric_limits<double>::infinity();

// A charge was requested that the remaining budget cannot cover. Signals a
// protocol bug or an over-eager calibrator; callers should treat it as fatal
// for the affected source.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-source epsilon ledger. epsilon_spent never exceeds epsilon_total
// through charge(); charge_overdraft() records an overdraw instead of
// throwing, for reproducing accounting schemes that overshoot by design.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon_total);

  double total() const { return total_; }
  double spent() const { return spent_; }
  int charges() const { return charges_; }
  bool overdrawn() const { return spent_ > total_; }

  // Throws BudgetExhausted if the share does not fit. Admission allows a
  // relative slack of 1e-9 and clamps at the total, so repeated eps/K shares
  // whose float sum lands an ulp past the total do not trip the guard.
  void charge(double epsilon_share);

  // Unconditional charge; the ledger may end up overdrawn.
  void charge_overdraft(double epsilon_share);

 private:
  static void check_share(double epsilon_share);

  double total_;
  double spent_ = 0.0;
  int charges_ = 0;
};

// L1 sensitivity plus the epsilon share spent on one query; scale() is the
// Laplace noise scale applied to every coordinate of the query vector.
struct NoiseSpec {
  NoiseSpec(double sensitivity, double epsilon_share);

  double sensitivity;
  double epsilon_share;

  double scale() const { return sensitivity / epsilon_share; }
};

// One draw from Laplace(0, scale) via inverse CDF on a single uniform.
// scale == 0 returns exactly 0 without consuming randomness.
double laplace_sample(double scale, Rng& rng);

// Adds an independent Laplace(0, spec.scale()) draw to every coordinate.
// With scale 0 the input is returned untouched, bit for bit.
std::vector<double> mechanize(std::vector<double> values, const NoiseSpec& spec,
                              Rng& rng);

}  // namespace privcal

#endif  // PRIVCAL_DP_HPP
