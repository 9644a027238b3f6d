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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "privcal/calibration.hpp"
#include "privcal/random.hpp"

using namespace privcal;

namespace {

Dataset random_dataset(std::uint64_t seed, int classes, int samples,
                       double spread = 1.5) {
  Rng rng(seed);
  Dataset data;
  std::vector<double> logits(classes);
  for (int i = 0; i < samples; ++i) {
    for (auto& l : logits) l = spread * rng.normal();
    data.push_back(
        LabeledLogits(logits, static_cast<int>(rng.next_u64() % classes)));
  }
  return data;
}

// Two-class sample whose top confidence is 1 / (1 + e^-margin).
LabeledLogits two_class(double margin, int label) {
  return LabeledLogits({margin, 0.0}, label);
}

}  // namespace

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(LabeledLogits({-5.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(LabeledLogits({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(LabeledLogits({1.0, 2.0, 3.0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(LabeledLogits({1.0, 2.0}, -1), std::invalid_argument);
  CHECK_THROWS_AS(LabeledLogits({1.0, std::nan("")}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(LabeledLogits({1.0, INFINITY}, 0), std::invalid_argument);
  CHECK_NOTHROW(LabeledLogits({1.0, 2.0}, 1));
}

TEST_CASE("dataset homogeneity") {
  Dataset data;
  data.push_back(LabeledLogits({1.0, 2.0}, 0));
  CHECK_THROWS_AS(data.push_back(LabeledLogits({1.0, 2.0, 3.0}, 0)),
                  std::invalid_argument);
  CHECK(data.num_classes() == 2);
}

TEST_CASE("predict_label") {
  CHECK(predict_label(LabeledLogits({3.0, 1.0, 2.0}, 0)) == 0);
  CHECK(predict_label(LabeledLogits({1.0, 3.0, 2.0}, 0)) == 1);
  // Ties break to the lowest index.
  CHECK(predict_label(LabeledLogits({1.0, 1.0}, 0)) == 0);
  CHECK(predict_label(LabeledLogits({2.0, 5.0, 5.0}, 0)) == 1);
}

TEST_CASE("predict_label ignores temperature") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> logits(4);
    for (auto& l : logits) l = 3.0 * rng.normal();
    const LabeledLogits s(logits, 0);
    const int base = predict_label(s);
    for (double t : {0.05, 0.5, 1.0, 2.0, 100.0}) {
      std::vector<double> p = softmax(s, t);
      int arg = 0;
      for (int j = 1; j < 4; ++j) {
        if (p[j] > p[arg]) arg = j;
      }
      CHECK(arg == base);
    }
  }
}

TEST_CASE("confidence values") {
  CHECK(confidence(LabeledLogits({1.0, 1.0}, 0), 0.7) == 0.5);
  // softmax([2,0]/2)[0] = e / (e + 1)
  CHECK(std::abs(confidence(LabeledLogits({2.0, 0.0}, 0), 2.0) -
                 0.7310585786300049) < 1e-12);
  // Near-uniform at very high temperature.
  CHECK(std::abs(confidence(LabeledLogits({4.0, 0.0, 0.0}, 0), 1e6) -
                 1.0 / 3.0) < 1e-5);
  CHECK_THROWS_AS(confidence(LabeledLogits({1.0, 2.0}, 0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(confidence(LabeledLogits({1.0, 2.0}, 0), -1.0),
                  std::invalid_argument);
}

TEST_CASE("softmax normalizes and matches confidence") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> logits(2 + i % 7);
    for (auto& l : logits) l = 4.0 * rng.normal();
    const LabeledLogits s(logits, 0);
    for (double t : {0.1, 0.7, 1.0, 3.0, 20.0}) {
      const std::vector<double> p = softmax(s, t);
      double sum = 0.0;
      for (double v : p) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-12);
      CHECK(p[predict_label(s)] == confidence(s, t));
    }
  }
}

TEST_CASE("confidence is non-increasing in temperature") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> logits(2 + i % 9);
    for (auto& l : logits) l = 3.0 * rng.normal();
    const LabeledLogits s(logits, 0);
    double prev = confidence(s, 0.05);
    for (double t = 0.15; t < 8.0; t += 0.1) {
      const double cur = confidence(s, t);
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
    CHECK(confidence(s, 1000.0) >= 1.0 / logits.size() - 1e-12);
  }
}

TEST_CASE("accuracy") {
  Dataset all_correct;
  for (int i = 0; i < 3; ++i) all_correct.push_back(two_class(1.0, 0));
  CHECK(accuracy(all_correct) == 1.0);

  Dataset quarter;
  quarter.push_back(two_class(1.0, 0));
  for (int i = 0; i < 3; ++i) quarter.push_back(two_class(1.0, 1));
  CHECK(accuracy(quarter) == 0.25);

  Dataset none_correct;
  for (int i = 0; i < 5; ++i) none_correct.push_back(two_class(2.0, 1));
  CHECK(accuracy(none_correct) == 0.0);

  CHECK_THROWS_AS(accuracy(Dataset{}), std::invalid_argument);
}

TEST_CASE("average_confidence") {
  Dataset tied;
  tied.push_back(LabeledLogits({0.5, 0.5}, 0));
  tied.push_back(LabeledLogits({-2.0, -2.0}, 1));
  CHECK(average_confidence(tied, 1.0) == 0.5);
  CHECK(average_confidence(tied, 17.0) == 0.5);

  Dataset single;
  single.push_back(two_class(2.0, 0));
  CHECK(std::abs(average_confidence(single, 2.0) - 0.7310585786300049) <
        1e-12);

  const Dataset random = random_dataset(3, 5, 40);
  CHECK(average_confidence(random, 1.0) >= average_confidence(random, 2.0));
  CHECK_THROWS_AS(average_confidence(Dataset{}, 1.0), std::invalid_argument);
}

TEST_CASE("nll_sum") {
  Dataset symmetric;
  symmetric.push_back(LabeledLogits({1.0, 1.0}, 0));
  CHECK(std::abs(nll_sum(symmetric, 1.0) - std::log(2.0)) < 1e-12);

  Dataset confident;
  confident.push_back(two_class(50.0, 0));
  CHECK(nll_sum(confident, 1.0) < 1e-12);

  // Raw NLL of roughly 14 contributes exactly the clip value.
  Dataset extreme;
  extreme.push_back(two_class(14.0, 1));
  CHECK(nll_sum(extreme, 1.0) == 10.0);
  CHECK(nll_sum(extreme, 1.0, 3.0) == 3.0);

  CHECK_THROWS_AS(nll_sum(symmetric, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nll_sum(symmetric, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nll_sum(Dataset{}, 1.0), std::invalid_argument);
}

TEST_CASE("bin_index") {
  const BinningScheme scheme(15);
  CHECK(bin_index(0.0, scheme) == 0);
  CHECK(bin_index(1.0, scheme) == 14);
  CHECK(bin_index(1.0 / 15.0, scheme) == 1);
  CHECK(bin_index(0.5, BinningScheme(2)) == 1);
  CHECK(bin_index(0.49999999, BinningScheme(2)) == 0);
  CHECK_THROWS_AS(bin_index(-0.01, scheme), std::invalid_argument);
  CHECK_THROWS_AS(bin_index(1.01, scheme), std::invalid_argument);
  CHECK_THROWS_AS(BinningScheme(0), std::invalid_argument);
}

TEST_CASE("confidence_stats tallies") {
  const BinningScheme scheme(15);
  const double margin = std::log(9.0);  // confidence 0.9 -> bin 13
  Dataset single;
  single.push_back(two_class(margin, 0));
  const ConfidenceStats stats = confidence_stats(single, 1.0, scheme);
  CHECK(stats.total() == 1);
  CHECK(stats.bin_count(13) == 1);
  CHECK(stats.correct_count(13) == 1);
  CHECK(std::abs(stats.confidence_sum(13) - 0.9) < 1e-12);
  for (int b = 0; b < 15; ++b) {
    if (b != 13) CHECK(stats.bin_count(b) == 0);
  }
}

TEST_CASE("confidence_stats additivity") {
  const BinningScheme scheme(15);
  const Dataset base = random_dataset(21, 4, 25);
  Dataset doubled;
  for (const auto& s : base) doubled.push_back(s);
  for (const auto& s : base) doubled.push_back(s);
  const ConfidenceStats one = confidence_stats(base, 1.3, scheme);
  const ConfidenceStats two = confidence_stats(doubled, 1.3, scheme);
  CHECK(two.total() == 2 * one.total());
  for (int b = 0; b < 15; ++b) {
    CHECK(two.bin_count(b) == 2 * one.bin_count(b));
    CHECK(two.correct_count(b) == 2 * one.correct_count(b));
    CHECK(two.confidence_sum(b) == 2.0 * one.confidence_sum(b));
  }
}

TEST_CASE("confidence_stats matches a per-sample loop") {
  const BinningScheme scheme(15);
  Dataset mixed;
  mixed.push_back(two_class(0.2, 0));
  mixed.push_back(two_class(1.5, 1));
  mixed.push_back(two_class(3.0, 0));
  mixed.push_back(LabeledLogits({0.4, 0.1, -ie(0)}, 2));
  const ConfidenceStats stats = confidence_stats(mixed, 1.0, scheme);

  std::vector<long> n(15, 0), c(15, 0);
  std::vector<double> cs(15, 0.0);
  for (const auto& s : mixed) {
    const double conf = confidence(s, 1.0);
    const int b = bin_index(conf, scheme);
    ++n[b];
    if (predict_label(s) == s.label()) ++c[b];
    cs[b] += conf;
  }
  for (int b = 0; b < 15; ++b) {
    CHECK(stats.bin_count(b) == n[b]);
    CHECK(stats.correct_count(b) == c[b]);
    CHECK(stats.confidence_sum(b) == cs[b]);
  }
}

TEST_CASE("ece of a perfectly calibrated dataset") {
  // Huge margins round the top softmax value to exactly 1.0.
  Dataset perfect;
  for (int i = 0; i < 3; ++i) perfect.push_back(two_class(800.0, 0));
  CHECK(confidence(perfect[0], 1.0) == 1.0);
  CHECK(ece(perfect, 1.0, BinningScheme(15)) == 0.0);
}

TEST_CASE("one-bin identity") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Dataset data =
        random_dataset(rng.next_u64(), 2 + i % 9, 5 + i * 3);
    const double one_bin = ece(data, 1.0, BinningScheme(1));
    const double gap =
        std::abs(accuracy(data) - average_confidence(data, 1.0));
    CHECK(std::abs(one_bin - gap) < 1e-12);
  }
}

TEST_CASE("six-sample fixture spanning three bins") {
  Dataset fixture;
  fixture.push_back(two_class(0.3, 0));
  fixture.push_back(two_class(0.4, 1));
  fixture.push_back(two_class(1.2, 0));
  fixture.push_back(two_class(1.3, 0));
  fixture.push_back(two_class(1.1, 1));
  fixture.push_back(two_class(2.5, 0));
  // Frozen via an independent per-bin |Acc - Conf| * pr summation.
  CHECK(std::abs(ece(fixture, 1.0, BinningScheme(15)) - 0.0922680381803414) <
        1e-12);
}

TEST_CASE("ece bounds") {
  Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    const Dataset data = random_dataset(rng.next_u64(), 2 + i % 5, 10 + i);
    for (int k : {1, 5, 15}) {
      const double value = ece(data, 0.8, BinningScheme(k));
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
    }
  }
  CHECK_THROWS_AS(ece(Dataset{}, 1.0, BinningScheme(15)),
                  std::invalid_argument);
}
