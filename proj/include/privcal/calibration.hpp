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

#ifndef PRIVCAL_CALIBRATION_HPP
#define PRIVCAL_CALIBRATION_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace privcal {

// One sample: a raw logit vector plus its ground-truth label. Validated at
// construction (at least two classes, finite logits, label in range).
class LabeledLogits {
 public:
  LabeledLogits(std::vector<double> logits, int label);

  const std::vector<double>& logits() const { return logits_; }
  int label() const { return label_; }
  int num_classes() const { return static_cast<int>(logits_.size()); }

 private:
  std::vector<double> logits_;
  int label_;
};

// An ordered collection of samples with a homogeneous class count.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledLogits> samples);

  void push_back(LabeledLogits sample);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  // 0 while empty.
  int num_classes() const {
    return samples_.empty() ? 0 : samples_.front().num_classes();
  }
  const LabeledLogits& operator[](std::size_t i) const { return samples_[i]; }

  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

 private:
  std::vector<LabeledLogits> samples_;
};

// Equal-width partition of [0,1] into `bins` cells. All cells are half-open
// [i/k, (i+1)/k) except the last, which is closed at 1.
struct BinningScheme {
  explicit BinningScheme(int bin_count = 15);
  int bins;
};

// Per-bin tallies of prediction outcomes: sample count, correct count and
// summed confidence. The tally form of the binned calibration error.
class ConfidenceStats {
 public:
  explicit ConfidenceStats(BinningScheme scheme);

  void add(bool correct, double confidence);

  int bins() const { return scheme_.bins; }
  std::int64_t bin_count(int bin) const { return bin_count_[bin]; }
  std::int64_t correct_count(int bin) const { return correct_count_[bin]; }
  double confidence_sum(int bin) const { return confidence_sum_[bin]; }
  std::int64_t total() const { return total_; }

  // n_correct - conf_sum per bin; the quantity aggregated across sources
  // when minimizing the binned calibration error.
  std::vector<double> residuals() const;

  // sum_bins |n_correct - conf_sum| / n_total. Throws if no samples tallied.
  double ece() const;

 private:
  BinningScheme scheme_;
  std::vector<std::int64_t> bin_count_;
  std::vector<std::int64_t> correct_count_;
  std::vector<double> confidence_sum_;
  std::int64_t total_ = 0;
};

// Index of the highest logit; ties break to the lowest class index. The
// prediction is invariant under temperature scaling.
int predict_label(const LabeledLogits& sample);

// Full softmax of logits/temperature, computed with max-logit subtraction.
std::vector<double> softmax(const LabeledLogits& sample, double temperature);

// Top softmax probability at the given temperature; lies in [1/m, 1].
double confidence(const LabeledLogits& sample, double temperature);

// Fraction of samples whose predicted label equals the true label.
double accuracy(const Dataset& data);

// Mean of confidence() over the dataset.
double average_confidence(const Dataset& data, double temperature);

// Sum over samples of min(clip, -log softmax[label]). Clipping bounds each
// sample's contribution so the query sensitivity equals `clip`.
double nll_sum(const Dataset& data, double temperature, double clip = 10.0);

// floor(c * bins), except c == 1 maps into the last (closed) bin.
int bin_index(double confidence, BinningScheme scheme);

// Tallies the whole dataset at one temperature.
ConfidenceStats confidence_stats(const Dataset& data, double temperature,
                                 BinningScheme scheme);

// Empirical binned expected calibration error at the given temperature.
double ece(const Dataset& data, double temperature, BinningScheme scheme);

}  // namespace privcal

#endif  // PRIVCAL_CALIBRATION_HPP
