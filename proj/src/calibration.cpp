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

#include "privcal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace privcal {

LabeledLogits::LabeledLogits(std::vector<double> logits, int label)
    : logits_(std::move(logits)), label_(label) {
  if (logits_.size() < 2) {
    throw std::invalid_argument("LabeledLogits: need at least 2 classes, got " +
                                std::to_string(logits_.size()));
  }
  for (double v : logits_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("LabeledLogits: non-finite logit");
    }
  }
  if (label_ < 0 || label_ >= static_cast<int>(logits_.size())) {
    throw std::invalid_argument("LabeledLogits: label " +
                                std::to_string(label_) + " out of range");
  }
}

Dataset::Dataset(std::vector<LabeledLogits> samples)
    : samples_(std::move(samples)) {
  for (const auto& s : samples_) {
    if (s.num_classes() != samples_.front().num_classes()) {
      throw std::invalid_argument("Dataset: inconsistent class counts");
    }
  }
}

void Dataset::push_back(LabeledLogits sample) {
  if (!samples_.empty() &&
      sample.num_classes() != samples_.front().num_classes()) {
    throw std::invalid_argument("Dataset: inconsistent class counts");
  }
  samples_.push_back(std::move(sample));
}

BinningScheme::BinningScheme(int bin_count) : bins(bin_count) {
  if (bins < 1) {
    throw std::invalid_argument("BinningScheme: need at least one bin");
  }
}

ConfidenceStats::ConfidenceStats(BinningScheme scheme)
    : scheme_(scheme),
      bin_count_(scheme.bins, 0),
      correct_count_(scheme.bins, 0),
      confidence_sum_(scheme.bins, 0.0) {}

void ConfidenceStats::add(bool correct, double conf) {
  const int b = bin_index(conf, scheme_);
  ++bin_count_[b];
  if (correct) ++correct_count_[b];
  confidence_sum_[b] += conf;
  ++total_;
}

std::vector<double> ConfidenceStats::residuals() const {
  std::vector<double> r(scheme_.bins);
  for (int b = 0; b < scheme_.bins; ++b) {
    r[b] = static_cast<double>(correct_count_[b]) - confidence_sum_[b];
  }
  return r;
}

double ConfidenceStats::ece() const {
  if (total_ == 0) {
    throw std::invalid_argument("ConfidenceStats::ece: no samples");
  }
  double sum = 0.0;
  for (int b = 0; b < scheme_.bins; ++b) {
    sum += std::abs(static_cast<double>(correct_count_[b]) -
                    confidence_sum_[b]);
  }
  return sum / static_cast<double>(total_);
}

int predict_label(const LabeledLogits& sample) {
  const auto& l = sample.logits();
  int best = 0;
  for (int i = 1; i < sample.num_classes(); ++i) {
    if (l[i] > l[best]) best = i;
  }
  return best;
}

namespace {

void check_temperature(double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
}

void check_nonempty(const Dataset& data) {
  if (data.empty()) {
    throw std::invalid_argument("dataset must be nonempty");
  }
}

}  // namespace

std::vector<double> softmax(const LabeledLogits& sample, double temperature) {
  check_temperature(temperature);
  const auto& l = sample.logits();
  const double max_scaled = l[predict_label(sample)] / temperature;
  std::vector<double> p(l.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    p[i] = std::exp(l[i] / temperature - max_scaled);
    denom += p[i];
  }
  for (double& v : p) v /= denom;
  return p;
}

double confidence(const LabeledLogits& sample, double temperature) {
  check_temperature(temperature);
  const auto& l = sample.logits();
  const double max_scaled = l[predict_label(sample)] / temperature;
  double denom = 0.0;
  for (double v : l) denom += std::exp(v / temperature - max_scaled);
  return 1.0 / denom;
}

double accuracy(const Dataset& data) {
  check_nonempty(data);
  std::int64_t correct = 0;
  for (const auto& s : data) {
    if (predict_label(s) == s.label()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double average_confidence(const Dataset& data, double temperature) {
  check_nonempty(data);
  double sum = 0.0;
  for (const auto& s : data) sum += confidence(s, temperature);
  return sum / static_cast<double>(data.size());
}

double nll_sum(const Dataset& data, double temperature, double clip) {
  check_temperature(temperature);
  if (!(clip > 0.0)) {
    throw std::invalid_argument("nll_sum: clip must be positive");
  }
  check_nonempty(data);
  double total = 0.0;
  for (const auto& s : data) {
    const auto& l = s.logits();
    const double max_scaled = l[predict_label(s)] / temperature;
    double denom = 0.0;
    for (double v : l) denom += std::exp(v / temperature - max_scaled);
    // -log p_y = log(sum_j e^{z_j - z_max}) - (z_y - z_max)
    const double nll =
        std::log(denom) - (l[s.label()] / temperature - max_scaled);
    total += std::min(clip, nll);
  }
  return total;
}

int bin_index(double conf, BinningScheme scheme) {
  if (!(conf >= 0.0 && conf <= 1.0)) {
    throw std::invalid_argument("bin_index: confidence outside [0, 1]");
  }
  const int b = static_cast<int>(conf * scheme.bins);
  return std::min(b, scheme.bins - 1);
}

ConfidenceStats confidence_stats(const Dataset& data, double temperature,
                                 BinningScheme scheme) {
  check_nonempty(data);
  ConfidenceStats stats(scheme);
  for (const auto& s : data) {
    stats.add(predict_label(s) == s.label(), confidence(s, temperature));
  }
  return stats;
}

double ece(const Dataset& data, double temperature, BinningScheme scheme) {
  return confidence_stats(data, temperature, scheme).ece();
}

}  // namespace privcal
