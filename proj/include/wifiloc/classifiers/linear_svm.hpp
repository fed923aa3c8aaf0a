/*
 * wifiloc - Wi-Fi fingerprint indoor localization engine
 * Copyright 2026 The wifiloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "wifiloc/classifiers/common.hpp"

namespace wifiloc {

/// One-vs-rest linear SVM: L2-regularized hinge loss minimized by
/// stochastic subgradient descent (Pegasos-style 1/(lambda*t) steps).
/// Class probabilities are the softmax of the per-class margins; proper
/// calibration is left for later.
class LinearSvmClassifier final : public Classifier {
 public:
  explicit LinearSvmClassifier(SvmParams params = {}) : params_(params) {
    if (params_.lambda <= 0 || params_.epochs < 1)
      throw TrainError("linear_svm: invalid hyperparameters");
  }

  Algorithm algorithm() const override { return Algorithm::kLinearSvm; }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) override {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const std::size_t k = classes_.size();
    weights_.assign(k * d, 0.0);
    bias_.assign(k, 0.0);

    std::vector<std::size_t> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = class_index(y[i]);

    for (std::size_t c = 0; c < k; ++c) {
      Rng rng(derive_seed(seed, 0x53766d00ull + c));
      double* w = &weights_[c * d];
      double& b = bias_[c];
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::uint64_t t = 0;
      for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t row : order) {
          const double eta = 1.0 / (params_.lambda * static_cast<double>(++t));
          const double sign = targets[row] == c ? 1.0 : -1.0;
          const auto xs = x.row(row);
          double margin = b;
          for (std::size_t f = 0; f < d; ++f) margin += w[f] * xs[f];
          const double shrink = 1.0 - eta * params_.lambda;
          for (std::size_t f = 0; f < d; ++f) w[f] *= shrink;
          if (sign * margin < 1.0) {
            for (std::size_t f = 0; f < d; ++f) w[f] += eta * sign * xs[f];
            b += eta * sign;  // bias is not regularized
          }
        }
      }
    }
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    const std::size_t d = dim_;
    std::vector<double> margins(classes_.size());
    for (std::size_t c = 0; c < margins.size(); ++c) {
      double acc = bias_[c];
      const double* w = &weights_[c * d];
      for (std::size_t f = 0; f < d; ++f) acc += w[f] * x[f];
      margins[c] = acc;
    }
    softmax_inplace(margins);
    return margins;
  }

  nlohmann::json params_json() const override {
    return {{"lambda", params_.lambda}, {"epochs", params_.epochs}};
  }

  nlohmann::json state_json() const override {
    return {{"weights", weights_}, {"bias", bias_}};
  }

  void restore_state(const nlohmann::json& state) override {
    weights_ = state.at("weights").get<std::vector<double>>();
    bias_ = state.at("bias").get<std::vector<double>>();
  }

 private:
  SvmParams params_;
  std::vector<double> weights_;  // row-major (k x d)
  std::vector<double> bias_;
};

}  // namespace wifiloc
