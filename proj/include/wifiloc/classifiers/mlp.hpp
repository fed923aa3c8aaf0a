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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wifiloc/classifiers/common.hpp"

namespace wifiloc {

/// One hidden ReLU layer, softmax output, cross-entropy loss, mini-batch
/// SGD. Features are standardized with the mean/variance of the training
/// data; a held-out slice drives early stopping.
class MlpClassifier final : public Classifier {
 public:
  explicit MlpClassifier(MlpParams params = {}) : params_(params) {
    if (params_.hidden < 1 || params_.batch < 1 || params_.epochs < 1 ||
        params_.learning_rate <= 0)
      throw TrainError("mlp: invalid hyperparameters");
  }

  Algorithm algorithm() const override { return Algorithm::kMlp; }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) override {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const std::size_t h = static_cast<std::size_t>(params_.hidden);
    const std::size_t k = classes_.size();

    // Standardization over the training split.
    mean_.assign(d, 0.0);
    scale_.assign(d, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) mean_[f] += x(i, f);
    for (double& m : mean_) m /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) {
        const double c = x(i, f) - mean_[f];
        var[f] += c * c;
      }
    for (std::size_t f = 0; f < d; ++f) {
      const double sd = std::sqrt(var[f] / static_cast<double>(n));
      scale_[f] = sd > 1e-9 ? 1.0 / sd : 1.0;
    }

    Matrix z(n, d);
    std::vector<std::size_t> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
      targets[i] = class_index(y[i]);
      for (std::size_t f = 0; f < d; ++f) z(i, f) = (x(i, f) - mean_[f]) * scale_[f];
    }

    Rng rng(derive_seed(seed, 0x6d6c70));

    // Early-stopping holdout; skipped when it would starve training or drop
    // a class from the optimization set.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::size_t holdout_n = static_cast<std::size_t>(params_.holdout * static_cast<double>(n));
    if (holdout_n < 1 || n - holdout_n < 2) holdout_n = 0;
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_n));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout_n), order.end());
    {
      std::vector<bool> present(k, false);
      for (std::size_t row : train) present[targets[row]] = true;
      if (std::find(present.begin(), present.end(), false) != present.end()) {
        train = order;
        val.clear();
        holdout_n = 0;
      }
    }

    // Glorot-uniform init.
    w1_.assign(h * d, 0.0);
    b1_.assign(h, 0.0);
    w2_.assign(k * h, 0.0);
    b2_.assign(k, 0.0);
    const double lim1 = std::sqrt(6.0 / static_cast<double>(d + h));
    for (double& w : w1_) w = rng.uniform(-lim1, lim1);
    const double lim2 = std::sqrt(6.0 / static_cast<double>(h + k));
    for (double& w : w2_) w = rng.uniform(-lim2, lim2);

    std::vector<double> hidden(h), logits(k), grad_logits(k), grad_hidden(h);
    std::vector<double> gw1(h * d), gb1(h), gw2(k * h), gb2(k);

    auto forward = [&](std::span<const double> row) {
      for (std::size_t j = 0; j < h; ++j) {
        double acc = b1_[j];
        const double* w = &w1_[j * d];
        for (std::size_t f = 0; f < d; ++f) acc += w[f] * row[f];
        hidden[j] = acc > 0 ? acc : 0.0;
      }
      for (std::size_t c = 0; c < k; ++c) {
        double acc = b2_[c];
        const double* w = &w2_[c * h];
        for (std::size_t j = 0; j < h; ++j) acc += w[j] * hidden[j];
        logits[c] = acc;
      }
    };
    auto mean_loss = [&](const std::vector<std::size_t>& rows) {
      double loss = 0.0;
      for (std::size_t row : rows) {
        forward(z.row(row));
        const double peak = *std::max_element(logits.begin(), logits.end());
        double total = 0.0;
        for (double l : logits) total += std::exp(l - peak);
        loss -= logits[targets[row]] - peak - std::log(total);
      }
      return loss / static_cast<double>(rows.size());
    };

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best[4] = {w1_, b1_, w2_, b2_};
    int since_best = 0;

    const double lr = params_.learning_rate;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
      rng.shuffle(train);
      for (std::size_t start = 0; start < train.size();
           start += static_cast<std::size_t>(params_.batch)) {
        const std::size_t stop = std::min(train.size(), start + static_cast<std::size_t>(params_.batch));
        std::fill(gw1.begin(), gw1.end(), 0.0);
        std::fill(gb1.begin(), gb1.end(), 0.0);
        std::fill(gw2.begin(), gw2.end(), 0.0);
        std::fill(gb2.begin(), gb2.end(), 0.0);
        for (std::size_t bi = start; bi < stop; ++bi) {
          const std::size_t row = train[bi];
          forward(z.row(row));
          std::copy(logits.begin(), logits.end(), grad_logits.begin());
          softmax_inplace(grad_logits);
          grad_logits[targets[row]] -= 1.0;
          for (std::size_t c = 0; c < k; ++c) {
            gb2[c] += grad_logits[c];
            double* gw = &gw2[c * h];
            for (std::size_t j = 0; j < h; ++j) gw[j] += grad_logits[c] * hidden[j];
          }
          for (std::size_t j = 0; j < h; ++j) {
            if (hidden[j] <= 0.0) {
              grad_hidden[j] = 0.0;
              continue;
            }
            double acc = 0.0;
            for (std::size_t c = 0; c < k; ++c) acc += grad_logits[c] * w2_[c * h + j];
            grad_hidden[j] = acc;
          }
          const auto row_z = z.row(row);
          for (std::size_t j = 0; j < h; ++j) {
            if (grad_hidden[j] == 0.0) continue;
            gb1[j] += grad_hidden[j];
            double* gw = &gw1[j * d];
            for (std::size_t f = 0; f < d; ++f) gw[f] += grad_hidden[j] * row_z[f];
          }
        }
        const double step = lr / static_cast<double>(stop - start);
        for (std::size_t i = 0; i < w1_.size(); ++i) w1_[i] -= step * gw1[i];
        for (std::size_t i = 0; i < b1_.size(); ++i) b1_[i] -= step * gb1[i];
        for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] -= step * gw2[i];
        for (std::size_t i = 0; i < b2_.size(); ++i) b2_[i] -= step * gb2[i];
      }
      if (holdout_n > 0) {
        const double val_loss = mean_loss(val);
        if (val_loss < best_val - 1e-9) {
          best_val = val_loss;
          best[0] = w1_;
          best[1] = b1_;
          best[2] = w2_;
          best[3] = b2_;
          since_best = 0;
        } else if (++since_best > params_.patience) {
          break;
        }
      }
    }
    if (holdout_n > 0 && std::isfinite(best_val)) {
      w1_ = std::move(best[0]);
      b1_ = std::move(best[1]);
      w2_ = std::move(best[2]);
      b2_ = std::move(best[3]);
    }
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    const std::size_t d = dim_;
    const std::size_t h = b1_.size();
    const std::size_t k = classes_.size();
    std::vector<double> hidden(h), scores(k);
    for (std::size_t j = 0; j < h; ++j) {
      double acc = b1_[j];
      const double* w = &w1_[j * d];
      for (std::size_t f = 0; f < d; ++f) acc += w[f] * (x[f] - mean_[f]) * scale_[f];
      hidden[j] = acc > 0 ? acc : 0.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      double acc = b2_[c];
      const double* w = &w2_[c * h];
      for (std::size_t j = 0; j < h; ++j) acc += w[j] * hidden[j];
      scores[c] = acc;
    }
    softmax_inplace(scores);
    return scores;
  }

  nlohmann::json params_json() const override {
    return {{"hidden", params_.hidden},         {"batch", params_.batch},
            {"learning_rate", params_.learning_rate}, {"epochs", params_.epochs},
            {"holdout", params_.holdout},       {"patience", params_.patience}};
  }

  nlohmann::json state_json() const override {
    return {{"mean", mean_}, {"scale", scale_}, {"w1", w1_}, {"b1", b1_}, {"w2", w2_}, {"b2", b2_}};
  }

  void restore_state(const nlohmann::json& state) override {
    mean_ = state.at("mean").get<std::vector<double>>();
    scale_ = state.at("scale").get<std::vector<double>>();
    w1_ = state.at("w1").get<std::vector<double>>();
    b1_ = state.at("b1").get<std::vector<double>>();
    w2_ = state.at("w2").get<std::vector<double>>();
    b2_ = state.at("b2").get<std::vector<double>>();
  }

 private:
  MlpParams params_;
  std::vector<double> mean_, scale_;
  std::vector<double> w1_, b1_, w2_, b2_;  // row-major (hidden x d), (k x hidden)
};

}  // namespace wifiloc
