// Copyright 2026 The rigtok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rigtok/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rigtok/error.hpp"

namespace rigtok {

namespace {

void CheckSizes(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw Error(ErrorCode::kInvalidArgument, "loss: prediction and target lengths differ");
  }
}

std::span<const double> AsSpan(const DenseSkin& m) {
  return {m.data(), static_cast<size_t>(m.size())};
}

void CheckShapes(const DenseSkin& pred, const DenseSkin& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "loss: prediction and target shapes differ");
  }
}

}  // namespace

LossValue Bce(std::span<const double> pred, std::span<const double> target) {
  CheckSizes(pred, target);
  LossValue out;
  out.gradient.resize(pred.size());
  if (pred.empty()) return out;
  const double n = static_cast<double>(pred.size());
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
    const double w = target[i];
    sum += -(w * std::log(p) + (1.0 - w) * std::log1p(-p));
    out.gradient[i] = (-w / p + (1.0 - w) / (1.0 - p)) / n;
  }
  out.value = sum / n;
  return out;
}

LossValue Mse(std::span<const double> pred, std::span<const double> target) {
  CheckSizes(pred, target);
  LossValue out;
  out.gradient.resize(pred.size());
  if (pred.empty()) return out;
  const double n = static_cast<double>(pred.size());
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
    out.gradient[i] = 2.0 * d / n;
  }
  out.value = sum / n;
  return out;
}

LossValue Dice(std::span<const double> pred, std::span<const double> target, double eps) {
  CheckSizes(pred, target);
  double overlap = 0.0;
  double pred_sq = 0.0;
  double target_sq = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    overlap += pred[i] * target[i];
    pred_sq += pred[i] * pred[i];
    target_sq += target[i] * target[i];
  }
  // At pred == target the three sums are bitwise equal, so num == den and
  // both the loss and every gradient component vanish exactly.
  const double num = 2.0 * overlap + eps;
  const double den = pred_sq + target_sq + eps;
  LossValue out;
  out.value = 1.0 - num / den;
  out.gradient.resize(pred.size());
  const double den_sq = den * den;
  for (size_t i = 0; i < pred.size(); ++i) {
    out.gradient[i] = (2.0 * num * pred[i] - 2.0 * target[i] * den) / den_sq;
  }
  return out;
}

LossValue DiceColumns(const DenseSkin& pred, const DenseSkin& target, double eps) {
  CheckShapes(pred, target);
  LossValue out;
  out.gradient.reserve(pred.size());
  const auto rows = static_cast<size_t>(pred.rows());
  for (Eigen::Index j = 0; j < pred.cols(); ++j) {
    auto column = Dice({pred.col(j).data(), rows}, {target.col(j).data(), rows}, eps);
    out.value += column.value;
    out.gradient.insert(out.gradient.end(), column.gradient.begin(), column.gradient.end());
  }
  return out;
}

namespace {

LossValue Combine(const LossWeights& weights, const LossValue& bce, const LossValue& mse,
                  const LossValue& dice) {
  LossValue out;
  out.value = weights.bce * bce.value + weights.mse * mse.value + weights.dice * dice.value;
  out.gradient.resize(bce.gradient.size());
  for (size_t i = 0; i < out.gradient.size(); ++i) {
    out.gradient[i] = weights.bce * bce.gradient[i] + weights.mse * mse.gradient[i] +
                      weights.dice * dice.gradient[i];
  }
  return out;
}

void CheckWeights(const LossWeights& w) {
  if (w.bce < 0 || w.mse < 0 || w.dice < 0 || (w.bce == 0 && w.mse == 0 && w.dice == 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "loss weights must be non-negative with at least one positive");
  }
}

}  // namespace

LossValue VaeLoss(std::span<const double> pred, std::span<const double> target,
                  const LossWeights& weights) {
  CheckWeights(weights);
  return Combine(weights, Bce(pred, target), Mse(pred, target), Dice(pred, target));
}

LossValue VaeLoss(const DenseSkin& pred, const DenseSkin& target, const LossWeights& weights) {
  CheckWeights(weights);
  CheckShapes(pred, target);
  return Combine(weights, Bce(AsSpan(pred), AsSpan(target)), Mse(AsSpan(pred), AsSpan(target)),
                 DiceColumns(pred, target));
}

}  // namespace rigtok
