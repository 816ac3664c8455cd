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

#ifndef RIGTOK_LOSSES_HPP_
#define RIGTOK_LOSSES_HPP_

// Reconstruction losses for skinning weights, each with its exact gradient
// with respect to the prediction.

#include <span>
#include <vector>

#include "rigtok/rigcore.hpp"

namespace rigtok {

struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;
};

struct LossWeights {
  double bce = 1.0;
  double mse = 1.0;
  double dice = 1.0;
};

inline constexpr double kBceClamp = 1e-7;
inline constexpr double kDiceEpsilon = 1e-4;

// Mean binary cross-entropy. Predictions are clamped to
// [kBceClamp, 1 - kBceClamp] before evaluation.
LossValue Bce(std::span<const double> pred, std::span<const double> target);

// Mean squared error.
LossValue Mse(std::span<const double> pred, std::span<const double> target);

// Squared-denominator soft Dice of a single column:
//   1 - (2 sum p w + eps) / (sum p^2 + sum w^2 + eps)
LossValue Dice(std::span<const double> pred, std::span<const double> target,
               double eps = kDiceEpsilon);

// Dice summed over the joint columns of an N x J table. The gradient is laid
// out column-major, matching DenseSkin storage.
LossValue DiceColumns(const DenseSkin& pred, const DenseSkin& target, double eps = kDiceEpsilon);

LossValue VaeLoss(std::span<const double> pred, std::span<const double> target,
                  const LossWeights& weights);
// Table form: BCE and MSE averaged over all entries, Dice summed per column.
LossValue VaeLoss(const DenseSkin& pred, const DenseSkin& target, const LossWeights& weights);

}  // namespace rigtok

#endif  // RIGTOK_LOSSES_HPP_
