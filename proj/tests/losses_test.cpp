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


#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "rigtok/error.hpp"
#include "rigtok/losses.hpp"
#include "test_util.hpp"

namespace rigtok {
namespace {

using testing::GradientRelativeError;
using testing::IntIn;
using testing::UniformIn;

using Loss = std::function<LossValue(std::span<const double>, std::span<const double>)>;

std::vector<double> CentralDifference(const Loss& loss, std::vector<double> p,
                                      const std::vector<double>& w, double h) {
  std::vector<double> g(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = loss(p, w).value;
    p[i] = keep - h;
    const double down = loss(p, w).value;
    p[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

void CheckFiniteDifferences(const Loss& loss, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = IntIn(rng, 1, 16);
    std::vector<double> p(n), w(n);
    for (auto& x : p) x = UniformIn(rng, 0.05, 0.95);
    for (auto& x : w) x = UniformIn(rng, 0.05, 0.95);
    const auto analytic = loss(p, w).gradient;
    worst = std::max(worst, GradientRelativeError(analytic, CentralDifference(loss, p, w, 1e-6)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("bce examples") {
  const std::vector<double> half = {0.5}, one = {1.0};
  CHECK(Bce(half, one).value == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  const auto stationary = Bce(half, half);
  CHECK(stationary.gradient[0] == 0.0);
  // Clamping keeps the loss finite at the boundary.
  const std::vector<double> zero = {0.0};
  CHECK(std::isfinite(Bce(zero, one).value));
  CHECK(Bce(zero, one).value == doctest::Approx(-std::log(kBceClamp)));
  CHECK_THROWS_AS(Bce(half, std::vector<double>{1.0, 0.0}), Error);
}

TEST_CASE("mse examples") {
  const std::vector<double> a = {0.3, 0.7}, one = {1.0}, zero = {0.0};
  CHECK(Mse(a, a).value == 0.0);
  CHECK(Mse(one, zero).value == 1.0);
  CHECK(Mse(one, zero).gradient[0] == 2.0);
  CHECK_THROWS_AS(Mse(a, one), Error);
}

TEST_CASE("dice examples") {
  const std::vector<double> half = {0.5}, one = {1.0}, zeros = {0.0, 0.0, 0.0};
  CHECK(Dice(half, one).value == doctest::Approx(1.0 - 1.0001 / 1.2501).epsilon(1e-12));
  CHECK(std::abs(Dice(half, one).value - 0.2) <= 1e-3);
  CHECK(Dice(zeros, zeros).value == 0.0);
  CHECK_THROWS_AS(Dice(half, zeros), Error);
}

TEST_CASE("dice is exactly stationary at pred equal to target") {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> w(IntIn(rng, 1, 64));
    for (auto& x : w) x = UniformIn(rng, 0.0, 1.0) < 0.3 ? 0.0 : UniformIn(rng, 0.0, 1.0);
    const auto d = Dice(w, w);
    CHECK(d.value == 0.0);
    for (double g : d.gradient) worst = std::max(worst, std::abs(g));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("analytic gradients match central differences") {
  CheckFiniteDifferences([](auto p, auto w) { return Bce(p, w); }, 1);
  CheckFiniteDifferences([](auto p, auto w) { return Mse(p, w); }, 2);
  CheckFiniteDifferences([](auto p, auto w) { return Dice(p, w); }, 3);
  CheckFiniteDifferences([](auto p, auto w) { return VaeLoss(p, w, LossWeights{}); }, 4);
}

TEST_CASE("zero target: dice gradient is smaller than bce gradient") {
  const std::vector<double> w = {0.0};
  for (int k = 1; k <= 9; ++k) {
    const std::vector<double> p = {k / 10.0};
    CHECK(std::abs(Dice(p, w).gradient[0]) < std::abs(Bce(p, w).gradient[0]));
  }
}

TEST_CASE("losses are non-negative and dice is bounded") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(IntIn(rng, 1, 10)), w(p.size());
    for (auto& x : p) x = UniformIn(rng, 0.0, 1.0);
    for (auto& x : w) x = UniformIn(rng, 0.0, 1.0);
    CHECK(Bce(p, w).value >= 0.0);
    CHECK(Mse(p, w).value >= 0.0);
    CHECK(Dice(p, w).value >= 0.0);
    CHECK(Dice(p, w).value <= 1.0);
  }
}

TEST_CASE("dice over columns sums per-joint terms") {
  Rng rng(21);
  DenseSkin pred(6, 3), target(6, 3);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      pred(i, j) = UniformIn(rng, 0.0, 1.0);
      target(i, j) = UniformIn(rng, 0.0, 1.0);
    }
  }
  const auto all = DiceColumns(pred, target);
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    const auto col = Dice({pred.col(j).data(), 6}, {target.col(j).data(), 6});
    sum += col.value;
    for (int i = 0; i < 6; ++i) CHECK(all.gradient[j * 6 + i] == col.gradient[i]);
  }
  CHECK(all.value == sum);
  CHECK(DiceColumns(target, target).value == 0.0);
  CHECK_THROWS_AS(DiceColumns(pred, DenseSkin(5, 3)), Error);
}

TEST_CASE("vae loss combines the three terms") {
  const std::vector<double> half = {0.5}, one = {1.0};
  CHECK(VaeLoss(half, one, {1, 0, 0}).value == Bce(half, one).value);
  CHECK(VaeLoss(half, half, {0, 0, 1}).value == 0.0);
  CHECK(std::abs(VaeLoss(half, one, {1, 1, 1}).value - (0.6931 + 0.25 + 0.2)) <= 1e-3);
  CHECK_THROWS_AS(VaeLoss(half, one, {0, 0, 0}), Error);
  CHECK_THROWS_AS(VaeLoss(half, one, {-1, 1, 1}), Error);
}

}  // namespace
}  // namespace rigtok
