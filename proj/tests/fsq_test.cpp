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
#include <limits>
#include <vector>

#include "doctest.h"
#include "rigtok/error.hpp"
#include "rigtok/fsq.hpp"
#include "test_util.hpp"

namespace rigtok {
namespace {

// Nearest grid point by exhaustive search; the first (lowest) index wins ties.
int NearestIndexOracle(int level, double x) {
  x = std::min(1.0, std::max(-1.0, x));
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < level; ++k) {
    const double d = std::abs(x - GridValue(level, k));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

TEST_CASE("codebook sizes") {
  CHECK(CodebookSize(FsqLevels({8, 8, 8, 5, 6})) == 15360);
  CHECK(CodebookSize(FsqLevels({8, 8, 8, 8, 8})) == 32768);
  CHECK(CodebookSize(FsqLevels({8, 8, 8, 5, 5, 5})) == 64000);
  CHECK(CodebookSize(FsqLevels({2})) == 2);
  CHECK_THROWS_AS(FsqLevels({}), Error);
  CHECK_THROWS_AS(FsqLevels({8, 1}), Error);
}

TEST_CASE("quantize examples") {
  const FsqLevels three({3});
  CHECK(Quantize(three, std::vector<double>{0.0}) == FsqCode{1});
  CHECK(Quantize(three, std::vector<double>{0.6}) == FsqCode{2});
  CHECK(Quantize(three, std::vector<double>{0.4}) == FsqCode{1});
  CHECK(Quantize(FsqLevels({2}), std::vector<double>{-7.0}) == FsqCode{0});
  CHECK(Quantize(FsqLevels({2}), std::vector<double>{7.0}) == FsqCode{1});
  // Exact midpoints go to the lower index.
  CHECK(Quantize(FsqLevels({2}), std::vector<double>{0.0}) == FsqCode{0});
  CHECK(Quantize(three, std::vector<double>{0.5}) == FsqCode{1});
  CHECK(Quantize(three, std::vector<double>{-0.5}) == FsqCode{0});
  CHECK_THROWS(Quantize(three, std::vector<double>{std::nan("")}));
  CHECK_THROWS(Quantize(three, std::vector<double>{0.0, 0.0}));
}

TEST_CASE("quantize matches the exhaustive nearest-point oracle") {
  Rng rng(11);
  const FsqLevels levels({8, 8, 8, 5, 5, 5});
  for (int n = 0; n < 20000; ++n) {
    std::vector<double> z(6);
    for (auto& x : z) x = testing::UniformIn(rng, -1.3, 1.3);
    const FsqCode code = Quantize(levels, z);
    for (int d = 0; d < 6; ++d) CHECK(code[d] == NearestIndexOracle(levels.levels()[d], z[d]));
  }
}

TEST_CASE("quantization error is at most half the grid spacing and idempotent") {
  Rng rng(5);
  const FsqLevels levels({8, 5, 3, 7});
  for (int n = 0; n < 5000; ++n) {
    std::vector<double> z(4);
    for (auto& x : z) x = testing::UniformIn(rng, -1.0, 1.0);
    const FsqCode code = Quantize(levels, z);
    const auto back = Dequantize(levels, code);
    for (int d = 0; d < 4; ++d) {
      CHECK(std::abs(z[d] - back[d]) <= 1.0 / (levels.levels()[d] - 1) + 1e-15);
    }
    CHECK(Quantize(levels, back) == code);
  }
}

TEST_CASE("token ids: examples and errors") {
  const FsqLevels levels({8, 8});
  CHECK(CodeToToken(levels, {0, 0}).value == 0);
  CHECK(CodeToToken(levels, {1, 2}).value == 17);
  CHECK(CodeToToken(levels, {7, 7}).value == 63);
  CHECK(TokenToCode(levels, TokenId{17}) == FsqCode{1, 2});
  CHECK_THROWS(TokenToCode(levels, TokenId{64}));
  CHECK_THROWS(TokenToCode(levels, TokenId{-1}));
  CHECK_THROWS(CodeToToken(levels, {8, 0}));
}

TEST_CASE("token ids: exhaustive bijection on small codebooks") {
  const std::vector<std::vector<int>> configs = {
      {8, 8}, {2, 3, 4}, {8, 8, 8, 5, 6}, {8, 8, 8, 8, 8}, {16, 16, 16, 16}, {2}};
  for (const auto& cfg : configs) {
    const FsqLevels levels(cfg);
    REQUIRE(levels.codebook_size() <= (1 << 16));
    std::vector<char> seen(levels.codebook_size(), 0);
    for (std::int64_t t = 0; t < levels.codebook_size(); ++t) {
      const FsqCode code = TokenToCode(levels, TokenId{t});
      const TokenId back = CodeToToken(levels, code);
      REQUIRE(back.value == t);
      seen[t] = 1;
    }
    for (char c : seen) CHECK(c == 1);
  }
}

TEST_CASE("utilization") {
  const FsqLevels levels({8, 8});
  std::vector<TokenId> all;
  for (int t = 0; t < 64; ++t) all.push_back(TokenId{t});
  all.push_back(TokenId{3});
  CHECK(Utilization(levels, all) == 1.0);
  CHECK(Utilization(levels, {}) == 0.0);
  CHECK(Utilization(levels, std::vector<TokenId>{{1}, {1}, {2}}) == doctest::Approx(2.0 / 64.0));
  CHECK_THROWS(Utilization(levels, std::vector<TokenId>{{64}}));
}

TEST_CASE("compression accounting") {
  const FsqLevels levels({8, 8, 8, 5, 5, 5});
  CHECK(std::abs(CompressionRatio(6247, 32, levels, CompressionMode::kFp16Storage) - 195.22) <= 0.01);
  CHECK(CompressionRatio(32, 32, levels, CompressionMode::kFp16Storage) == 1.0);
  const double expected = 16.0 / std::log2(64000.0) * 6247.0 / 32.0;
  CHECK(CompressionRatio(6247, 32, levels, CompressionMode::kBitExact) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS(CompressionRatio(0, 32, levels, CompressionMode::kFp16Storage));
}

TEST_CASE("straight-through pass") {
  const FsqLevels levels({3});
  const std::vector<double> z = {0.4};
  const std::vector<double> g = {0.37};
  const SteResult r = StraightThrough(levels, z, g);
  CHECK(r.quantized == std::vector<double>{0.0});
  CHECK(r.gradient == g);

  // f(x) = x^2 after quantization: forward 0, gradient 2 * 0 * upstream passes through.
  const double fx = r.quantized[0] * r.quantized[0];
  const std::vector<double> df = {2.0 * r.quantized[0] * 1.0};
  const SteResult chained = StraightThrough(levels, z, df);
  CHECK(fx == 0.0);
  CHECK(chained.gradient == df);

  const FsqLevels five({5});
  const SteResult on_grid = StraightThrough(five, std::vector<double>{0.5}, std::vector<double>{1.0});
  CHECK(on_grid.quantized == std::vector<double>{0.5});
  // Clamped inputs still pass the gradient unchanged.
  CHECK(StraightThrough(five, std::vector<double>{3.0}, std::vector<double>{2.0}).gradient ==
        std::vector<double>{2.0});
}

TEST_CASE("weight projection is deterministic and in range") {
  const FsqLevels levels({8, 8, 8, 5, 5, 5});
  std::vector<double> column(100);
  Rng rng(2);
  for (auto& w : column) w = testing::UniformIn(rng, 0.0, 1.0);
  const auto a = ProjectWeightsToTokens(column, levels, 6, 9);
  const auto b = ProjectWeightsToTokens(column, levels, 6, 9);
  CHECK(a == b);
  CHECK(a.size() == 6);
  for (const auto& t : a) CHECK((t.value >= 0 && t.value < 64000));
  CHECK(ProjectWeightsToTokens(column, levels, 0, 9).empty());
}

}  // namespace
}  // namespace rigtok
