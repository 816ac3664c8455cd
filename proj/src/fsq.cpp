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

#include "rigtok/fsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "rigtok/error.hpp"
#include "rigtok/random.hpp"

namespace rigtok {

FsqLevels::FsqLevels(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorCode::kInvalidArgument, "fsq: empty level list");
  codebook_size_ = 1;
  for (int level : levels_) {
    if (level < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fsq: level " + std::to_string(level) + " is below 2");
    }
    if (codebook_size_ > std::numeric_limits<std::int64_t>::max() / level) {
      throw Error(ErrorCode::kCapacity, "fsq: codebook size overflows 64 bits");
    }
    codebook_size_ *= level;
  }
}

std::int64_t CodebookSize(const FsqLevels& levels) { return levels.codebook_size(); }

double GridValue(int level, int k) { return -1.0 + 2.0 * k / (level - 1); }

FsqCode Quantize(const FsqLevels& levels, std::span<const double> z) {
  if (static_cast<int>(z.size()) != levels.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "fsq: latent length does not match levels");
  }
  FsqCode code(z.size());
  for (size_t d = 0; d < z.size(); ++d) {
    const int level = levels.levels()[d];
    if (std::isnan(z[d])) throw Error(ErrorCode::kNumeric, "fsq: latent is NaN");
    const double x = std::clamp(z[d], -1.0, 1.0);
    // Position in grid-index units; ceil(pos - 1/2) rounds half down.
    const double pos = (x + 1.0) * 0.5 * (level - 1);
    const int k = static_cast<int>(std::ceil(pos - 0.5));
    code[d] = std::clamp(k, 0, level - 1);
  }
  return code;
}

std::vector<double> Dequantize(const FsqLevels& levels, const FsqCode& code) {
  if (static_cast<int>(code.size()) != levels.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "fsq: code length does not match levels");
  }
  std::vector<double> out(code.size());
  for (size_t d = 0; d < code.size(); ++d) {
    const int level = levels.levels()[d];
    if (code[d] < 0 || code[d] >= level) {
      throw Error(ErrorCode::kInvalidArgument, "fsq: code index out of range");
    }
    out[d] = GridValue(level, code[d]);
  }
  return out;
}

TokenId CodeToToken(const FsqLevels& levels, const FsqCode& code) {
  if (static_cast<int>(code.size()) != levels.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "fsq: code length does not match levels");
  }
  std::int64_t token = 0;
  std::int64_t radix = 1;
  for (size_t d = 0; d < code.size(); ++d) {
    const int level = levels.levels()[d];
    if (code[d] < 0 || code[d] >= level) {
      throw Error(ErrorCode::kInvalidArgument, "fsq: code index out of range");
    }
    token += code[d] * radix;
    radix *= level;
  }
  return TokenId{token};
}

FsqCode TokenToCode(const FsqLevels& levels, TokenId token) {
  if (token.value < 0 || token.value >= levels.codebook_size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "fsq: token " + std::to_string(token.value) + " outside codebook");
  }
  FsqCode code(levels.dim());
  std::int64_t rest = token.value;
  for (int d = 0; d < levels.dim(); ++d) {
    const int level = levels.levels()[d];
    code[d] = static_cast<int>(rest % level);
    rest /= level;
  }
  return code;
}

double Utilization(const FsqLevels& levels, std::span<const TokenId> observed) {
  std::unordered_set<std::int64_t> distinct;
  for (const auto& t : observed) {
    if (t.value < 0 || t.value >= levels.codebook_size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fsq: token " + std::to_string(t.value) + " outside codebook");
    }
    distinct.insert(t.value);
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(levels.codebook_size());
}

double CompressionRatio(int vertex_count, int tokens, const FsqLevels& levels,
                        CompressionMode mode) {
  if (vertex_count < 1 || tokens < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fsq: vertex and token counts must be positive");
  }
  const double raw_bits = 16.0 * vertex_count;
  switch (mode) {
    case CompressionMode::kFp16Storage:
      return raw_bits / (16.0 * tokens);
    case CompressionMode::kBitExact:
      return raw_bits / (tokens * std::log2(static_cast<double>(levels.codebook_size())));
  }
  return 0.0;
}

SteResult StraightThrough(const FsqLevels& levels, std::span<const double> z,
                          std::span<const double> downstream_gradient) {
  if (z.size() != downstream_gradient.size()) {
    throw Error(ErrorCode::kInvalidArgument, "fsq: gradient length does not match latent");
  }
  SteResult out;
  out.quantized = Dequantize(levels, Quantize(levels, z));
  out.gradient.assign(downstream_gradient.begin(), downstream_gradient.end());
  return out;
}

std::vector<TokenId> ProjectWeightsToTokens(std::span<const double> column,
                                            const FsqLevels& levels, int tokens,
                                            std::uint64_t seed) {
  if (tokens < 0) throw Error(ErrorCode::kInvalidArgument, "fsq: negative token count");
  double norm = 0.0;
  for (double w : column) norm += w * w;
  norm = std::sqrt(std::max(norm, 1e-12));

  std::vector<TokenId> out;
  out.reserve(tokens);
  std::vector<double> latent(levels.dim());
  for (int t = 0; t < tokens; ++t) {
    for (int d = 0; d < levels.dim(); ++d) {
      Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(t) * levels.dim() + d));
      std::normal_distribution<double> gauss(0.0, 1.0);
      double acc = 0.0;
      for (double w : column) acc += w * gauss(rng);
      latent[d] = std::tanh(acc / norm);
    }
    out.push_back(CodeToToken(levels, Quantize(levels, latent)));
  }
  return out;
}

}  // namespace rigtok
