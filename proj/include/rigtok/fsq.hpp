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

#ifndef RIGTOK_FSQ_HPP_
#define RIGTOK_FSQ_HPP_

// Finite scalar quantization: each latent dimension d is snapped to a uniform
// grid of levels[d] points on [-1, 1]; the code is then packed into a single
// mixed-radix token id.

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace rigtok {

struct TokenId {
  std::int64_t value = 0;

  auto operator<=>(const TokenId&) const = default;
};

using FsqCode = std::vector<int>;

class FsqLevels {
 public:
  // Throws kInvalidArgument for an empty list or any level below 2.
  explicit FsqLevels(std::vector<int> levels);

  const std::vector<int>& levels() const { return levels_; }
  int dim() const { return static_cast<int>(levels_.size()); }
  std::int64_t codebook_size() const { return codebook_size_; }

  bool operator==(const FsqLevels&) const = default;

 private:
  std::vector<int> levels_;
  std::int64_t codebook_size_ = 0;
};

std::int64_t CodebookSize(const FsqLevels& levels);

// Grid value k of a dimension with `level` points.
double GridValue(int level, int k);

// Nearest grid point per dimension; ties go to the lower index and values
// outside [-1, 1] clamp to the grid ends.
FsqCode Quantize(const FsqLevels& levels, std::span<const double> z);
std::vector<double> Dequantize(const FsqLevels& levels, const FsqCode& code);

// token = sum_d code[d] * prod_{d' < d} levels[d'].
TokenId CodeToToken(const FsqLevels& levels, const FsqCode& code);
FsqCode TokenToCode(const FsqLevels& levels, TokenId token);

// Fraction of the codebook hit by `observed`.
double Utilization(const FsqLevels& levels, std::span<const TokenId> observed);

enum class CompressionMode {
  kFp16Storage,  // two bytes per token, as a stored FP16/int16 id
  kBitExact,     // log2(codebook size) bits per token
};

// Ratio of an FP16 per-vertex weight column to `tokens` SkinTokens.
double CompressionRatio(int vertex_count, int tokens, const FsqLevels& levels,
                        CompressionMode mode);

struct SteResult {
  std::vector<double> quantized;
  std::vector<double> gradient;
};

// Straight-through pass: forward is Dequantize(Quantize(z)), backward copies
// the downstream gradient unchanged.
SteResult StraightThrough(const FsqLevels& levels, std::span<const double> z,
                          std::span<const double> downstream_gradient);

// Stand-in for the learned skin encoder: a fixed seeded random projection of
// one joint's per-vertex weight column into `tokens` latents of size
// levels.dim(), squashed by tanh and quantized. Deterministic per seed.
std::vector<TokenId> ProjectWeightsToTokens(std::span<const double> column,
                                            const FsqLevels& levels, int tokens,
                                            std::uint64_t seed);

}  // namespace rigtok

#endif  // RIGTOK_FSQ_HPP_
