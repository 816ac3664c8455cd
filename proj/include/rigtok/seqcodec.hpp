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

#ifndef RIGTOK_SEQCODEC_HPP_
#define RIGTOK_SEQCODEC_HPP_

// Rig <-> token sequence codec.
//
// Id layout: [specials | chain type tags | coordinate bins | skin tokens].
//
// Grammar:
//   <bos> chain+ [<sep> skin*] <eos>
//   chain := <type> [<root> | parent-triple] triple+
// The first chain is always a root chain and carries neither <root> nor a
// parent triple. A later chain attaches to the unique earlier joint whose
// quantized coordinates equal the parent triple. <sep> and the skin block
// are present only when t_d > 0; the skin block holds t_d ids per joint in
// emission order.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rigtok/fsq.hpp"
#include "rigtok/rigcore.hpp"

namespace rigtok {

enum class TokenClass { kBos, kEos, kSep, kRoot, kType, kCoord, kSkin, kInvalid };

class Vocab {
 public:
  static constexpr int kBos = 0;
  static constexpr int kEos = 1;
  static constexpr int kSep = 2;
  static constexpr int kRoot = 3;
  static constexpr int kSpecialCount = 4;

  static const std::vector<std::string>& DefaultTypeNames();

  Vocab(int bins, FsqLevels levels, std::vector<std::string> type_names = DefaultTypeNames());

  // Default registry extended by every chain type used in `skeleton`, in
  // order of first appearance.
  static Vocab ForSkeleton(int bins, FsqLevels levels, const Skeleton& skeleton);

  int bins() const { return bins_; }
  const FsqLevels& levels() const { return levels_; }
  const std::vector<std::string>& type_names() const { return type_names_; }
  bool has_default_types() const { return type_names_ == DefaultTypeNames(); }

  int size() const { return skin_base() + static_cast<int>(levels_.codebook_size()); }
  int type_base() const { return kSpecialCount; }
  int coord_base() const { return type_base() + static_cast<int>(type_names_.size()); }
  int skin_base() const { return coord_base() + bins_; }

  std::optional<int> FindType(std::string_view name) const;
  int TypeToken(int type_index) const { return type_base() + type_index; }
  int CoordToken(int bin) const { return coord_base() + bin; }
  int SkinToken(TokenId token) const { return skin_base() + static_cast<int>(token.value); }

  TokenClass Classify(int id) const;
  int TypeIndexOf(int id) const { return id - type_base(); }
  int BinOf(int id) const { return id - coord_base(); }
  TokenId SkinOf(int id) const { return TokenId{id - skin_base()}; }

 private:
  int bins_;
  FsqLevels levels_;
  std::vector<std::string> type_names_;
};

struct RigSequence {
  std::vector<int> tokens;
  int t_d = 0;

  bool operator==(const RigSequence&) const = default;
};

// Half-up rounding of (x+1)/2 * (bins-1); x clamps to [-1, 1].
int QuantizeCoord(double x, int bins);
double DequantizeCoord(int bin, int bins);

// Depth-first chain decomposition; at every joint the continuing child is
// the one with the largest subtree (ties: lowest index). Roots are taken in
// ascending index order.
std::vector<std::vector<int>> ChainDecomposition(const Skeleton& skeleton);
// Joint indices in the order the encoder emits them.
std::vector<int> EmissionOrder(const Skeleton& skeleton);

struct CodecOptions {
  int max_joints = 256;
};

// `skin_tokens[j]` holds the t_d skin tokens of joint j (indexed like the
// skeleton, not in emission order). Throws kCapacity above max_joints and
// kInvalidArgument for malformed token lists or unregistered chain types.
RigSequence EncodeRig(const Skeleton& skeleton, const std::vector<std::vector<TokenId>>& skin_tokens,
                      const Vocab& vocab, int t_d, const CodecOptions& options = {});

enum class DecodeFailure {
  kNone = 0,
  kMissingBos,
  kMissingEos,
  kTruncatedTriple,
  kTypeInSkin,
  kUnmatchedParent,
  kAmbiguousParent,
  kSkinLengthMismatch,
  kSkinJointMismatch,
  kUnexpectedToken,
  kEmptySkeleton,
  kEmptyChain,
  kTrailingTokens,
  kCapacity,
  kInvalidRig,
};

const char* DecodeFailureName(DecodeFailure failure);

struct DecodedRig {
  DecodeFailure failure = DecodeFailure::kNone;
  std::string detail;
  // Joints in emission order.
  Skeleton skeleton;
  std::vector<std::vector<TokenId>> skin_tokens;

  bool ok() const { return failure == DecodeFailure::kNone; }
};

// Accepts arbitrary token lists; never throws on malformed input.
DecodedRig DecodeRig(const RigSequence& sequence, const Vocab& vocab,
                     const CodecOptions& options = {});

struct SequenceCheck {
  bool valid = false;
  DecodeFailure failure = DecodeFailure::kNone;
  std::string detail;
};

// Valid iff the sequence decodes and the decoded skeleton validates cleanly.
SequenceCheck ValidateSequence(const RigSequence& sequence, const Vocab& vocab,
                               const CodecOptions& options = {});

// First k tokens. Throws kInvalidArgument unless 1 <= k <= size.
std::vector<TokenId> NestedPrefix(std::span<const TokenId> tokens, int k);

// ---------------------------------------------------------------------------
// Token stream file: "RIGTOK v1 B=<bins> levels=<l,...> TD=<t_d>" followed by
// whitespace-separated ids. A " types=a,b,..." suffix is written only when
// the type registry differs from the default one.

struct TokenStream {
  Vocab vocab;
  RigSequence sequence;
};

std::string FormatTokenStreamHeader(const Vocab& vocab, int t_d);
void WriteTokenStream(const Vocab& vocab, const RigSequence& sequence, std::ostream& out);
TokenStream ReadTokenStream(std::istream& in);

}  // namespace rigtok

#endif  // RIGTOK_SEQCODEC_HPP_
