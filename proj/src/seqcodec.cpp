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

#include "rigtok/seqcodec.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <functional>
#include <sstream>

#include "rigtok/error.hpp"

namespace rigtok {

const std::vector<std::string>& Vocab::DefaultTypeNames() {
  static const std::vector<std::string> names = {
      "generic", "mixamo", "vroid", "spine", "arm", "leg",
      "head",    "tail",   "wing",  "finger", "other"};
  return names;
}

Vocab::Vocab(int bins, FsqLevels levels, std::vector<std::string> type_names)
    : bins_(bins), levels_(std::move(levels)), type_names_(std::move(type_names)) {
  if (bins_ < 2) throw Error(ErrorCode::kInvalidArgument, "vocab: need at least 2 coordinate bins");
  if (type_names_.empty()) throw Error(ErrorCode::kInvalidArgument, "vocab: empty type registry");
  for (size_t i = 0; i < type_names_.size(); ++i) {
    const auto& name = type_names_[i];
    if (name.empty() || name.find_first_of(", \t\r\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "vocab: bad type name '" + name + "'");
    }
    if (std::find(type_names_.begin(), type_names_.begin() + i, name) !=
        type_names_.begin() + i) {
      throw Error(ErrorCode::kInvalidArgument, "vocab: duplicate type name '" + name + "'");
    }
  }
  const std::int64_t total = static_cast<std::int64_t>(kSpecialCount) +
                             static_cast<std::int64_t>(type_names_.size()) + bins_ +
                             levels_.codebook_size();
  if (total > INT_MAX) throw Error(ErrorCode::kCapacity, "vocab: id space exceeds 32 bits");
}

Vocab Vocab::ForSkeleton(int bins, FsqLevels levels, const Skeleton& skeleton) {
  auto names = DefaultTypeNames();
  for (const auto& j : skeleton.joints) {
    if (j.chain_type.empty()) continue;
    if (std::find(names.begin(), names.end(), j.chain_type) == names.end()) {
      names.push_back(j.chain_type);
    }
  }
  return Vocab(bins, std::move(levels), std::move(names));
}

std::optional<int> Vocab::FindType(std::string_view name) const {
  if (name.empty()) name = type_names_.front();
  auto it = std::find(type_names_.begin(), type_names_.end(), name);
  if (it == type_names_.end()) return std::nullopt;
  return static_cast<int>(it - type_names_.begin());
}

TokenClass Vocab::Classify(int id) const {
  switch (id) {
    case kBos: return TokenClass::kBos;
    case kEos: return TokenClass::kEos;
    case kSep: return TokenClass::kSep;
    case kRoot: return TokenClass::kRoot;
    default: break;
  }
  if (id < kSpecialCount) return TokenClass::kInvalid;
  if (id < coord_base()) return TokenClass::kType;
  if (id < skin_base()) return TokenClass::kCoord;
  if (id < size()) return TokenClass::kSkin;
  return TokenClass::kInvalid;
}

int QuantizeCoord(double x, int bins) {
  if (bins < 2) throw Error(ErrorCode::kInvalidArgument, "coordinate bins must be >= 2");
  const double t = (std::clamp(x, -1.0, 1.0) + 1.0) * 0.5 * (bins - 1);
  return std::clamp(static_cast<int>(std::floor(t + 0.5)), 0, bins - 1);
}

double DequantizeCoord(int bin, int bins) { return -1.0 + 2.0 * bin / (bins - 1); }

// ---------------------------------------------------------------------------
// Chains

std::vector<std::vector<int>> ChainDecomposition(const Skeleton& skeleton) {
  const int n = skeleton.size();
  const auto children = skeleton.children();

  // Subtree sizes; parents are not necessarily before children in index
  // order, so walk a DFS post-order from each root.
  std::vector<int> subtree(n, 1);
  std::vector<int> order;
  order.reserve(n);
  for (int r = 0; r < n; ++r) {
    if (skeleton.joints[r].parent) continue;
    std::vector<int> stack{r};
    while (!stack.empty()) {
      int j = stack.back();
      stack.pop_back();
      order.push_back(j);
      for (int c : children[j]) stack.push_back(c);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int c : children[*it]) subtree[*it] += subtree[c];
  }
  auto sorted_children = [&](int j) {
    auto kids = children[j];
    std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
      if (subtree[a] != subtree[b]) return subtree[a] > subtree[b];
      return a < b;
    });
    return kids;
  };

  std::vector<std::vector<int>> chains;
  std::function<void(int)> emit = [&](int start) {
    std::vector<int> chain{start};
    for (;;) {
      auto kids = sorted_children(chain.back());
      if (kids.empty()) break;
      chain.push_back(kids.front());
    }
    chains.push_back(chain);
    for (size_t k = 0; k < chain.size(); ++k) {
      auto kids = sorted_children(chain[k]);
      const size_t skip = (k + 1 < chain.size()) ? 1 : 0;
      for (size_t c = skip; c < kids.size(); ++c) emit(kids[c]);
    }
  };
  for (int r = 0; r < n; ++r) {
    if (!skeleton.joints[r].parent) emit(r);
  }
  return chains;
}

std::vector<int> EmissionOrder(const Skeleton& skeleton) {
  std::vector<int> order;
  for (const auto& chain : ChainDecomposition(skeleton)) {
    order.insert(order.end(), chain.begin(), chain.end());
  }
  return order;
}

// ---------------------------------------------------------------------------
// Encode

RigSequence EncodeRig(const Skeleton& skeleton, const std::vector<std::vector<TokenId>>& skin_tokens,
                      const Vocab& vocab, int t_d, const CodecOptions& options) {
  const int n = skeleton.size();
  if (n > options.max_joints) {
    throw Error(ErrorCode::kCapacity, "encode: " + std::to_string(n) + " joints exceed the maximum of " +
                                          std::to_string(options.max_joints));
  }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "encode: empty skeleton");
  if (t_d < 0) throw Error(ErrorCode::kInvalidArgument, "encode: negative t_d");
  if (auto violations = ValidateSkeleton(skeleton); !violations.empty()) {
    throw Error(ErrorCode::kStructure, "encode: " + violations.front().message);
  }
  if (t_d > 0) {
    if (static_cast<int>(skin_tokens.size()) != n) {
      throw Error(ErrorCode::kInvalidArgument, "encode: need one skin token list per joint");
    }
    for (const auto& list : skin_tokens) {
      if (static_cast<int>(list.size()) != t_d) {
        throw Error(ErrorCode::kInvalidArgument, "encode: skin token list length differs from t_d");
      }
      for (const auto& t : list) {
        if (t.value < 0 || t.value >= vocab.levels().codebook_size()) {
          throw Error(ErrorCode::kInvalidArgument, "encode: skin token outside codebook");
        }
      }
    }
  }

  RigSequence seq;
  seq.t_d = t_d;
  auto& out = seq.tokens;
  auto push_triple = [&](const Vec3& p) {
    for (int k = 0; k < 3; ++k) out.push_back(vocab.CoordToken(QuantizeCoord(p[k], vocab.bins())));
  };

  out.push_back(Vocab::kBos);
  const auto chains = ChainDecomposition(skeleton);
  std::vector<int> order;
  for (size_t c = 0; c < chains.size(); ++c) {
    const auto& chain = chains[c];
    const auto& head = skeleton.joints[chain.front()];
    const auto type = vocab.FindType(head.chain_type);
    if (!type) {
      throw Error(ErrorCode::kInvalidArgument, "encode: chain type '" + head.chain_type +
                                                   "' is not in the vocabulary");
    }
    out.push_back(vocab.TypeToken(*type));
    if (head.parent) {
      push_triple(skeleton.joints[*head.parent].position);
    } else if (c > 0) {
      out.push_back(Vocab::kRoot);
    }
    for (int j : chain) {
      push_triple(skeleton.joints[j].position);
      order.push_back(j);
    }
  }
  if (t_d > 0) {
    out.push_back(Vocab::kSep);
    for (int j : order) {
      for (const auto& t : skin_tokens[j]) out.push_back(vocab.SkinToken(t));
    }
  }
  out.push_back(Vocab::kEos);
  return seq;
}

// ---------------------------------------------------------------------------
// Decode

const char* DecodeFailureName(DecodeFailure failure) {
  switch (failure) {
    case DecodeFailure::kNone: return "ok";
    case DecodeFailure::kMissingBos: return "missing bos";
    case DecodeFailure::kMissingEos: return "missing eos";
    case DecodeFailure::kTruncatedTriple: return "truncated triple";
    case DecodeFailure::kTypeInSkin: return "type in skin";
    case DecodeFailure::kUnmatchedParent: return "unmatched parent";
    case DecodeFailure::kAmbiguousParent: return "ambiguous parent";
    case DecodeFailure::kSkinLengthMismatch: return "skin length mismatch";
    case DecodeFailure::kSkinJointMismatch: return "skin joint mismatch";
    case DecodeFailure::kUnexpectedToken: return "unexpected token";
    case DecodeFailure::kEmptySkeleton: return "empty skeleton";
    case DecodeFailure::kEmptyChain: return "empty chain";
    case DecodeFailure::kTrailingTokens: return "trailing tokens";
    case DecodeFailure::kCapacity: return "capacity";
    case DecodeFailure::kInvalidRig: return "invalid rig";
  }
  return "unknown";
}

namespace {

DecodedRig Fail(DecodeFailure failure, std::string detail) {
  DecodedRig out;
  out.failure = failure;
  out.detail = std::move(detail);
  return out;
}

}  // namespace

DecodedRig DecodeRig(const RigSequence& sequence, const Vocab& vocab, const CodecOptions& options) {
  const auto& tok = sequence.tokens;
  const size_t n = tok.size();
  if (n == 0 || tok[0] != Vocab::kBos) return Fail(DecodeFailure::kMissingBos, "sequence must start with <bos>");
  if (sequence.t_d < 0) return Fail(DecodeFailure::kSkinLengthMismatch, "negative t_d");

  auto cls = [&](size_t i) { return vocab.Classify(tok[i]); };
  auto at = [&](size_t i) { return "at position " + std::to_string(i); };

  using Bins = std::array<int, 3>;
  std::vector<Bins> bins;
  DecodedRig out;
  auto& joints = out.skeleton.joints;

  // Reads one coordinate triple at pos; reports truncation.
  auto read_triple = [&](size_t& pos, Bins& triple) -> bool {
    for (int k = 0; k < 3; ++k) {
      if (pos >= n || cls(pos) != TokenClass::kCoord) return false;
      triple[k] = vocab.BinOf(tok[pos++]);
    }
    return true;
  };

  size_t pos = 1;
  int chain_count = 0;
  while (pos < n) {
    const TokenClass c = cls(pos);
    if (c == TokenClass::kEos || c == TokenClass::kSep) break;
    if (c != TokenClass::kType) {
      return Fail(DecodeFailure::kUnexpectedToken, "expected a chain type token " + at(pos));
    }
    const std::string type = vocab.type_names()[vocab.TypeIndexOf(tok[pos])];
    ++pos;

    std::optional<int> attach;
    if (chain_count > 0) {
      if (pos < n && cls(pos) == TokenClass::kRoot) {
        ++pos;
      } else {
        Bins parent{};
        const size_t start = pos;
        if (!read_triple(pos, parent)) {
          return Fail(DecodeFailure::kTruncatedTriple, "parent triple truncated " + at(start));
        }
        int matches = 0;
        for (size_t j = 0; j < bins.size(); ++j) {
          if (bins[j] == parent) {
            ++matches;
            attach = static_cast<int>(j);
          }
        }
        if (matches == 0) {
          return Fail(DecodeFailure::kUnmatchedParent, "parent triple " + at(start) +
                                                           " matches no earlier joint");
        }
        if (matches > 1) {
          return Fail(DecodeFailure::kAmbiguousParent, "parent triple " + at(start) + " matches " +
                                                           std::to_string(matches) + " joints");
        }
      }
    } else if (pos < n && cls(pos) == TokenClass::kRoot) {
      return Fail(DecodeFailure::kUnexpectedToken, "<root> on the first chain " + at(pos));
    }

    int chain_joints = 0;
    while (pos < n && cls(pos) == TokenClass::kCoord) {
      Bins triple{};
      const size_t start = pos;
      if (!read_triple(pos, triple)) {
        return Fail(DecodeFailure::kTruncatedTriple, "joint triple truncated " + at(start));
      }
      if (static_cast<int>(joints.size()) >= options.max_joints) {
        return Fail(DecodeFailure::kCapacity, "more than " + std::to_string(options.max_joints) + " joints");
      }
      Joint joint;
      joint.name = "joint_" + std::to_string(joints.size());
      joint.chain_type = type;
      for (int k = 0; k < 3; ++k) joint.position[k] = DequantizeCoord(triple[k], vocab.bins());
      if (chain_joints == 0) {
        joint.parent = attach;
      } else {
        joint.parent = static_cast<int>(joints.size()) - 1;
      }
      joints.push_back(std::move(joint));
      bins.push_back(triple);
      ++chain_joints;
    }
    if (chain_joints == 0) return Fail(DecodeFailure::kEmptyChain, "chain without joints " + at(pos));
    ++chain_count;
  }
  if (pos >= n) return Fail(DecodeFailure::kMissingEos, "sequence ended before <eos>");
  if (joints.empty()) return Fail(DecodeFailure::kEmptySkeleton, "no joints decoded");

  std::vector<TokenId> skin;
  if (cls(pos) == TokenClass::kSep) {
    ++pos;
    while (pos < n && cls(pos) != TokenClass::kEos) {
      const TokenClass c = cls(pos);
      if (c == TokenClass::kType) {
        return Fail(DecodeFailure::kTypeInSkin, "chain type token in the skin block " + at(pos));
      }
      if (c != TokenClass::kSkin) {
        return Fail(DecodeFailure::kUnexpectedToken, "non-skin token in the skin block " + at(pos));
      }
      skin.push_back(vocab.SkinOf(tok[pos++]));
    }
    if (pos >= n) return Fail(DecodeFailure::kMissingEos, "sequence ended before <eos>");
  }
  if (pos + 1 != n) return Fail(DecodeFailure::kTrailingTokens, "tokens after <eos> " + at(pos + 1));

  const int t_d = sequence.t_d;
  if (t_d == 0) {
    if (!skin.empty()) return Fail(DecodeFailure::kSkinLengthMismatch, "skin tokens present with t_d = 0");
  } else {
    if (skin.size() % t_d != 0) {
      return Fail(DecodeFailure::kSkinLengthMismatch,
                  std::to_string(skin.size()) + " skin tokens not divisible by t_d = " +
                      std::to_string(t_d));
    }
    if (skin.size() / t_d != joints.size()) {
      return Fail(DecodeFailure::kSkinJointMismatch,
                  std::to_string(skin.size() / t_d) + " skin groups for " +
                      std::to_string(joints.size()) + " joints");
    }
    for (size_t j = 0; j < joints.size(); ++j) {
      out.skin_tokens.emplace_back(skin.begin() + j * t_d, skin.begin() + (j + 1) * t_d);
    }
  }
  if (t_d == 0) out.skin_tokens.assign(joints.size(), {});
  return out;
}

SequenceCheck ValidateSequence(const RigSequence& sequence, const Vocab& vocab,
                               const CodecOptions& options) {
  auto decoded = DecodeRig(sequence, vocab, options);
  if (!decoded.ok()) return {false, decoded.failure, decoded.detail};
  Rig rig;
  rig.skeleton = std::move(decoded.skeleton);
  rig.skin.joint_count = rig.skeleton.size();
  if (auto violations = ValidateRig(rig); !violations.empty()) {
    return {false, DecodeFailure::kInvalidRig, violations.front().code};
  }
  return {true, DecodeFailure::kNone, {}};
}

std::vector<TokenId> NestedPrefix(std::span<const TokenId> tokens, int k) {
  if (k < 1 || k > static_cast<int>(tokens.size())) {
    throw Error(ErrorCode::kInvalidArgument, "prefix length " + std::to_string(k) +
                                                 " outside [1, " + std::to_string(tokens.size()) + "]");
  }
  return {tokens.begin(), tokens.begin() + k};
}

// ---------------------------------------------------------------------------
// Token stream file

std::string FormatTokenStreamHeader(const Vocab& vocab, int t_d) {
  std::string header = "RIGTOK v1 B=" + std::to_string(vocab.bins()) + " levels=";
  const auto& levels = vocab.levels().levels();
  for (size_t d = 0; d < levels.size(); ++d) {
    if (d) header += ',';
    header += std::to_string(levels[d]);
  }
  header += " TD=" + std::to_string(t_d);
  if (!vocab.has_default_types()) {
    header += " types=";
    for (size_t i = 0; i < vocab.type_names().size(); ++i) {
      if (i) header += ',';
      header += vocab.type_names()[i];
    }
  }
  return header;
}

void WriteTokenStream(const Vocab& vocab, const RigSequence& sequence, std::ostream& out) {
  out << FormatTokenStreamHeader(vocab, sequence.t_d) << '\n';
  for (size_t i = 0; i < sequence.tokens.size(); ++i) {
    if (i) out << ' ';
    out << sequence.tokens[i];
  }
  out << '\n';
}

namespace {

[[noreturn]] void StreamError(const std::string& what) {
  throw Error(ErrorCode::kParse, "token stream: " + what);
}

int ParseIntField(std::string_view text, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) StreamError("bad " + what + " '" + std::string(text) + "'");
  return value;
}

std::vector<std::string> SplitCommas(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t comma = text.find(',', start);
    out.emplace_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

TokenStream ReadTokenStream(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) StreamError("missing header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::istringstream fields(header);
  std::string magic, version;
  fields >> magic >> version;
  if (magic != "RIGTOK" || version != "v1") StreamError("header must start with 'RIGTOK v1'");

  std::optional<int> bins, t_d;
  std::optional<std::vector<int>> levels;
  std::optional<std::vector<std::string>> types;
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) StreamError("malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string_view value = std::string_view(field).substr(eq + 1);
    if (key == "B") {
      bins = ParseIntField(value, "bin count");
    } else if (key == "TD") {
      t_d = ParseIntField(value, "TD");
    } else if (key == "levels") {
      std::vector<int> parsed;
      for (const auto& part : SplitCommas(value)) parsed.push_back(ParseIntField(part, "level"));
      levels = std::move(parsed);
    } else if (key == "types") {
      types = SplitCommas(value);
    } else {
      StreamError("unknown header field '" + key + "'");
    }
  }
  if (!bins || !t_d || !levels) StreamError("header needs B, levels and TD");
  if (*t_d < 0) StreamError("TD must be non-negative");

  TokenStream out{Vocab(*bins, FsqLevels(*levels), types ? *types : Vocab::DefaultTypeNames()),
                  RigSequence{}};
  out.sequence.t_d = *t_d;
  std::string word;
  while (in >> word) out.sequence.tokens.push_back(ParseIntField(word, "token id"));
  return out;
}

}  // namespace rigtok
