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

#ifndef RIGTOK_ERROR_HPP_
#define RIGTOK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rigtok {

// Error categories. Each maps 1:1 onto a status code of the C API.
enum class ErrorCode {
  kParse = 1,
  kStructure,
  kCycle,
  kWeightRange,
  kDuplicateEntry,
  kDegenerate,
  kCapacity,
  kInvalidArgument,
  kDecode,
  kIo,
  kNumeric,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rigtok

#endif  // RIGTOK_ERROR_HPP_
