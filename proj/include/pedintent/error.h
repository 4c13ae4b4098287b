/*
 * Copyright 2026 The pedintent Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PEDINTENT_ERROR_H_
#define PEDINTENT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pedintent {

enum class ErrorCode {
  kDegenerateLandmarks,
  kNearPiRotation,
  kZeroQuaternion,
  kInsufficientSamples,
  kNonMonotonicTimestamp,
  kInsufficientHistory,
  kInsufficientHorizon,
  kEmptyDataset,
  kMalformedTreeFile,
  kEmptyEvaluation,
  kInvalidConfig,
  kMalformedInput,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying
// a code, so callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pedintent

#endif  // PEDINTENT_ERROR_H_
