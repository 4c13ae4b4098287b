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

#include "pedintent/error.h"

namespace pedintent {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateLandmarks: return "DegenerateLandmarks";
    case ErrorCode::kNearPiRotation: return "NearPiRotation";
    case ErrorCode::kZeroQuaternion: return "ZeroQuaternion";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kNonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kInsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kMalformedTreeFile: return "MalformedTreeFile";
    case ErrorCode::kEmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace pedintent
