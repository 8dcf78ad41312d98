/* Copyright 2026 The trackkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "trackkit/error.h"

namespace trackkit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidBox: return "InvalidBox";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kInvalidQuant: return "InvalidQuant";
    case ErrorCode::kInvalidFrameDims: return "InvalidFrameDims";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kMissingAnnotation: return "MissingAnnotation";
    case ErrorCode::kMissingAnchorFrame: return "MissingAnchorFrame";
    case ErrorCode::kEmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kClientError: return "ClientError";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
  }
  return "Unknown";
}

}  // namespace trackkit
