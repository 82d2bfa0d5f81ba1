// Copyright 2026 The A2T Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef A2T_ERROR_H_
#define A2T_ERROR_H_

#include <stdexcept>
#include <string>

namespace a2t {

enum class ErrorCode {
  kDimension,          // Length mismatch between paired signals.
  kRate,               // Sample-rate mismatch.
  kPlacement,          // Shift outside the destination buffer.
  kDegenerate,         // Zero energy / zero radius / zero angle.
  kGeometry,           // Positions outside a room, sampler exhaustion.
  kArity,              // Mismatched list counts.
  kComplexity,         // Exhaustive search too large.
  kGradientUndefined,  // Loss evaluated at an infinite metric value.
  kDivergence,         // Non-finite loss during training.
  kLength,             // Input shorter than a filter.
  kIo,                 // File system or format failures.
  kValidation,         // Malformed configuration or arguments.
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // True for errors caused by numerical state rather than bad input.
  bool is_numerical() const {
    return code_ == ErrorCode::kDegenerate ||
           code_ == ErrorCode::kGradientUndefined ||
           code_ == ErrorCode::kDivergence;
  }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kRate: return "rate error";
    case ErrorCode::kPlacement: return "placement error";
    case ErrorCode::kDegenerate: return "degenerate-signal error";
    case ErrorCode::kGeometry: return "geometry error";
    case ErrorCode::kArity: return "arity error";
    case ErrorCode::kComplexity: return "complexity error";
    case ErrorCode::kGradientUndefined: return "gradient-undefined error";
    case ErrorCode::kDivergence: return "training-divergence error";
    case ErrorCode::kLength: return "length error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kValidation: return "validation error";
  }
  return "error";
}

}  // namespace a2t

#endif  // A2T_ERROR_H_
