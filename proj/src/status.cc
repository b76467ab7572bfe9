// Copyright 2026 The PABI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "pabi/status.h"

#include <cstdlib>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace pabi {
namespace {

constexpr char kCodePayload[] = "pabi/code";
constexpr char kRequiredValuePayload[] = "pabi/required_value";

}  // namespace

absl::Status PreconditionViolation(absl::string_view code,
                                   absl::string_view message,
                                   std::optional<double> required_value) {
  absl::Status status = absl::FailedPreconditionError(message);
  status.SetPayload(kCodePayload, absl::Cord(code));
  if (required_value.has_value()) {
    // %.17g keeps the threshold bit-exact through the round trip.
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", *required_value);
    status.SetPayload(kRequiredValuePayload, absl::Cord(buffer));
  }
  return status;
}

absl::Status InvalidParameter(absl::string_view code, absl::string_view message) {
  absl::Status status = absl::InvalidArgumentError(message);
  status.SetPayload(kCodePayload, absl::Cord(code));
  return status;
}

std::string ErrorCode(const absl::Status& status) {
  if (auto payload = status.GetPayload(kCodePayload); payload.has_value()) {
    return std::string(*payload);
  }
  return absl::StatusCodeToString(status.code());
}

std::optional<double> RequiredValue(const absl::Status& status) {
  auto payload = status.GetPayload(kRequiredValuePayload);
  if (!payload.has_value()) return std::nullopt;
  const std::string text(*payload);
  return std::strtod(text.c_str(), nullptr);
}

bool IsUserError(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace pabi
