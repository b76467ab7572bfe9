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

#ifndef PABI_STATUS_H_
#define PABI_STATUS_H_

#include <optional>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace pabi {

// Precondition failures carry a short machine-readable code and, when a
// numeric threshold is involved, the value the caller would have needed.
// Both travel as status payloads so callers (notably the CLI) can report them.
absl::Status PreconditionViolation(absl::string_view code,
                                   absl::string_view message,
                                   std::optional<double> required_value =
                                       std::nullopt);

absl::Status InvalidParameter(absl::string_view code, absl::string_view message);

// Returns the code attached by PreconditionViolation/InvalidParameter, or the
// canonical status code name when none was attached.
std::string ErrorCode(const absl::Status& status);

std::optional<double> RequiredValue(const absl::Status& status);

// True for the status kinds that signal bad input rather than a bug.
bool IsUserError(const absl::Status& status);

}  // namespace pabi

#define PABI_RETURN_IF_ERROR(expr)            \
  do {                                        \
    const ::absl::Status pabi_status_ = (expr); \
    if (!pabi_status_.ok()) return pabi_status_; \
  } while (false)

#define PABI_STATUS_CONCAT_INNER_(a, b) a##b
#define PABI_STATUS_CONCAT_(a, b) PABI_STATUS_CONCAT_INNER_(a, b)

#define PABI_ASSIGN_OR_RETURN(lhs, expr) \
  PABI_ASSIGN_OR_RETURN_IMPL_(           \
      PABI_STATUS_CONCAT_(pabi_statusor_, __LINE__), lhs, expr)

#define PABI_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, expr) \
  auto statusor = (expr);                                \
  if (!statusor.ok()) return statusor.status();          \
  lhs = *std::move(statusor)

#endif  // PABI_STATUS_H_
