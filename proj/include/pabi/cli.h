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
#ifndef PABI_CLI_H_
#define PABI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace pabi::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kUserError = 2;

// Runs one command. args excludes the program name. Results go to 'out'
// (or to --output), diagnostics and --echo-config to 'err'. User errors are
// reported on 'err' as a JSON object {code, message, required_value}.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace pabi::cli

#endif  // PABI_CLI_H_
