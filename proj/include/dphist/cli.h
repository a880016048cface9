//
// Copyright 2026 The dphist Authors
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
//

#ifndef DPHIST_CLI_H_
#define DPHIST_CLI_H_

#include <iosfwd>

#include "absl/status/status.h"

namespace dphist {

inline constexpr char kVersion[] = "0.1.0";

inline constexpr int kExitOk = 0;
// A validation suite ran but some check failed.
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Parameter and content errors map to kExitUsage, everything else to kExitIo.
int ExitCodeFor(const absl::Status& status);

// Entry point of the `dphist` tool. Results go to `out` unless written to a
// file; diagnostics go to `err`. `in` backs "-" for the stream input.
int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace dphist

#endif  // DPHIST_CLI_H_
