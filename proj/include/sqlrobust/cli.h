// Copyright 2026 The sqlrobust Authors.
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

#ifndef SQLROBUST_CLI_H_
#define SQLROBUST_CLI_H_

#include <iostream>
#include <string_view>

namespace sqlrobust {

inline constexpr std::string_view kVersion = "0.1.0";

// Entry point for the sqlrobust binary. Option values come from, in rising
// precedence, a JSON --config file, SQLROBUST_* environment variables and
// command-line flags. Returns the process exit code: 0 on success, 1 usage,
// 2 unreadable input, 3 transport failure, 4 validation failure.
int RunCli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr);

}  // namespace sqlrobust

#endif  // SQLROBUST_CLI_H_
